"""Wave-front set estimation by windowed spectral cone analysis.

A cone seminorm is always finite on a finite lattice, so regularity is
decided by the decay of dyadic annulus statistics.  For a weighted
coefficient array the estimator computes, per octave m with
2^m <= |k| < 2^(m+1),

    A_m = (mean over annulus-and-cone of |F(k) w(k)|^q)^(1/q)

(the count-normalized l^q average; max at q=inf), fits the slope of
log2 A_m against m by least squares over the query's octave range, and
declares the direction regular when slope <= -(d/q + margin).  The
count normalization makes the threshold equivalent to summability of
the weighted tail: sum_m count_m * A_m^q converges exactly when the
mass slope stays below -d/q.

Annuli whose content falls below a relative floor are dropped from the
fit; if nothing in the fit range rises above the floor the direction is
regular outright (an empty cone cannot carry a singularity).

Classical (C-infinity) scans use the same machinery with q = inf and no
weight, declaring a direction regular when the fitted decay order
beta = -slope reaches the query threshold T.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .cones import Cone, cone_mask
from .grid import Signal, TorusGrid, forward_transform, lattice
from .norms import FLNormSpec, sequence_norm
from .weights import Weight
from .windows import WindowSpec, window_signal, window_values

__all__ = [
    "WavefrontQuery",
    "WavefrontReport",
    "default_query",
    "regular_directions",
    "estimate_wavefront",
    "classical_wavefront",
    "superior_scan",
    "split_regular",
    "report_included_in",
]

SLOPE_MARGIN = 0.25  # summability margin on the fitted slope
REL_FLOOR = 1e-4  # annulus content below floor*scale is treated as absent
CLASSICAL_REL_FLOOR = 1e-9  # max statistics need deeper usable octaves
REGULAR_SENTINEL = -99.0  # slope recorded when the floor rule decides


@dataclass(frozen=True)
class WavefrontQuery:
    """Scan configuration for the wave-front estimators."""

    positions: tuple  # grid index vectors
    directions: tuple  # unit vectors
    window: WindowSpec
    aperture: float
    spec: FLNormSpec
    decay_threshold: float = 6.0  # classical T
    octaves: tuple = (3, 6)  # inclusive fit range [m_lo, m_hi]
    rel_floor: float = REL_FLOOR
    classical_rel_floor: float | None = None  # defaults to a deep floor
    margin: float = SLOPE_MARGIN

    def __post_init__(self):
        if not (0 < self.aperture <= np.pi / 2):
            raise ValueError("aperture must lie in (0, pi/2]")
        if self.octaves[0] > self.octaves[1]:
            raise ValueError("octave range is empty")

    def validate(self, grid: TorusGrid):
        if self.window.width >= grid.n:
            raise ValueError("window larger than torus")
        if self.octaves[1] > int(np.log2(grid.n // 2)):
            raise ValueError(
                f"octave {self.octaves[1]} exceeds log2(n/2) for n={grid.n}"
            )


def directions_for(d: int, count: int = 32) -> tuple:
    """Direction bins: ``count`` unit vectors (d=2) or the two signs (d=1)."""
    if d == 1:
        return ((1.0,), (-1.0,))
    if count < 4:
        raise ValueError("need at least 4 direction bins")
    angles = 2.0 * np.pi * np.arange(count) / count
    return tuple((float(np.cos(a)), float(np.sin(a))) for a in angles)


def default_query(grid: TorusGrid, spec: FLNormSpec | None = None,
                  bins: int = 32) -> WavefrontQuery:
    """Desk-scale defaults: Gaussian window, scan positions every n/4.

    Window widths trade position isolation against spectral resolution:
    the spectral mainlobe must stay a fraction of the lowest fit octave
    (or slope fits blur across annuli and steep laws read shallow), while
    scan positions must sit far enough apart that the window tail at a
    neighboring singularity falls below the mass floor.  Widths of n/2
    cells (1-D) and 3n/4 (2-D, where 32 direction bins need the tighter
    mainlobe) against the n/4 stride satisfy both at desk scales.
    """
    n, d = grid.n, grid.d
    if spec is None:
        spec = FLNormSpec(q=1.0, weight=Weight.power(2.75 if d == 1 else 1.0))
    step = max(1, n // 4)
    positions = _position_grid(grid, step)
    if d == 1:
        # the top octave holds only the unpaired -n/2 row; stop below it,
        # and keep at least three octaves in range on small grids
        window = WindowSpec("gauss", max(8, n // 2))
        m_hi = int(np.log2(n // 2)) - 1
        octaves = (max(1, min(4, m_hi - 2)), m_hi)
        rel_floor, classical_floor, threshold = 1e-6, 1e-8, 7.0
    else:
        window = WindowSpec("gauss", max(16, (3 * n) // 4))
        m_hi = int(np.log2(n // 2))
        octaves = (max(1, min(3, m_hi - 2)), m_hi)
        rel_floor, classical_floor, threshold = REL_FLOOR, 1e-6, 6.0
    return WavefrontQuery(
        positions=positions,
        directions=directions_for(d, bins),
        window=window,
        aperture=np.pi / 16 if d > 1 else np.pi / 2,
        spec=spec,
        decay_threshold=threshold,
        octaves=octaves,
        rel_floor=rel_floor,
        classical_rel_floor=classical_floor,
    )


def _position_grid(grid: TorusGrid, step: int) -> tuple:
    axes = [range(0, grid.n, step)] * grid.d
    out = []

    def rec(prefix, rest):
        if not rest:
            out.append(tuple(prefix))
            return
        for v in rest[0]:
            rec(prefix + [v], rest[1:])

    rec([], axes)
    return tuple(out)


# ---------------------------------------------------------------------------
# Annulus statistics and the decay fit
# ---------------------------------------------------------------------------


class _AnnulusIndex:
    """Per-grid cache of octave labels and direction-cone masks."""

    def __init__(self, grid: TorusGrid):
        self.grid = grid
        norms = lattice(grid).norms
        with np.errstate(divide="ignore"):
            octave = np.floor(np.log2(np.where(norms > 0, norms, 1.0)))
        self.octave = np.where(norms > 0, octave, -1).astype(int)
        self._cone_cache: dict = {}

    def cone(self, direction, aperture) -> np.ndarray:
        key = (tuple(direction), float(aperture))
        if key not in self._cone_cache:
            self._cone_cache[key] = cone_mask(
                self.grid, Cone(tuple(direction), aperture)
            )
        return self._cone_cache[key]


_INDEX_CACHE: dict = {}


def _annulus_index(grid: TorusGrid) -> _AnnulusIndex:
    key = (grid.d, grid.n)
    if key not in _INDEX_CACHE:
        _INDEX_CACHE[key] = _AnnulusIndex(grid)
    return _INDEX_CACHE[key]


def annulus_averages(grid: TorusGrid, weighted: np.ndarray, conemask,
                     octaves, q: float) -> np.ndarray:
    """Count-normalized l^q annulus averages; NaN where the annulus is empty."""
    idx = _annulus_index(grid)
    m_lo, m_hi = octaves
    out = np.full(m_hi - m_lo + 1, np.nan)
    mags = np.abs(weighted)
    for m in range(m_lo, m_hi + 1):
        sel = (idx.octave == m) & conemask
        cnt = int(np.count_nonzero(sel))
        if cnt == 0:
            continue
        vals = mags[sel]
        if np.isinf(q):
            out[m - m_lo] = np.max(vals)
        else:
            out[m - m_lo] = (np.sum(vals**q) / cnt) ** (1.0 / q)
    return out


def fit_decay_slope(averages: np.ndarray, usable: np.ndarray, octaves):
    """LSQ slope of log2(average) vs octave over the usable annuli.

    Returns (slope, n_used); (None, 0 or 1) when fewer than two annuli
    carry content.
    """
    m_lo, m_hi = octaves
    ms, logs = [], []
    for i, (a, ok) in enumerate(zip(averages, usable)):
        if not ok or np.isnan(a) or a <= 0:
            continue
        ms.append(m_lo + i)
        logs.append(np.log2(a))
    if not ms:
        return None, 0
    if len(ms) == 1:
        return None, 1
    ms = np.asarray(ms, dtype=float)
    logs = np.asarray(logs)
    mbar = ms.mean()
    slope = float(np.sum((ms - mbar) * (logs - logs.mean()))
                  / np.sum((ms - mbar) ** 2))
    return slope, len(ms)


def _direction_stats(grid, weighted, unweighted, direction, aperture,
                     octaves, q, floor):
    """(averages, slope, n_used, seminorm) for one cone.

    Annulus usability is decided on the unweighted coefficients against
    the floor, so the usable set does not move with the weight order; the
    decay slope is then fitted to the weighted averages over that set.
    """
    idx = _annulus_index(grid)
    mask = idx.cone(direction, aperture)
    raw = annulus_averages(grid, unweighted, mask, octaves, q)
    usable = ~np.isnan(raw) & (raw > floor)
    avgs = annulus_averages(grid, weighted, mask, octaves, q)
    slope, used = fit_decay_slope(avgs, usable, octaves)
    seminorm = sequence_norm(weighted[mask], q)
    return avgs, slope, used, seminorm


def _fl_verdict(slope, used, d, q, margin):
    """Regular/singular from a fitted slope under the summability rule."""
    if used == 0:
        return True, REGULAR_SENTINEL
    if used == 1:
        # isolated spectral blob: band-limited content, no growing tail
        return True, REGULAR_SENTINEL
    dq = 0.0 if np.isinf(q) else d / q
    return slope <= -(dq + margin), slope


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WavefrontRecord:
    x0: tuple
    theta: tuple
    verdict: str  # "regular" | "singular"
    slope: float
    seminorm: float


@dataclass(frozen=True)
class WavefrontReport:
    grid: TorusGrid
    records: tuple
    mode: str = "fl"
    meta: dict = field(default_factory=dict)

    def singular(self) -> list:
        return [r for r in self.records if r.verdict == "singular"]

    def verdict_at(self, x0, theta) -> str:
        x0 = tuple(int(c) for c in np.atleast_1d(x0))
        for r in self.records:
            if r.x0 == x0 and np.allclose(r.theta, theta, atol=1e-9):
                return r.verdict
        raise KeyError(f"no record at {x0}, {theta}")

    def to_json(self) -> str:
        rows = [
            {
                "x0": list(r.x0),
                "theta": list(r.theta),
                "verdict": r.verdict,
                "slope": r.slope,
                "seminorm": r.seminorm,
            }
            for r in self.records
        ]
        return json.dumps({"mode": self.mode, "records": rows},
                          sort_keys=True)

    def write_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x0", "theta", "verdict", "slope", "seminorm"])
            for r in self.records:
                writer.writerow([
                    " ".join(str(c) for c in r.x0),
                    " ".join(f"{t:.6f}" for t in r.theta),
                    r.verdict, f"{r.slope:.6f}", f"{r.seminorm:.8e}",
                ])


def _bin_distance(directions: tuple, t1, t2) -> int:
    """Circular distance between two direction-bin entries."""
    i1 = _nearest_bin(directions, t1)
    i2 = _nearest_bin(directions, t2)
    nb = len(directions)
    return min((i1 - i2) % nb, (i2 - i1) % nb)


def _nearest_bin(directions: tuple, theta) -> int:
    theta = np.asarray(theta, dtype=float)
    dots = [float(np.dot(theta, np.asarray(t))) for t in directions]
    return int(np.argmax(dots))


def report_included_in(left: WavefrontReport, right: WavefrontReport,
                       cell_tol: float = 2.0, bin_tol: int = 1) -> dict:
    """Check singular(left) within (cell_tol, bin_tol) of singular(right).

    Every singular verdict on the left must have a right-side singular
    verdict within cell_tol grid cells (periodic) and bin_tol direction
    bins.  Returns {"holds", "violations"}.
    """
    grid = left.grid
    dirs = tuple(r.theta for r in right.records[: _n_dirs(right)])
    rs = right.singular()
    violations = []
    for r in left.singular():
        ok = False
        for s in rs:
            if grid.cell_distance(r.x0, s.x0) <= cell_tol and \
               _bin_distance(dirs or (r.theta,), r.theta, s.theta) <= bin_tol:
                ok = True
                break
        if not ok:
            violations.append({"x0": list(r.x0), "theta": list(r.theta)})
    return {"holds": not violations, "violations": violations}


def _n_dirs(report: WavefrontReport) -> int:
    seen = []
    for r in report.records:
        if r.theta in seen:
            break
        seen.append(r.theta)
    return len(seen)


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def regular_directions(f: Signal, spec: FLNormSpec, aperture: float,
                       direction_count: int = 32, octaves=None,
                       rel_floor: float = REL_FLOOR,
                       margin: float = SLOPE_MARGIN) -> dict:
    """Partition direction bins of a (pre-windowed) signal into Theta/Sigma.

    The caller is responsible for localizing f first; this routine only
    reads the global spectrum.  Returns {"theta": [...], "sigma": [...],
    "slopes": {direction: slope}}.
    """
    grid = f.grid
    if grid.d > 1 and direction_count < 4:
        raise ValueError("need at least 4 direction bins")
    dirs = directions_for(grid.d, direction_count)
    if octaves is None:
        m_hi = int(np.log2(grid.n // 2))
        octaves = (max(1, m_hi - 3), m_hi)
    coeffs = forward_transform(f).coeffs
    w = spec.weight.on_lattice(grid)
    weighted = coeffs * w
    floor = rel_floor * _nonzero_scale(grid, coeffs)
    theta, sigma, slopes = [], [], {}
    for direction in dirs:
        _, slope, used, _ = _direction_stats(
            grid, weighted, coeffs, direction, aperture, octaves, spec.q,
            floor)
        regular, slope_out = _fl_verdict(slope, used, grid.d, spec.q, margin)
        slopes[direction] = slope_out
        (theta if regular else sigma).append(direction)
    return {"theta": theta, "sigma": sigma, "slopes": slopes}


def _nonzero_scale(grid: TorusGrid, weighted: np.ndarray) -> float:
    nz = lattice(grid).norms > 0
    mags = np.abs(weighted[nz])
    return float(np.max(mags)) if mags.size else 0.0


def _scan(f: Signal, query: WavefrontQuery, classical: bool) -> WavefrontReport:
    grid = f.grid
    query.validate(grid)
    if classical and query.octaves[1] - query.octaves[0] + 1 < 3:
        raise ValueError("classical scan needs at least 3 octaves")
    spec = query.spec
    # global reference scale: the floor must not depend on how much of the
    # signal the window catches, or far-away windows see pure noise
    full = forward_transform(f).coeffs
    w = (np.ones(grid.size) if classical
         else spec.weight.on_lattice(grid))
    scale = _nonzero_scale(grid, full)
    if classical:
        rel = (query.classical_rel_floor
               if query.classical_rel_floor is not None
               else min(query.rel_floor, CLASSICAL_REL_FLOOR))
    else:
        rel = query.rel_floor
    floor = rel * scale
    q = np.inf if classical else spec.q
    records = []
    for x0 in query.positions:
        g = window_signal(f, query.window, x0)
        coeffs = forward_transform(g).coeffs
        weighted = coeffs * w
        for direction in query.directions:
            _, slope, used, semi = _direction_stats(
                grid, weighted, coeffs, direction, query.aperture,
                query.octaves, q, floor)
            if classical:
                if used <= 1:
                    regular, slope_out = True, REGULAR_SENTINEL
                else:
                    regular = -slope >= query.decay_threshold
                    slope_out = slope
            else:
                regular, slope_out = _fl_verdict(
                    slope, used, grid.d, q, query.margin)
            records.append(WavefrontRecord(
                x0=tuple(int(c) for c in np.atleast_1d(x0)),
                theta=tuple(direction),
                verdict="regular" if regular else "singular",
                slope=float(slope_out),
                seminorm=float(semi),
            ))
    return WavefrontReport(
        grid=grid, records=tuple(records),
        mode="classical" if classical else "fl",
        meta={"spec_q": spec.q, "octaves": list(query.octaves)},
    )


def estimate_wavefront(f: Signal, query: WavefrontQuery) -> WavefrontReport:
    """Fourier-Lebesgue wave-front scan over (position, direction) pairs."""
    return _scan(f, query, classical=False)


def classical_wavefront(f: Signal, query: WavefrontQuery) -> WavefrontReport:
    """Rapid-decay (C^infinity) scan: regular iff decay order >= threshold."""
    return _scan(f, query, classical=True)


def superior_scan(f: Signal, query: WavefrontQuery, s_list) -> dict:
    """Largest weight order passing at each (position, direction).

    Two variants per scan point:

    * ``fixed``: one window and one cone serve every order in s_list;
      the pass set is monotone (a down-set) because the fitted slope is
      increasing in s while the threshold stays put.
    * ``adaptive``: each order may shrink the window and the cone; passes
      when any configuration in a dyadic ladder does.  This realizes the
      exists-a-cutoff/exists-a-cone reading, which can pass strictly more
      orders than the fixed variant.
    """
    s_list = list(s_list)
    if not s_list:
        raise ValueError("s_list must be non-empty")
    if any(b > a for a, b in zip(s_list[1:], s_list)):
        raise ValueError("s_list must be ascending")
    grid = f.grid
    query.validate(grid)
    q = query.spec.q
    out = {}
    full = forward_transform(f).coeffs
    floor = query.rel_floor * _nonzero_scale(grid, full)
    ladders = [(1.0, 1.0), (0.5, 1.0), (0.25, 1.0)]
    if grid.d > 1:
        ladders += [(1.0, 0.5), (0.5, 0.5)]
    for x0 in query.positions:
        for direction in query.directions:
            fixed, adaptive = [], []
            for s in s_list:
                w = Weight.power(float(s)).on_lattice(grid)
                ok_fixed = _passes(grid, f, query, x0, direction, w, q,
                                   floor, 1.0, 1.0)
                fixed.append(ok_fixed)
                ok_any = ok_fixed or any(
                    _passes(grid, f, query, x0, direction, w, q, floor,
                            wf, af)
                    for wf, af in ladders[1:]
                )
                adaptive.append(ok_any)
            out[(tuple(int(c) for c in np.atleast_1d(x0)),
                 tuple(direction))] = {
                "s_list": s_list,
                "fixed_pass": fixed,
                "adaptive_pass": adaptive,
                "fixed_max_index": _last_true_prefix(fixed),
                "adaptive_max_index": _last_true_prefix(adaptive),
            }
    return out


def _passes(grid, f, query, x0, direction, w, q, floor, wfactor, afactor):
    window = query.window.narrowed(wfactor) if wfactor != 1.0 else query.window
    g = window_signal(f, window, x0)
    coeffs = forward_transform(g).coeffs
    _, slope, used, _ = _direction_stats(
        grid, coeffs * w, coeffs, direction, query.aperture * afactor,
        query.octaves, q, floor)
    regular, _ = _fl_verdict(slope, used, grid.d, q, query.margin)
    return regular


def _last_true_prefix(flags) -> int:
    idx = -1
    for i, flag in enumerate(flags):
        if not flag:
            break
        idx = i
    return idx


# ---------------------------------------------------------------------------
# Cone-split decomposition
# ---------------------------------------------------------------------------


def split_regular(f: Signal, x0, cone: Cone, spec: FLNormSpec,
                  inner_window: WindowSpec, outer_window: WindowSpec):
    """Split the outer-localized signal into a cone part and a remainder.

    g carries the full spectral mass of outer*f inside the cone (so its
    FL norm is finite by construction) and h = outer*f - g has spectrum
    identically zero on the cone.  The inner window must live where the
    outer one is flat at 1, so that inner*(outer*f) == inner*f.
    """
    from .grid import inverse_transform

    grid = f.grid
    outer_vals = window_values(grid, outer_window, x0)
    inner_vals = window_values(grid, inner_window, x0)
    support = inner_vals > 1e-15
    if np.any(np.abs(outer_vals[support] - 1.0) > 1e-12):
        raise ValueError("inner window must sit where the outer window is 1")
    localized = Signal(grid, f.values * outer_vals)
    coeffs = forward_transform(localized).coeffs
    mask = cone_mask(grid, cone)
    from .grid import Spectrum

    g = inverse_transform(Spectrum(grid, np.where(mask, coeffs, 0.0)))
    h = localized - g
    return g, h
