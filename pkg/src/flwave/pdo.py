"""Discrete symbol calculus and microlocal transport checks.

Symbols a(x, k) act through the standard quantization

    (a(x,D) f)(x_j) = (2 pi)^(-d/2) sum_k a(x_j, k) F(k) e^(i k.x_j)

which reduces to an exact Fourier multiplier when a is x-independent and
to pointwise multiplication when a is frequency-independent.  Symbol
class membership is certified by sampled quotients |a| / <k>^m and first
differences against <k>^(m-1) (table symbols have no closed-form
derivatives).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import Cone, cone_mask
from .grid import Signal, TorusGrid, forward_transform, lattice
from .wavefront import (
    WavefrontQuery,
    default_query,
    estimate_wavefront,
    report_included_in,
)
from .weights import Weight

__all__ = [
    "Symbol",
    "multiplier_symbol",
    "quantize_apply",
    "noncharacteristic_at",
    "char_set_scan",
    "transport_check",
    "parse_symbol",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Symbol:
    """Symbol of order m with an evaluator a(x, k).

    ``evaluator`` maps (points, freqs) arrays of shapes (N, d), (M, d) to
    an (N, M) array.  x-independent symbols may set ``multiplier`` for
    the fast path.
    """

    order: float
    evaluator: object = field(repr=False)
    x_independent: bool = False
    label: str = "symbol"

    def on_lattice(self, grid: TorusGrid) -> np.ndarray:
        """Multiplier values a(k) for x-independent symbols."""
        if not self.x_independent:
            raise ValueError("symbol depends on x; no single multiplier")
        pts = np.zeros((1, grid.d))
        return np.asarray(
            self.evaluator(pts, lattice(grid).points.astype(float))
        ).reshape(-1)

    def table(self, grid: TorusGrid) -> np.ndarray:
        """Dense a(x_j, k) over grid x lattice (guarded by size)."""
        if grid.size > 4096:
            raise ValueError("dense symbol table limited to n^d <= 4096")
        return np.asarray(self.evaluator(
            grid.sample_points(), lattice(grid).points.astype(float)
        )).reshape(grid.size, grid.size)

    def class_certificate(self, grid: TorusGrid, sample: int = 512,
                          seed: int = 0) -> dict:
        """Sampled sup of |a|/<k>^m and first differences vs <k>^(m-1)."""
        rng = np.random.default_rng(seed)
        n, d = grid.n, grid.d
        xs = grid.sample_points()[rng.integers(0, grid.size, size=sample)]
        ks = rng.integers(-n // 2, n // 2 - 1, size=(sample, d)).astype(float)
        br = np.sqrt(1.0 + np.sum(ks**2, axis=-1))
        vals = np.asarray(self.evaluator(xs, ks))
        if vals.ndim == 2:
            vals = np.diagonal(vals)
        sup0 = float(np.max(np.abs(vals) / br**self.order))
        shift = ks.copy()
        shift[:, 0] += 1.0
        vals1 = np.asarray(self.evaluator(xs, shift))
        if vals1.ndim == 2:
            vals1 = np.diagonal(vals1)
        sup1 = float(np.max(np.abs(vals1 - vals) / br ** (self.order - 1)))
        if not (np.isfinite(sup0) and np.isfinite(sup1)):
            raise ValueError("symbol class certificate is not finite")
        return {"zeroth": sup0, "first_difference": sup1}


def multiplier_symbol(order: float, func, label: str = "multiplier") -> Symbol:
    """x-independent symbol from a function of the frequency array."""

    def evaluator(xs, ks):
        vals = np.asarray(func(np.atleast_2d(ks)), dtype=complex)
        return np.broadcast_to(vals, (np.atleast_2d(xs).shape[0], vals.size))

    return Symbol(order=order, evaluator=evaluator, x_independent=True,
                  label=label)


def quantize_apply(a: Symbol, f: Signal) -> Signal:
    """Apply a(x, D) to a signal."""
    grid = f.grid
    coeffs = forward_transform(f).coeffs
    pref = TWO_PI ** (-grid.d / 2.0)
    if a.x_independent:
        from .grid import Spectrum, inverse_transform

        # multiplier path: modify coefficients, invert exactly
        return inverse_transform(Spectrum(grid, coeffs * a.on_lattice(grid)))
    table = a.table(grid)
    pts = grid.sample_points()
    ks = lattice(grid).points.astype(float)
    phases = np.exp(1j * pts @ ks.T)  # e^(i k.x_j), (n^d, n^d)
    return Signal(grid, pref * np.sum(table * phases * coeffs[None, :],
                                      axis=1))


def noncharacteristic_at(a: Symbol, x0, direction, c: float, R: float,
                         aperture: float, spatial_radius: float | None = None,
                         grid: TorusGrid | None = None) -> bool:
    """|a(x, k)| > c |k|^m on the cone beyond radius R, near x0."""
    if grid is None:
        raise ValueError("grid required to sample the lattice")
    if R >= grid.n // 2:
        raise ValueError(f"R = {R} leaves no testable frequencies (n = {grid.n})")
    lat = lattice(grid)
    cone = Cone(tuple(direction), aperture)
    mask = cone_mask(grid, cone) & (lat.norms > R)
    if not np.any(mask):
        raise ValueError("no lattice frequencies in the test cone")
    ks = lat.points[mask].astype(float)
    if spatial_radius is None:
        spatial_radius = grid.n / 16.0
    pts = grid.sample_points()
    x0v = np.atleast_1d(np.asarray(x0, dtype=float)) * grid.h
    delta = (pts - x0v + np.pi) % TWO_PI - np.pi
    near = np.sqrt(np.sum(delta**2, axis=-1)) <= spatial_radius * grid.h
    xs = pts[near]
    vals = np.abs(np.asarray(a.evaluator(xs, ks)))
    bound = c * lat.norms[mask] ** a.order
    return bool(np.all(vals > bound[None, :]))


def char_set_scan(a: Symbol, positions, directions, c: float, R: float,
                  aperture: float, grid: TorusGrid) -> list:
    """(x0, direction) pairs where the symbol fails the lower bound."""
    flagged = []
    for x0 in positions:
        for direction in directions:
            if not noncharacteristic_at(a, x0, direction, c, R, aperture,
                                        grid=grid):
                flagged.append((tuple(int(v) for v in np.atleast_1d(x0)),
                                tuple(direction)))
    return flagged


def transport_check(a: Symbol, f: Signal, q: float, s: float,
                    query: WavefrontQuery | None = None,
                    c: float = 0.1, R: float = 4.0,
                    cell_tol: float = 2.0, bin_tol: int = 1) -> dict:
    """Microlocal transport of wave fronts under the operator.

    Three verdict-level reports: the operator cannot create singularities
    (WF of Af at order s-m inside WF of f at s); at non-characteristic
    scan points, regularity of Af at s-m forces regularity of f at s; and
    the union form WF_s(f) within WF_s(Af) plus the characteristic set.
    """
    from dataclasses import replace

    from .norms import FLNormSpec

    grid = f.grid
    if query is None:
        query = default_query(grid)
    Af = quantize_apply(a, f)
    spec_s = FLNormSpec(q, Weight.power(s))
    spec_sm = FLNormSpec(q, Weight.power(s - a.order))
    rep_f = estimate_wavefront(f, replace(query, spec=spec_s))
    rep_Af = estimate_wavefront(Af, replace(query, spec=spec_sm))
    forward = report_included_in(rep_Af, rep_f, cell_tol, bin_tol)

    char = set(char_set_scan(a, query.positions, query.directions, c, R,
                             query.aperture, grid))
    af_verdicts = {(r.x0, r.theta): r.verdict for r in rep_Af.records}
    lift_violations = []
    union_violations = []
    for rec in rep_f.records:
        key = (rec.x0, rec.theta)
        if key in char:
            continue
        if rec.verdict == "singular" and af_verdicts.get(key) == "regular":
            # tolerate estimator blur: look for singular Af nearby
            near = _has_singular_near(rep_Af, rec, grid, cell_tol, bin_tol,
                                      query.directions)
            if not near:
                lift_violations.append({"x0": list(rec.x0),
                                        "theta": list(rec.theta)})
    rep_Af_s = estimate_wavefront(Af, replace(query, spec=spec_s))
    af_s = {(r.x0, r.theta): r.verdict for r in rep_Af_s.records}
    for rec in rep_f.records:
        key = (rec.x0, rec.theta)
        if rec.verdict != "singular" or key in char:
            continue
        if af_s.get(key) == "regular" and not _has_singular_near(
                rep_Af_s, rec, grid, cell_tol, bin_tol, query.directions):
            union_violations.append({"x0": list(rec.x0),
                                     "theta": list(rec.theta)})
    return {
        "forward_holds": forward["holds"],
        "forward_violations": forward["violations"],
        "lift_holds": not lift_violations,
        "lift_violations": lift_violations,
        "union_holds": not union_violations,
        "union_violations": union_violations,
        "char_points": sorted(char),
    }


def _has_singular_near(report, rec, grid, cell_tol, bin_tol, directions):
    dirs = [np.asarray(t) for t in directions]

    def bin_of(theta):
        return int(np.argmax([float(np.dot(theta, t)) for t in dirs]))

    b0 = bin_of(rec.theta)
    nb = len(dirs)
    for other in report.singular():
        if grid.cell_distance(rec.x0, other.x0) > cell_tol:
            continue
        b1 = bin_of(other.theta)
        if min((b0 - b1) % nb, (b1 - b0) % nb) <= bin_tol:
            return True
    return False


def parse_symbol(text: str, grid: TorusGrid) -> Symbol:
    """CLI symbol syntax: "poly:c0,c1,..." (polynomial in |k|),
    "laplace+1", "dx1", or "table:<path>" (JSON {order, values})."""
    if text == "laplace+1":
        return multiplier_symbol(
            2.0, lambda ks: 1.0 + np.sum(ks**2, axis=-1), "laplace+1")
    if text == "dx1":
        return multiplier_symbol(1.0, lambda ks: ks[:, 0], "dx1")
    if text.startswith("poly:"):
        coeffs = [float(c) for c in text[5:].split(",")]

        def func(ks):
            mag = np.sqrt(np.sum(ks**2, axis=-1))
            out = np.zeros(ks.shape[0], dtype=complex)
            for power, cv in enumerate(coeffs):
                out += cv * mag**power
            return out

        return multiplier_symbol(float(len(coeffs) - 1), func, text)
    if text.startswith("table:"):
        import json

        with open(text[6:]) as fh:
            payload = json.load(fh)
        vals = np.asarray(payload["values"], dtype=complex)
        N = grid.size
        table = vals.reshape(N, N)

        def evaluator(xs, ks, _table=table, _grid=grid):
            # exact-grid x and lattice k only
            lat = lattice(_grid)
            xs = np.atleast_2d(xs)
            cols = [lat.index_of(k.astype(int)) for k in np.atleast_2d(ks)]
            rows = np.empty((xs.shape[0], len(cols)), dtype=complex)
            for i, x_flat in enumerate(xs):
                flat = 0
                for v in x_flat:
                    flat = flat * _grid.n + int(round(v / _grid.h)) % _grid.n
                rows[i] = _table[flat, cols]
            return rows

        return Symbol(order=float(payload.get("order", 0.0)),
                      evaluator=evaluator, label=text)
    raise ValueError(f"cannot parse symbol spec {text!r}")
