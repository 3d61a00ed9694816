"""Kernel-weighted bilinear convolution on the frequency lattice.

T_F(f, g)(k) = sum_l F(k, l) f(l) g(k - l), with k - l wrapped onto the
centered lattice.  On the finite lattice the mixed-norm bounds for this
map hold with constant one (the Hoelder/Minkowski steps are exact), so
the bound checks below certify hard inequalities; only the weighted
variant carries a non-constructive constant, which is reported with an
n-stability diagnostic instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cones import RegionMask
from .grid import TorusGrid, lattice
from .norms import KernelGrid, mixed_norm, sequence_norm
from .rng import random_coeffs, random_kernel, trial_rng
from .weights import Weight

__all__ = [
    "PowerKernelSpec",
    "power_kernel",
    "apply_tf",
    "tf_dual_pair",
    "verify_tf_bound",
    "kernel_slice_norms",
    "tail_slice_norms",
]


@dataclass(frozen=True)
class PowerKernelSpec:
    """Exponents of the power kernel <k>^t0 <k-l>^t1 <l>^t2."""

    t0: float
    t1: float
    t2: float


def power_kernel(grid: TorusGrid, spec: PowerKernelSpec) -> KernelGrid:
    """Dense power kernel over lattice pairs (plain differences)."""
    lat = lattice(grid)
    pts = lat.points.astype(float)
    k_br = lat.brackets[:, None]
    l_br = lat.brackets[None, :]
    diff = pts[:, None, :] - pts[None, :, :]
    kl_br = np.sqrt(1.0 + np.sum(diff**2, axis=-1))
    vals = k_br**spec.t0 * kl_br**spec.t1 * l_br**spec.t2
    return KernelGrid(grid, vals)


def _wrap_index_table(grid: TorusGrid) -> np.ndarray:
    """Flat index of wrap(k - l) for all lattice pairs, cached per grid."""
    key = (grid.d, grid.n)
    if key not in _WRAP_CACHE:
        lat = lattice(grid)
        n = grid.n
        diff = lat.points[:, None, :] - lat.points[None, :, :]
        wrapped = (diff + n // 2) % n - n // 2
        idx = np.zeros(wrapped.shape[:2], dtype=np.int64)
        for a in range(grid.d):
            idx = idx * n + (wrapped[..., a] + n // 2)
        _WRAP_CACHE[key] = idx
    return _WRAP_CACHE[key]


_WRAP_CACHE: dict = {}


def apply_tf(F: KernelGrid, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """T_F(f, g)(k) = sum_l F(k, l) f(l) g(k - l), periodic in k - l."""
    grid = F.grid
    f = np.asarray(f, dtype=complex).ravel()
    g = np.asarray(g, dtype=complex).ravel()
    if f.size != grid.size or g.size != grid.size:
        raise ValueError("lattice size mismatch between kernel and arrays")
    gmat = g[_wrap_index_table(grid)]  # g(k - l) over pairs
    return (F.values * gmat) @ f


def tf_dual_pair(F: KernelGrid, f, g, h) -> tuple:
    """Both sides of the transpose identity for T_F.

    lhs = <T_F(f,g), h>; rhs = <T_G(h, g~), f> with G the transposed
    kernel and g~ the reflection of g.  Equal on the lattice (finite
    rearrangement), up to rounding.
    """
    grid = F.grid
    f = np.asarray(f, dtype=complex).ravel()
    g = np.asarray(g, dtype=complex).ravel()
    h = np.asarray(h, dtype=complex).ravel()
    lhs = np.sum(apply_tf(F, f, g) * h)
    G = KernelGrid(grid, F.values.T)
    gcheck = _reflect(grid, g)
    rhs = np.sum(apply_tf(G, h, gcheck) * f)
    return complex(lhs), complex(rhs)


def _reflect(grid: TorusGrid, g: np.ndarray) -> np.ndarray:
    """g(-k) with -n/2 wrapping to itself."""
    lat = lattice(grid)
    n = grid.n
    neg = (-lat.points + n // 2) % n - n // 2
    idx = np.zeros(neg.shape[0], dtype=np.int64)
    for a in range(grid.d):
        idx = idx * n + (neg[:, a] + n // 2)
    return g[idx]


def verify_tf_bound(case: int, q: float, r: float = 0.0, trials: int = 200,
                    seed: int = 0, n: int = 16, d: int = 1) -> dict:
    """Randomized certification of the three mixed-norm bounds for T_F.

    Cases 1 and 3 are exact lattice inequalities (ratio <= 1); case 2
    carries a non-constructive constant and reports the empirical maximum
    instead.  Adversarial one-hot and heavy-tail instances are mixed in to
    exercise the equality cases.
    """
    grid = TorusGrid(d, n)
    if case == 2:
        if q <= 2:
            raise ValueError("case 2 requires q > 2")
        if r <= d * (1 - 2.0 / q):
            raise ValueError(f"case 2 requires r > d(1-2/q) = {d*(1-2.0/q)}")
    if case == 3 and q > 2:
        raise ValueError("case 3 requires q <= 2")
    qp = conjugate_exponent(q)
    weight_r = Weight.power(r).on_lattice(grid) if case == 2 else None
    max_ratio = 0.0
    worst = None
    structured = _structured_instances(grid, case, q, r) if case == 2 else []
    for t in range(trials):
        if t < len(structured):
            F, f, g = structured[t]
        else:
            rng = trial_rng(seed, t)
            F = random_kernel(grid, rng)
            f = random_coeffs(grid, rng)
            g = random_coeffs(grid, rng)
        out_norm = sequence_norm(apply_tf(F, f, g), q)
        fn = sequence_norm(f, q)
        if case == 1:
            kn = mixed_norm(F, np.inf, qp, order=2)
            gn = sequence_norm(g, q)
        elif case == 2:
            kn = mixed_norm(F, q, np.inf, order=1)
            gn = sequence_norm(g * weight_r, q)
        else:
            kn = mixed_norm(F, qp, np.inf, order=1)
            gn = sequence_norm(g, q)
        denom = kn * fn * gn
        if denom == 0:
            continue
        ratio = out_norm / denom
        if ratio > max_ratio:
            max_ratio = ratio
            worst = t
    return {
        "case": case,
        "q": q,
        "r": r,
        "trials": trials,
        "n": n,
        "d": d,
        "max_ratio": float(max_ratio),
        "worst_seed": worst,
        "exact": case in (1, 3),
    }


def conjugate_exponent(q: float) -> float:
    if q == 1:
        return np.inf
    if np.isinf(q):
        return 1.0
    return q / (q - 1.0)


def _structured_instances(grid: TorusGrid, case: int, q: float,
                          r: float) -> list:
    """Near-extremal instances that pin the weighted bound's constant.

    A one-hot second argument with a concentrated kernel column turns the
    ratio into |g(0)| over the weighted norm of g; the Hoelder-extremal
    profile g = <k>^(-r(1 + q0/q)) with q0 = q/(q-2) then realizes the
    constant up to lattice truncation, making the reported maximum stable
    as the lattice grows.
    """
    lat = lattice(grid)
    N = grid.size
    origin = lat.index_of((0,) * grid.d)
    q0 = q / (q - 2.0)
    out = []
    for exponent in (r * (1.0 + q0 / q), r, 2.0 * r):
        g = lat.brackets ** (-exponent) + 0j
        f = np.zeros(N, dtype=complex)
        f[origin] = 1.0
        column = np.zeros((N, N), dtype=complex)
        column[origin, origin] = 1.0
        out.append((KernelGrid(grid, column), f, g))
    return out


# ---------------------------------------------------------------------------
# Slice-norm certification for the power kernel
# ---------------------------------------------------------------------------


def _log_branch(t: float, target: float) -> str:
    if abs(t - target) < 1e-12:
        return "log"
    return "above" if t > target else "below"


def _slice_bound_regions12(spec, p, brackets, region):
    """Bound formula per slice <k> for regions 1 and 2 (eta sums)."""
    dp = 1.0 / p if not np.isinf(p) else 0.0  # d/p with d = 1
    t_in = spec.t2 if region == 1 else spec.t1
    t_out = spec.t2 if region == 2 else spec.t1
    base = brackets ** (spec.t0 + t_out)
    branch = _log_branch(t_in, -dp)
    if branch == "log":
        return base * (1.0 + np.log(brackets)) ** dp, branch
    return base * (1.0 + brackets ** (t_in + dp)), branch


def _slice_bound_regions345(spec, p, brackets, region):
    """Bound formula per slice <l> for regions 3, 4, 5 (xi sums)."""
    dp = 1.0 / p if not np.isinf(p) else 0.0
    if region == 3:
        return brackets ** (spec.t1 + spec.t2), "bounded"
    branch = _log_branch(spec.t0, -dp)
    if branch == "log":
        return (brackets ** (spec.t1 + spec.t2)
                * (1.0 + np.log(brackets)) ** dp), branch
    if branch == "above":
        return brackets ** (spec.t0 + spec.t1 + spec.t2 + dp), branch
    return brackets ** (spec.t1 + spec.t2), branch


def kernel_slice_norms(spec: PowerKernelSpec, regions: RegionMask,
                       p: float) -> dict:
    """Per-region slice norms of the power kernel with fitted constants.

    Regions 1-2 take the l^p norm over the second variable for each first
    slice; regions 3-5 take it over the first variable for each second
    slice.  For each region the smallest constant C with every computed
    value <= C * bound is fitted; residuals are computed v - C*bound <= 0.
    """
    if p < 1:
        raise ValueError("slice norm exponent must be >= 1")
    grid = regions.grid
    F = power_kernel(grid, spec)
    brackets = lattice(grid).brackets
    out = {}
    for j, mask in enumerate(regions.masks, start=1):
        vals = np.abs(F.values) * mask
        if j in (1, 2):
            slices = _p_norm_axis(vals, p, axis=1)
            bound, branch = _slice_bound_regions12(spec, p, brackets, j)
        else:
            slices = _p_norm_axis(vals, p, axis=0)
            bound, branch = _slice_bound_regions345(spec, p, brackets, j)
        nz = slices > 0
        if not np.any(nz):
            out[j] = {"C": 0.0, "branch": branch, "max_residual": 0.0,
                      "slices": 0}
            continue
        ratios = slices[nz] / bound[nz]
        C = float(np.max(ratios))
        residual = slices[nz] - C * bound[nz]
        out[j] = {
            "C": C,
            "branch": branch,
            "max_residual": float(np.max(residual)),
            "slices": int(np.count_nonzero(nz)),
        }
    return out


def tail_slice_norms(grid: TorusGrid, spec: PowerKernelSpec, c: float,
                     R: float, p: float) -> dict:
    """Slice norms over the separated tail region with its two branches.

    The region keeps pairs with |l - k| >= c|k| and both brackets >= R;
    admissible exponents satisfy t1 + t2 < -d/p (p < infinity) or
    t1 + t2 <= 0 (p = infinity).
    """
    if p < 1:
        raise ValueError("slice norm exponent must be >= 1")
    d = grid.d
    dp = d / p if not np.isinf(p) else 0.0
    if np.isinf(p):
        if spec.t1 + spec.t2 > 0:
            raise ValueError("needs t1 + t2 <= 0 at p = infinity")
    elif spec.t1 + spec.t2 >= -dp:
        raise ValueError(f"needs t1 + t2 < -d/p = {-dp}")
    lat = lattice(grid)
    pts = lat.points.astype(float)
    k_abs = lat.norms[:, None]
    k_br = lat.brackets[:, None]
    l_br = lat.brackets[None, :]
    diff = pts[None, :, :] - pts[:, None, :]  # l - k
    sep = np.sqrt(np.sum(diff**2, axis=-1)) >= c * k_abs
    mask = sep & (k_br >= R) & (l_br >= R)
    F = power_kernel(grid, spec)
    vals = np.abs(F.values) * mask
    slices = _p_norm_axis(vals, p, axis=1)
    brackets = lat.brackets
    if spec.t2 >= -dp:
        bound = brackets**spec.t0
        branch = "t2 >= -d/p"
    else:
        bound = brackets**spec.t0 * (1.0 + brackets**spec.t1)
        branch = "t2 < -d/p"
    nz = slices > 0
    if not np.any(nz):
        return {"C": 0.0, "branch": branch, "max_residual": 0.0, "slices": 0}
    ratios = slices[nz] / bound[nz]
    C = float(np.max(ratios))
    return {
        "C": C,
        "branch": branch,
        "max_residual": float(np.max(slices[nz] - C * bound[nz])),
        "slices": int(np.count_nonzero(nz)),
    }


def _p_norm_axis(vals: np.ndarray, p: float, axis: int) -> np.ndarray:
    if np.isinf(p):
        return np.max(vals, axis=axis)
    return np.sum(vals**p, axis=axis) ** (1.0 / p)
