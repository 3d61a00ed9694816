"""Norm-bound certification and wave-front inclusions for products
and convolutions.

The l^1-regime bounds are exact lattice theorems (discrete Young and
Hoelder carry constant one), so those checks certify hard inequalities.
The critical-index product bounds have non-constructive constants; they
are reported together with an n-doubling stability diagnostic.  The
wave-front checks compare singular verdict sets at the stated scales,
with the blur tolerance of the windowed estimator.
"""

from __future__ import annotations

import numpy as np

from .bilinear import conjugate_exponent
from .grid import Signal, TorusGrid, cyclic_convolve, forward_transform, lattice
from .norms import FLNormSpec, fl_norm
from .wavefront import (
    WavefrontQuery,
    default_query,
    estimate_wavefront,
    report_included_in,
)
from .weights import Weight

__all__ = [
    "moderation_constant",
    "product_norm_check",
    "convolve_norm_check",
    "product_critical_norm_check",
    "algebra_check",
    "wf_convolution_check",
    "wf_product_check",
    "wf_derivative_check",
]

TWO_PI = 2.0 * np.pi


def moderation_constant(grid: TorusGrid, w: Weight, w1: Weight, w2: Weight,
                        wrapped: bool) -> float:
    """Scan of max w(k+l) / (w1(k) w2(l)) over all lattice pairs.

    With ``wrapped`` the sum k+l is reduced onto the centered lattice,
    matching the spectral convolution of the pointwise product; plain
    sums match the convolution bound (same-argument weights).
    """
    lat = lattice(grid)
    pts = lat.points
    if wrapped:
        n = grid.n
        sums = (pts[:, None, :] + pts[None, :, :] + n // 2) % n - n // 2
    else:
        sums = pts[:, None, :] + pts[None, :, :]
    num = w.evaluate_points(sums.reshape(-1, grid.d)).reshape(len(pts), -1)
    den = w1.evaluate_points(pts)[:, None] * w2.evaluate_points(pts)[None, :]
    return float(np.max(num / den))


def _young_product_ok(q, q1, q2) -> bool:
    return 1.0 / q1 + 1.0 / q2 >= 1.0 + 1.0 / q - 1e-12


def product_norm_check(f1: Signal, f2: Signal, q, q1, q2,
                       w: Weight, w1: Weight, w2: Weight) -> dict:
    """Ratio of the product's weighted norm to the factor-norm product.

    Requires the Young-type exponent relation with slack and the weight
    moderation w(k+l) <= C w1(k) w2(l) (scanned with wrap, matching the
    spectral convolution).  In the exact-exponent l^1 regime with C = 1
    the ratio is a lattice theorem: it cannot exceed (2 pi)^(-d/2).
    """
    if not _young_product_ok(q, q1, q2):
        raise ValueError("exponents must satisfy 1/q1 + 1/q2 >= 1 + 1/q")
    grid = f1.grid
    c_scan = moderation_constant(grid, w, w1, w2, wrapped=True)
    lhs = fl_norm(f1 * f2, FLNormSpec(q, w))
    n1 = fl_norm(f1, FLNormSpec(q1, w1))
    n2 = fl_norm(f2, FLNormSpec(q2, w2))
    denom = n1 * n2
    ratio = lhs / denom if denom > 0 else 0.0
    return {
        "ratio": ratio,
        "C_scan": c_scan,
        "lhs": lhs,
        "factor_norms": (n1, n2),
        "exact_regime": q == 1 and q1 == 1 and q2 == 1 and c_scan <= 1 + 1e-12,
    }


def convolve_norm_check(f1: Signal, f2: Signal, q, q1, q2,
                        w: Weight, w1: Weight, w2: Weight) -> dict:
    """Normalized convolution bound ratio; certified <= 1 on the lattice.

    Preconditions: 1/q1 + 1/q2 = 1/q and w <= C w1 w2 pointwise (same
    argument).  Discrete Hoelder then bounds the normalized ratio by one.
    """
    inv = (0.0 if np.isinf(q1) else 1.0 / q1) + \
          (0.0 if np.isinf(q2) else 1.0 / q2)
    target = 0.0 if np.isinf(q) else 1.0 / q
    if abs(inv - target) > 1e-12:
        raise ValueError("exponents must satisfy 1/q1 + 1/q2 = 1/q")
    grid = f1.grid
    lat = lattice(grid)
    ratios = w.evaluate_points(lat.points) / (
        w1.evaluate_points(lat.points) * w2.evaluate_points(lat.points))
    c_scan = float(np.max(ratios))
    lhs = fl_norm(cyclic_convolve(f1, f2), FLNormSpec(q, w))
    n1 = fl_norm(f1, FLNormSpec(q1, w1))
    n2 = fl_norm(f2, FLNormSpec(q2, w2))
    denom = (TWO_PI ** (grid.d / 2.0)) * c_scan * n1 * n2
    return {
        "ratio": lhs / denom if denom > 0 else 0.0,
        "C_scan": c_scan,
        "lhs": lhs,
        "factor_norms": (n1, n2),
    }


def product_critical_norm_check(f1: Signal, f2: Signal, q, s1, s2, r,
                                s=None) -> dict:
    """Critical-index product bound ratio with hypothesis echo.

    Defaults s to the critical value s1 + s2 - min(d/q, d/q'); the
    constant is non-constructive, so only the ratio is reported (pair
    with an n-doubling run for the stability diagnostic).
    """
    d = f1.grid.d
    qp = conjugate_exponent(q)
    dq = 0.0 if np.isinf(q) else d / q
    dqp = 0.0 if np.isinf(qp) else d / qp
    if s is None:
        s = min(s1, s2, s1 + s2 - dqp)
    if q > 2 and r <= d * (1 - 2.0 / q):
        raise ValueError("needs r > d(1 - 2/q) when q > 2")
    if q <= 2 and r != 0:
        raise ValueError("needs r = 0 when q <= 2")
    if s1 + s2 < 0:
        raise ValueError("needs s1 + s2 >= 0")
    if s > min(s1, s2) + 1e-12:
        raise ValueError("needs s <= min(s1, s2)")
    if s > s1 + s2 - dqp + 1e-12:
        raise ValueError("needs s <= s1 + s2 - d/q'")
    lhs = fl_norm(f1 * f2, FLNormSpec(q, Weight.power(s)))
    n1 = fl_norm(f1, FLNormSpec(q, Weight.power(s1)))
    n2 = fl_norm(f2, FLNormSpec(q, Weight.power(s2 + r)))
    denom = n1 * n2
    return {
        "ratio": lhs / denom if denom > 0 else 0.0,
        "s": s,
        "hypotheses": {"q": q, "s1": s1, "s2": s2, "r": r},
    }


def algebra_check(fs: list, g: Signal, q, q0, s) -> dict:
    """Iterated-product module bound with the per-factor constant.

    Needs q0 <= q and the order condition s >= d/q' (1 <= q < 2) or
    s > d(3/q' - 1) (q >= 2).  Reports ratio and C = ratio^(1/(N+1)).
    """
    d = g.grid.d
    qp = conjugate_exponent(q)
    dqp = 0.0 if np.isinf(qp) else d / qp
    if q0 > q:
        raise ValueError("needs q0 <= q")
    if q < 2 and s < dqp - 1e-12:
        raise ValueError("needs s >= d/q' for 1 <= q < 2")
    if q >= 2 and s <= d * (3.0 / qp - 1.0) + 1e-12:
        raise ValueError("needs s > d(3/q' - 1) for q >= 2")
    prod = g
    for f in fs:
        prod = prod * f
    w = Weight.power(s)
    lhs = fl_norm(prod, FLNormSpec(q, w))
    denom = fl_norm(g, FLNormSpec(q0, w))
    for f in fs:
        denom *= fl_norm(f, FLNormSpec(q, w))
    N = len(fs)
    ratio = lhs / denom if denom > 0 else 0.0
    return {
        "ratio": ratio,
        "per_factor_constant": ratio ** (1.0 / (N + 1)) if ratio > 0 else 0.0,
        "N": N,
    }


# ---------------------------------------------------------------------------
# Wave-front inclusion checks
# ---------------------------------------------------------------------------


def numerical_support(f: Signal, rel: float = 1e-8) -> list:
    """Grid indices where |f| exceeds rel * max|f|."""
    mags = np.abs(f.values)
    cut = rel * np.max(mags)
    idx = np.nonzero(mags > cut)[0]
    n, d = f.grid.n, f.grid.d
    cells = []
    for flat in idx:
        cell = []
        rem = int(flat)
        for _ in range(d):
            cell.append(rem % n)
            rem //= n
        cells.append(tuple(reversed(cell)))
    return cells


def wf_convolution_check(f1: Signal, f2: Signal,
                         query: WavefrontQuery | None = None,
                         cell_tol: float = 2.0, bin_tol: int = 1) -> dict:
    """Estimated WF(f1*f2) against supp(f1) + WF(f2), within tolerance."""
    grid = f1.grid
    if query is None:
        query = default_query(grid)
    conv = cyclic_convolve(f1, f2)
    left = estimate_wavefront(conv, query)
    right = estimate_wavefront(f2, query)
    supp = numerical_support(f1)
    rs = right.singular()
    violations = []
    for rec in left.singular():
        ok = False
        for s in rs:
            if _bin_dist(query.directions, rec.theta, s.theta) > bin_tol:
                continue
            for x in supp:
                shifted = tuple((xi + yi) % grid.n
                                for xi, yi in zip(x, s.x0))
                if grid.cell_distance(rec.x0, shifted) <= cell_tol:
                    ok = True
                    break
            if ok:
                break
        if not ok:
            violations.append({"x0": list(rec.x0), "theta": list(rec.theta)})
    return {"holds": not violations, "violations": violations,
            "left_singular": len(left.singular()),
            "right_singular": len(rs)}


def _bin_dist(directions, t1, t2) -> int:
    dirs = [np.asarray(t) for t in directions]
    i1 = int(np.argmax([float(np.dot(t1, t)) for t in dirs]))
    i2 = int(np.argmax([float(np.dot(t2, t)) for t in dirs]))
    nb = len(dirs)
    return min((i1 - i2) % nb, (i2 - i1) % nb)


def _scan_at_order(f: Signal, query: WavefrontQuery, q, s) -> object:
    from dataclasses import replace

    spec = FLNormSpec(q, Weight.power(float(s)))
    return estimate_wavefront(f, replace(query, spec=spec))


def wf_product_check(f1: Signal, f2: Signal, mode: str, q, s1, s2,
                     r: float = 0.0, s: float | None = None,
                     N1: float | None = None, N2: float | None = None,
                     query: WavefrontQuery | None = None,
                     cell_tol: float = 2.0, bin_tol: int = 1) -> dict:
    """Verdict-level product wave-front inclusions at the stated scales.

    Modes "dominant" and "dominant_low" bound the product (at scale s2,
    or at a lower scale s) by the first factor at scale |s2| under the
    two exponent-condition variants; mode "union_critical" bounds the
    product at the critical scale by the union of both factors at scales
    N1, N2 (defaulting to the minimal admissible values).
    """
    grid = f1.grid
    d = grid.d
    qp = conjugate_exponent(q)
    dqp = 0.0 if np.isinf(qp) else d / qp
    dq = 0.0 if np.isinf(q) else d / q
    if query is None:
        query = default_query(grid)
    hypotheses = {"mode": mode, "q": q, "s1": s1, "s2": s2, "r": r}
    product = f1 * f2
    if mode == "dominant":
        need = 0.0 if q == 1 else dqp
        if s1 - abs(s2) < need - 1e-12:
            raise ValueError("needs s1 - |s2| >= d/q' (or >= 0 at q = 1)")
        left = _scan_at_order(product, query, q, s2)
        right = _scan_at_order(f1, query, q, abs(s2))
        result = report_included_in(left, right, cell_tol, bin_tol)
    elif mode == "dominant_low":
        if s is None:
            raise ValueError("case 2 needs the target order s")
        if s < 0:
            raise ValueError("needs s >= 0")
        bound = s1 + s2 if q == 1 else s1 + s2 - dqp
        strict = 0 if q == 1 else 1e-12
        if not (bound >= s + strict):
            raise ValueError("needs s1 + s2 - d/q' > s (>= at q = 1)")
        if s2 - s < dqp - 1e-12:
            raise ValueError("needs s2 - s >= d/q'")
        hypotheses["s"] = s
        left = _scan_at_order(product, query, q, s)
        right = _scan_at_order(f1, query, q, abs(s2))
        result = report_included_in(left, right, cell_tol, bin_tol)
    elif mode == "union_critical":
        if s1 + s2 <= 0:
            raise ValueError("needs s1 + s2 > 0")
        if q > 2 and r <= d * (1 - 2.0 / q):
            raise ValueError("needs r > d(1 - 2/q) when q > 2")
        crit = s1 + s2 - min(dq, dqp)
        margin = d * max(0.0, 1 - 2.0 / q)
        if N1 is None:
            N1 = s1 + abs(s2) + margin + (0.0 if np.isinf(q) else 1e-9)
        if N2 is None:
            N2 = s2 + abs(s1) + margin + (0.0 if np.isinf(q) else 1e-9)
        hypotheses.update({"s": crit, "N1": N1, "N2": N2})
        left = _scan_at_order(product, query, q, crit)
        r1 = _scan_at_order(f1, query, q, N1)
        r2 = _scan_at_order(f2, query, q, N2)
        merged = _merge_reports(r1, r2)
        result = report_included_in(left, merged, cell_tol, bin_tol)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return {"holds": result["holds"], "violations": result["violations"],
            "hypotheses": hypotheses}


def _merge_reports(r1, r2):
    """Union of singular verdicts: singular wherever either report is."""
    from .wavefront import WavefrontReport

    merged = []
    by_key = {(rec.x0, rec.theta): rec for rec in r2.records}
    for rec in r1.records:
        other = by_key.get((rec.x0, rec.theta))
        if other is not None and other.verdict == "singular":
            merged.append(other)
        else:
            merged.append(rec)
    return WavefrontReport(grid=r1.grid, records=tuple(merged), mode=r1.mode)


def wf_derivative_check(f: Signal, axis: int, q, s,
                        query: WavefrontQuery | None = None,
                        cell_tol: float = 2.0, bin_tol: int = 1) -> dict:
    """Differentiation moves the wave front down one weight order.

    Checks WF at order s of the spectral derivative against WF at order
    s + 1 of the signal (one derivative costs exactly one bracket power).
    """
    grid = f.grid
    if query is None:
        query = default_query(grid)
    coeffs = forward_transform(f).coeffs
    k_axis = lattice(grid).points[:, axis].astype(float)
    from .grid import Spectrum, inverse_transform

    df = inverse_transform(Spectrum(grid, coeffs * 1j * k_axis))
    left = _scan_at_order(df, query, q, s)
    right = _scan_at_order(f, query, q, s + 1.0)
    result = report_included_in(left, right, cell_tol, bin_tol)
    return {"holds": result["holds"], "violations": result["violations"]}
