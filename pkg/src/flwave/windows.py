"""Compactly supported analysis windows on the torus grid.

Shapes:

* ``gauss``: periodized Gaussian truncated where it falls below 1e-16 of
  its peak, so the support diameter is ``width`` cells (sigma = width/17).
* ``hann``: raised cosine on ``width`` cells.
* ``flattop``: unit plateau of half the width with Gaussian skirts; used
  as the outer cutoff in cone-split constructions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Signal, TorusGrid

__all__ = ["WindowSpec", "window_signal", "window_values"]

GAUSS_TRUNC_SIGMAS = np.sqrt(2.0 * np.log(1e16))  # ~8.58 sigma at 1e-16


@dataclass(frozen=True)
class WindowSpec:
    """Window shape and full support width in grid cells."""

    shape: str = "gauss"
    width: float = 16.0

    def __post_init__(self):
        if self.shape not in ("gauss", "hann", "flattop"):
            raise ValueError(f"unknown window shape {self.shape!r}")
        if self.width < 4:
            raise ValueError(f"window width must be >= 4 cells, got {self.width}")

    def narrowed(self, factor: float) -> "WindowSpec":
        return WindowSpec(self.shape, max(4.0, self.width * factor))


def _cell_distances(grid: TorusGrid, center) -> np.ndarray:
    """Periodic Euclidean distance (in cells) from every sample to center."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    n, d = grid.n, grid.d
    axes = []
    for a in range(d):
        delta = (np.arange(n) - center[a] + n / 2.0) % n - n / 2.0
        axes.append(delta)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.sqrt(sum(m**2 for m in mesh)).ravel()


def window_values(grid: TorusGrid, spec: WindowSpec, center) -> np.ndarray:
    """Window samples over the grid, peak value 1 at the center."""
    if spec.width >= grid.n:
        raise ValueError(
            f"window width {spec.width} does not fit on the torus (n={grid.n})"
        )
    dist = _cell_distances(grid, center)
    half = spec.width / 2.0
    if spec.shape == "gauss":
        sigma = spec.width / (2.0 * GAUSS_TRUNC_SIGMAS)
        vals = np.exp(-(dist**2) / (2.0 * sigma**2))
        vals[dist > half] = 0.0
    elif spec.shape == "hann":
        vals = np.where(dist <= half,
                        np.cos(np.pi * dist / spec.width) ** 2, 0.0)
    else:  # flattop
        plateau = spec.width / 4.0
        sigma = (half - plateau) / GAUSS_TRUNC_SIGMAS
        out = np.clip(dist - plateau, 0.0, None)
        vals = np.exp(-(out**2) / (2.0 * sigma**2))
        vals[dist > half] = 0.0
    return vals


def window_signal(f: Signal, spec: WindowSpec, center) -> Signal:
    """Pointwise product of f with the window centered at a grid index."""
    return Signal(f.grid, f.values * window_values(f.grid, spec, center))
