"""Numerical toolkit for weighted Fourier-Lebesgue analysis on the torus.

Computes weighted Fourier-Lebesgue, mixed-norm, and modulation-space
quantities for sampled periodic signals, estimates wave-front sets by
windowed spectral cone analysis, and certifies the associated norm
inequalities and inclusion statements on a synthetic oracle corpus.
"""

__version__ = "0.1.0"

from .grid import (
    Signal,
    Spectrum,
    TorusGrid,
    cyclic_convolve,
    forward_transform,
    inverse_transform,
    lp_norm,
)
from .norms import FLNormSpec, KernelGrid, cone_seminorm, fl_norm, mixed_norm
from .weights import Weight

__all__ = [
    "TorusGrid",
    "Signal",
    "Spectrum",
    "forward_transform",
    "inverse_transform",
    "cyclic_convolve",
    "lp_norm",
    "Weight",
    "FLNormSpec",
    "KernelGrid",
    "fl_norm",
    "cone_seminorm",
    "mixed_norm",
    "__version__",
]
