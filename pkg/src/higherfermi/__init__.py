"""Numerics for resonance dissolving: special functions, theta series, convolution
L-series, scattering models and contour tracking of singular points."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import HigherFermiError  # noqa: E402

__all__ = ["__version__", "HigherFermiError"]
