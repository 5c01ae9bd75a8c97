"""Coefficient inner products in diagonal reproducing kernel Hilbert spaces.

Monomials are orthogonal with ||z^gamma||^2 = 1/c_gamma, so for truncated
series everything reduces to weighted sums over coefficient arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, OrderMismatch
from .kernels import KernelSpec, diagonal_coeffs
from .series import Series, VectorSeries

__all__ = ["inner_product", "norm", "norm_sq", "norm_weights", "normalize"]


def norm_weights(spec: KernelSpec, N: int, dim: int | None = None) -> np.ndarray:
    """Array of 1/c_gamma (squared monomial norms) up to total degree N."""
    if dim is not None and dim != spec.dimension:
        raise DimensionMismatch(f"function of dimension {dim} in a space of dimension {spec.dimension}")
    return diagonal_coeffs(spec, N).norm_weights()


def inner_product(spec: KernelSpec, f, g) -> complex:
    """<f, g> = sum_gamma f_gamma conj(g_gamma) / c_gamma (summed over components)."""
    F = VectorSeries.wrap(f)
    G = VectorSeries.wrap(g)
    if F.dim != G.dim:
        raise DimensionMismatch(f"dimensions {F.dim} and {G.dim}")
    if F.order != G.order:
        raise OrderMismatch(f"orders {F.order} and {G.order}")
    if len(F) != len(G):
        raise DimensionMismatch(f"{len(F)} and {len(G)} components")
    w = norm_weights(spec, F.order, F.dim)
    return complex(sum(np.sum(a.coeffs * np.conj(b.coeffs) * w) for a, b in zip(F, G)))


def norm_sq(spec: KernelSpec, f) -> float:
    F = VectorSeries.wrap(f)
    w = norm_weights(spec, F.order, F.dim)
    return float(sum(np.sum(np.abs(a.coeffs) ** 2 * w) for a in F))


def norm(spec: KernelSpec, f) -> float:
    return float(np.sqrt(norm_sq(spec, f)))


def normalize(spec: KernelSpec, f):
    """f / ||f|| in the space of spec."""
    n = norm(spec, f)
    if isinstance(f, Series):
        return f * (1.0 / n)
    return VectorSeries([c * (1.0 / n) for c in VectorSeries.wrap(f)])
