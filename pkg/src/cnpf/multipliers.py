"""Carleson embeddings, finite-section multiplier norms and invariant spans.

All matrices here live on monomial bases: the orthonormal basis of a
diagonal space H_c is sqrt(c_gamma) z^gamma, so a coefficient vector
weighted by sqrt(1/c_gamma) has Euclidean norm equal to the space norm.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import subspace_angles, svdvals

from .errors import DimensionMismatch
from .kernels import KernelSpec, PointSet, diagonal_coeffs
from .quadrature import DiscMeasure
from .series import VectorSeries, multi_indices
from .spaces import norm_weights

__all__ = [
    "carleson_check",
    "multiplier_norm_lower_bound",
    "diff_op_experiment",
    "invariant_span_compare",
    "sup_re_sarason",
]


def _carleson_grid(n_radial: int, n_angular: int, min_gap: float) -> np.ndarray:
    r = 1.0 - np.logspace(0, math.log10(min_gap), n_radial)
    r[0] = 0.0
    th = 2 * np.pi * np.arange(n_angular) / n_angular
    return (r[:, None] * np.exp(1j * th[None, :])).ravel()


def carleson_check(s_spec: KernelSpec, measure: DiscMeasure, f_degree: int = 60, trials: int = 20,
                   seed: int = 0, n_radial: int = 32, n_angular: int = 32, min_gap: float = 1e-6,
                   batch: int = 256) -> dict:
    """sup_z Re int s_z d mu over a disc grid and the embedding constant of H_s into L^2(mu).

    The constant is the top eigenvalue of the mu-Gram matrix of the
    orthonormal monomials sqrt(c_n) z^n, n <= f_degree; random polynomials
    give the matching lower estimate.
    """
    if s_spec.dimension != 1:
        raise DimensionMismatch("measures live on the disc")
    nodes, wts = measure.nodes()
    Z = _carleson_grid(n_radial, n_angular, min_gap)
    sup = -np.inf
    arg = 0j
    for start in range(0, len(Z), batch):
        z = Z[start:start + batch]
        vals = np.real(s_spec.phi(nodes[None, :] * np.conj(z)[:, None]) @ wts)
        k = int(np.argmax(vals))
        if vals[k] > sup:
            sup, arg = float(vals[k]), complex(z[k])

    c = diagonal_coeffs(s_spec, f_degree).values
    Vm = nodes[:, None] ** np.arange(f_degree + 1)[None, :]
    B = np.sqrt(wts)[:, None] * Vm * np.sqrt(c)[None, :]
    G = B.conj().T @ B
    C = float(np.linalg.eigvalsh(0.5 * (G + G.conj().T))[-1])

    best = 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        x = rng.standard_normal(f_degree + 1) + 1j * rng.standard_normal(f_degree + 1)
        best = max(best, float(np.real(np.vdot(x, G @ x)) / np.real(np.vdot(x, x))))
    return {
        "sup_re": sup,
        "argmax_z": [arg.real, arg.imag],
        "embedding_constant_estimate": C,
        "random_ratio_max": best,
        "f_degree": f_degree,
        "measure": measure.label,
        "total_mass": measure.total_mass(),
    }


def _shift(a: np.ndarray, gamma, L: int) -> np.ndarray:
    """Coefficients of z^gamma * a inside the cube of side L + 1."""
    out = np.zeros((L + 1,) * a.ndim, dtype=complex)
    sl_dst = tuple(slice(g, g + s) for g, s in zip(gamma, a.shape))
    out[sl_dst] = a
    return out


def _product_columns(F: VectorSeries, degree: int, L: int, weights: np.ndarray) -> np.ndarray:
    """Columns: weighted coefficient vectors of z^gamma F for |gamma| <= degree."""
    d = F.dim
    mask = None
    cols = []
    for gamma in multi_indices(d, degree):
        parts = []
        for comp in F:
            a = _shift(comp.coeffs, gamma, L)
            if mask is None:
                mask = np.sum(np.indices(a.shape), axis=0) <= L
            parts.append((a * weights)[mask])
        cols.append(np.concatenate(parts))
    return np.array(cols).T


def multiplier_norm_lower_bound(F, s_spec: KernelSpec, k_spec: KernelSpec, degree: int) -> float:
    """Largest singular value of p -> F p from polynomials of degree <= degree (s-norm) to H_k."""
    F = VectorSeries.wrap(F)
    d = F.dim
    if s_spec.dimension != d or k_spec.dimension != d:
        raise DimensionMismatch("F, s and k must share the dimension")
    L = F.degree() + degree
    F = F.truncate(max(F.degree(), 0))
    wk = np.sqrt(norm_weights(k_spec, L))
    T = _product_columns(F, degree, L, wk)
    cs = diagonal_coeffs(s_spec, degree)
    scale = np.array([math.sqrt(cs[g]) for g in multi_indices(d, degree)])
    return float(svdvals(T * scale[None, :])[0])


def sup_re_sarason(k_spec: KernelSpec, s_spec: KernelSpec, F, n_points: int = 4096, seed: int = 0) -> float:
    """sup of Re V_F over a grid reaching |z| = 1 - 1e-6 (random ball points for d > 1)."""
    from .sarason import sarason_function
    F = VectorSeries.wrap(F)
    V = sarason_function(k_spec, s_spec, F).v
    if F.dim == 1:
        side = int(math.sqrt(n_points))
        Z = _carleson_grid(side, side, 1e-6)
    else:
        rng = np.random.default_rng([seed, 0])
        Z = PointSet.random(n_points, F.dim, 1.0 - 1e-6, rng=rng).points
    return float(np.max(np.real(V.eval(Z))))


def diff_op_experiment(cases, degrees=(5, 10, 20, 40)) -> list:
    """Rows (label, sup Re V_F, lower bounds on the multiplier norm per degree).

    `cases` is an iterable of (label, k_spec, s_spec, F).
    """
    rows = []
    for label, k_spec, s_spec, F in cases:
        bounds = [multiplier_norm_lower_bound(F, s_spec, k_spec, D) for D in degrees]
        rows.append({
            "label": label,
            "sup_re_v": sup_re_sarason(k_spec, s_spec, F),
            "degrees": list(degrees),
            "lower_bounds": bounds,
        })
    return rows


def invariant_span_compare(k_spec: KernelSpec, F, Phi, degree: int, test_degree: int = 2) -> dict:
    """Containment angles between the multiplier-invariant spans of F and Phi.

    forward: largest angle from span{z^g F : |g| <= test_degree} to
    span{z^b Phi : |b| <= degree}; backward swaps the roles.  Both tend to 0
    as degree grows exactly when [F] and [Phi] coincide.
    """
    F = VectorSeries.wrap(F)
    Phi = VectorSeries.wrap(Phi)
    if len(F) != len(Phi) or F.dim != Phi.dim:
        raise DimensionMismatch("F and Phi must take values in the same space")
    L = max(F.order, Phi.order) + degree
    F = VectorSeries([c.pad(max(F.order, Phi.order)) for c in F])
    Phi = VectorSeries([c.pad(max(F.order, Phi.order)) for c in Phi])
    w = np.sqrt(norm_weights(k_spec, L))
    small_F = _product_columns(F, test_degree, L, w)
    big_F = _product_columns(F, degree, L, w)
    small_P = _product_columns(Phi, test_degree, L, w)
    big_P = _product_columns(Phi, degree, L, w)
    fwd = float(np.max(subspace_angles(small_F, big_P)))
    bwd = float(np.max(subspace_angles(small_P, big_F)))
    return {"degree": degree, "test_degree": test_degree, "forward": fwd, "backward": bwd,
            "angle": max(fwd, bwd)}
