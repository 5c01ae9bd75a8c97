"""Finite-section positivity certificates.

A pass verdict only means "not refuted on this section": positivity of a
kernel on finitely many points is a necessary condition.  A fail verdict is
a rigorous refutation up to the eigensolver's backward error.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import linalg

from .errors import DegenerateConstraint, KernelDivisionByZero, NotHermitian
from .kernels import (
    KernelSpec,
    PointSet,
    cnp_row_function,
    diagonal_coeffs,
    gram_matrix,
    kernel_matrix,
)
from .series import Series, VectorSeries, multi_indices

__all__ = [
    "PsdReport",
    "psd_check",
    "quotient_kernel_psd",
    "multiplier_norm_cert",
    "projection_identity_check",
    "invariant_subspace_kernel",
]

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class PsdReport:
    dimension: int
    min_eigenvalue: float
    trace: float
    tolerance: float
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return asdict(self)


def psd_check(M, tol: float = DEFAULT_TOL) -> PsdReport:
    """Verdict pass iff lambda_min >= -tol * max(1, trace)."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotHermitian(f"matrix of shape {M.shape} is not square")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if np.max(np.abs(M - M.conj().T), initial=0.0) > 1e-12 * scale:
        raise NotHermitian("matrix is not Hermitian within 1e-12")
    H = 0.5 * (M + M.conj().T)
    lam = linalg.eigvalsh(H)
    tr = float(np.real(np.trace(H)))
    lmin = float(lam[0])
    ok = lmin >= -tol * max(1.0, tr)
    return PsdReport(int(M.shape[0]), lmin, tr, float(tol), "pass" if ok else "fail")


def quotient_kernel_psd(k_spec: KernelSpec, s_spec: KernelSpec, pts: PointSet,
                        tol: float = DEFAULT_TOL) -> PsdReport:
    """Finite section of k/s."""
    K = gram_matrix(k_spec, pts)
    S = gram_matrix(s_spec, pts)
    if np.any(S == 0):
        raise KernelDivisionByZero("s vanishes at a point pair")
    Q = K / S
    return psd_check(0.5 * (Q + Q.conj().T), tol)


def multiplier_norm_cert(phi, s_spec: KernelSpec, k_spec: KernelSpec, pts: PointSet,
                         A: float, tol: float = DEFAULT_TOL) -> PsdReport:
    """Section of A^2 k(z_i, z_j) - <phi(z_i), phi(z_j)> s(z_i, z_j)."""
    F = VectorSeries.wrap(phi)
    vals = F.eval(pts.points if F.dim > 1 else pts.points[:, 0])
    inner = vals @ vals.conj().T
    K = kernel_matrix(k_spec, pts.points, pts.points)
    S = kernel_matrix(s_spec, pts.points, pts.points)
    M = A * A * K - inner * S
    return psd_check(0.5 * (M + M.conj().T), tol)


def projection_identity_check(s_spec: KernelSpec, h: Series, N: int | None = None) -> float:
    """Deviation of h - sum_n u_n M_{u_n}^* h from the constant h(z0).

    Uses u_n = sqrt(b_n) z^n and the adjoint rule
    M_{z^n}^* z^(m+n) = (c_m / c_{m+n}) z^m in H_s.
    """
    N = h.order if N is None else int(N)
    if h.dim != 1:
        from .errors import NonRadialUnsupported
        raise NonRadialUnsupported("projection identity is implemented for d = 1")
    b = cnp_row_function(s_spec, N)
    c = s_spec.profile(N)
    hc = h.pad(N).coeffs[:N + 1]
    acc = np.zeros(N + 1, dtype=complex)
    for n in range(1, N + 1):
        if b[n] == 0.0:
            continue
        adj = (c[:N + 1 - n] / c[n:]) * hc[n:]   # degree m = p - n
        acc[n:] += b[n] * adj
    resid = hc - acc
    resid[0] -= hc[0]
    return float(np.max(np.abs(resid)))


def _constraint_rows(constraint, spec: KernelSpec, N: int):
    """Rows of linear functionals on the monomial coefficient vector."""
    idx = multi_indices(spec.dimension, N)
    if constraint is None:
        return np.zeros((0, len(idx)), dtype=complex)
    if isinstance(constraint, (int, np.integer)):
        m = int(constraint)
        rows = [np.eye(len(idx))[i] for i, g in enumerate(idx) if sum(g) < m]
        return np.array(rows, dtype=complex).reshape(-1, len(idx))
    pts = constraint.points if isinstance(constraint, PointSet) else np.atleast_2d(constraint)
    rows = []
    for z in pts:
        rows.append([np.prod(z ** np.array(g)) for g in idx])
    return np.array(rows, dtype=complex)


def invariant_subspace_basis(k_spec: KernelSpec, constraint, N: int):
    """Orthonormal basis (as Series) of the constrained polynomials of degree <= N.

    constraint: None, an integer m (vanish to order m at the origin), or a
    PointSet of common zeros.
    """
    d = k_spec.dimension
    idx = multi_indices(d, N)
    c = diagonal_coeffs(k_spec, N)
    sq = np.sqrt(np.array([c[g] for g in idx]))
    C = _constraint_rows(constraint, k_spec, N) * sq[None, :]
    if C.shape[0] == 0:
        Y = np.eye(len(idx), dtype=complex)
    else:
        Y = linalg.null_space(C)
    if Y.shape[1] == 0:
        raise DegenerateConstraint("constrained subspace is trivial")
    basis = []
    for col in Y.T:
        arr = np.zeros((N + 1,) * d, dtype=complex)
        for g, y, s in zip(idx, col, sq):
            arr[g] = y * s
        basis.append(Series(arr, d))
    return basis, Y, sq


def invariant_subspace_kernel(k_spec: KernelSpec, constraint, N: int, eval_pts: PointSet) -> np.ndarray:
    """Matrix k^M(z_i, z_j) of the constrained subspace on eval_pts."""
    d = k_spec.dimension
    _, Y, sq = invariant_subspace_basis(k_spec, constraint, N)
    idx = multi_indices(d, N)
    Z = eval_pts.points
    E = np.stack([np.prod(Z ** np.array(g)[None, :], axis=1) for g in idx], axis=1) * sq[None, :]
    V = E @ Y
    K = V @ V.conj().T
    return 0.5 * (K + K.conj().T)
