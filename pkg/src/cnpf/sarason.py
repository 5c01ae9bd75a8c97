"""Sarason functions and the constructive factorization F = Re(a) Phi / (1 - psi).

For a pair of diagonal kernels (k, s) the Sarason function

    V_F(z) = 2 <F, s_z F>_k - ||F||_k^2

has the Taylor coefficients

    v_0 = ||F||^2,   v_gamma = 2 c^s_gamma sum_beta conj(F_beta) F_{beta+gamma} / c^k_{beta+gamma},

so for a polynomial F it is a polynomial of the same degree.  The rule only
uses orthogonality of the monomials, hence it holds for every built-in
family in any dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .certify import DEFAULT_TOL, PsdReport, psd_check
from .errors import NotUnitNorm, PointOutsideDomain
from .kernels import KernelSpec, PointSet, diagonal_coeffs, kernel_matrix
from .quadrature import DiscMeasure, sphere_rule
from .series import Series, VectorSeries, convolve, multi_indices
from .spaces import norm_sq, norm_weights

__all__ = [
    "SarasonData",
    "Factorization",
    "sarason_function",
    "sarason_value_direct",
    "sarason_by_quadrature",
    "factorize",
    "factorize_unit",
    "contractivity_check",
    "r_approximant",
    "main_lemma_psd",
    "majorant_check",
    "extremal_check",
    "extremal_bound_check",
    "uniqueness_kernel_psd",
    "default_grid",
    "kernel_series",
    "random_function",
]

RECON_RADIUS = 0.75
TAIL_EPS = 1e-17


@dataclass(frozen=True, eq=False)
class SarasonData:
    v: Series
    norm_sq: float
    k_spec: KernelSpec
    s_spec: KernelSpec

    def __call__(self, z):
        return self.v.eval(z)


@dataclass(eq=False)
class Factorization:
    a: complex
    psi: Series
    phi: VectorSeries
    certificates: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "a": [float(np.real(self.a)), float(np.imag(self.a))],
            "psi_coeffs": self.psi.to_json(),
            "phi_coeffs": self.phi.to_json(),
            "certificates": {k: _jsonable(v) for k, v in self.certificates.items()},
        }


def _jsonable(v):
    if isinstance(v, complex) or isinstance(v, np.complexfloating):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


# helpers -----------------------------------------------------------------

def _correlate(H: np.ndarray, F: np.ndarray) -> np.ndarray:
    """corr[gamma] = sum_beta H[beta + gamma] conj(F[beta]) for gamma >= 0."""
    full = signal.correlate(H, F, mode="full", method="auto")
    sl = tuple(slice(s - 1, None) for s in F.shape)
    return full[sl][tuple(slice(0, s) for s in H.shape)]


def _points(z, d):
    z = np.asarray(z, dtype=complex)
    if d == 1:
        return z.reshape(-1)
    return z.reshape(-1, d)


def kernel_series(spec: KernelSpec, w, M: int) -> Series:
    """The kernel function k_w(z) = sum c_gamma conj(w)^gamma z^gamma, truncated at M."""
    d = spec.dimension
    c = diagonal_coeffs(spec, M).values
    w = np.atleast_1d(np.asarray(w, dtype=complex)).reshape(d)
    idx = np.indices((M + 1,) * d)
    mono = np.ones((M + 1,) * d, dtype=complex)
    for i in range(d):
        mono = mono * np.conj(w[i]) ** idx[i]
    return Series(c * mono, d)


def truncation_for(radius: float, margin: int = 8) -> int:
    """Order M with radius^M below 1e-17."""
    if radius <= 0:
        return 1
    if radius >= 1:
        raise PointOutsideDomain(f"kernel series at radius {radius} does not converge")
    return int(math.ceil(math.log(TAIL_EPS) / math.log(radius))) + margin


def _radii(spec: KernelSpec, Z: np.ndarray) -> np.ndarray:
    """Per-point size controlling the kernel-series tail: |z| on the ball, max |z_i| on the polydisc."""
    Z = np.asarray(Z, dtype=complex).reshape(len(Z), -1)
    if spec.geometry == "polydisc":
        return np.max(np.abs(Z), axis=1)
    return np.linalg.norm(Z, axis=1)


def default_grid(d: int, n: int = 100, radius: float = RECON_RADIUS) -> np.ndarray:
    """Fixed evaluation grid used by reconstruction certificates."""
    if d == 1:
        side = int(round(math.sqrt(n)))
        r = radius * np.arange(1, side + 1) / side
        th = 2 * np.pi * (np.arange(side) + 0.5) / side
        return (r[:, None] * np.exp(1j * th[None, :])).ravel()
    return PointSet.random(n, d, radius, rng=np.random.default_rng(20240601)).points


def random_function(spec: KernelSpec, degree: int, rng: np.random.Generator, M: int = 1) -> VectorSeries:
    """Unit-norm F with i.i.d. complex normal coefficients up to total degree `degree`."""
    d = spec.dimension
    comps = []
    from .kernels import degree_mask
    mask = degree_mask(d, degree)
    for _ in range(M):
        a = rng.standard_normal((degree + 1,) * d) + 1j * rng.standard_normal((degree + 1,) * d)
        comps.append(Series(np.where(mask, a, 0.0), d))
    F = VectorSeries(comps)
    n = math.sqrt(norm_sq(spec, F))
    return VectorSeries([c * (1.0 / n) for c in F])


# Sarason function --------------------------------------------------------

def sarason_function(k_spec: KernelSpec, s_spec: KernelSpec, F, N: int | None = None) -> SarasonData:
    """V_F by the coefficient rule, exact for polynomial F."""
    F = VectorSeries.wrap(F)
    d = F.dim
    if k_spec.dimension != d or s_spec.dimension != d:
        from .errors import DimensionMismatch
        raise DimensionMismatch("F, k and s must share the dimension")
    n_F = F.order
    wk = norm_weights(k_spec, n_F)
    cs = diagonal_coeffs(s_spec, n_F).values
    corr = np.zeros((n_F + 1,) * d, dtype=complex)
    for comp in F:
        corr = corr + _correlate(comp.coeffs * wk, comp.coeffs)
    nsq = float(np.real(corr[(0,) * d]))
    v = 2.0 * cs * corr
    v[(0,) * d] -= nsq
    V = Series(v, d, F.truncated)
    if N is not None:
        V = V.pad(N) if N >= V.order else V.truncate(N)
    return SarasonData(V, nsq, k_spec, s_spec)


def sarason_value_direct(k_spec: KernelSpec, s_spec: KernelSpec, F, z) -> complex:
    """Oracle: 2 <F, s_z F>_k - ||F||^2 from series products and diagonal inner products."""
    F = VectorSeries.wrap(F)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    M = truncation_for(float(_radii(s_spec, z[None, :])[0])) + F.order
    sz = kernel_series(s_spec, z, M)
    Fp = F.pad(M)
    w = norm_weights(k_spec, M)
    acc = 0.0
    for comp in Fp:
        prod = comp * sz
        acc += np.sum(comp.coeffs * np.conj(prod.coeffs) * w)
    return complex(2.0 * acc - norm_sq(k_spec, F))


def sarason_by_quadrature(k_spec: KernelSpec, F, grid, n_radial: int = 128, n_angular: int = 512,
                          n_sphere: int = 64) -> np.ndarray:
    """V_F on grid from the integral formula int |F|^2 (1 + <z,w>)/(1 - <z,w>) dmu.

    Supported: Bergman-weighted (area-type density), Szego (circle), and the
    Hardy space of the ball in d = 2 (sphere rule).
    """
    F = VectorSeries.wrap(F)
    fam, d = k_spec.family, k_spec.dimension
    if fam == "bergman":
        meas = DiscMeasure.weighted_bergman(float(k_spec.params.get("beta", 0.0)), n_radial, n_angular)
        nodes, wts = meas.nodes()
    elif fam == "szego" or (fam == "hardy_ball" and d == 1):
        meas = DiscMeasure.boundary(1.0, 2 * n_angular)
        nodes, wts = meas.nodes()
    elif fam == "hardy_ball" and d == 2:
        nodes, wts = sphere_rule(n_sphere, n_sphere)
    else:
        from .errors import UnsupportedFamily
        raise UnsupportedFamily(f"no integral formula for {fam} in dimension {d}")
    Z = _points(grid, d)
    absF2 = np.sum(np.abs(F.eval(nodes)) ** 2, axis=-1)
    out = np.empty(len(Z), dtype=complex)
    for i, z in enumerate(Z):
        x = nodes * np.conj(z) if d == 1 else nodes @ np.conj(z)
        x = np.conj(x)  # <z, w>
        out[i] = np.sum(wts * absF2 * (1.0 + x) / (1.0 - x))
    return out


# factorization -------------------------------------------------------------

def _reconstruction_residual(F: VectorSeries, fact: "Factorization", grid, extra=None) -> float:
    d = F.dim
    Z = _points(grid, d)
    Fv = F.eval(Z)
    if extra is not None:
        Fv = np.concatenate([Fv, extra(Z)[:, None]], axis=1)
    Pv = fact.phi.eval(Z)
    ps = fact.psi.eval(Z)
    rec = np.real(fact.a) * Pv / (1.0 - ps)[:, None]
    return float(np.max(np.linalg.norm(Fv - rec, axis=1)))


MAX_ORDER = {1: 4096, 2: 256, 3: 64}


def _tail_ratio(R: Series) -> float:
    """Largest coefficient of total degree above 0.9*order relative to the largest overall."""
    c = np.abs(R.coeffs)
    top = float(c.max())
    if R.dim == 1:
        tail = c[int(0.9 * R.order):]
    else:
        tail = c[np.indices(c.shape).sum(axis=0) >= int(0.9 * R.order)]
    return float(tail.max()) / top if top else 0.0


def _adaptive_reciprocal(V: Series, shift: complex, M: int, d: int):
    """Reciprocal of V + shift, doubling the order until its tail is negligible."""
    cap = MAX_ORDER[d]
    M = min(max(M, 8), cap)
    while True:
        Vm = V.pad(M) if V.order <= M else V.truncate(M)
        R, rres = (Vm + shift).reciprocal(return_residual=True)
        if _tail_ratio(R) < 1e-17 or M >= cap:
            return M, Vm, R, rres
        M = min(2 * M, cap)


def factorize(F, a: complex, k_spec: KernelSpec, s_spec: KernelSpec, order: int | None = None,
              _V: Series | None = None, _F_full: VectorSeries | None = None, _extra=None) -> Factorization:
    """psi_a = (V - a)/(V + conj a), Phi_a = 2F/(V + conj a)."""
    a = complex(a)
    if a.real <= 0:
        raise ValueError("Re a must be positive")
    F = VectorSeries.wrap(F)
    V = _V if _V is not None else sarason_function(k_spec, s_spec, F).v
    if order is not None:
        M = order
        V = V.pad(M) if V.order <= M else V.truncate(M)
        R, rres = (V + np.conj(a)).reciprocal(return_residual=True)
    else:
        M, V, R, rres = _adaptive_reciprocal(V, np.conj(a), 4 * max(F.order, 1), F.dim)
    psi = (V - a) * R
    src = _F_full if _F_full is not None else F
    phi = VectorSeries([c.pad(M).truncate(M) * 2.0 * R for c in src])
    fact = Factorization(a, psi, phi)
    grid = default_grid(F.dim)
    fact.certificates = {
        "reconstruction_residual": _reconstruction_residual(F, fact, grid, _extra),
        "contractivity_margin": None,
        "psi_at_base": complex(psi.coeffs[(0,) * F.dim]),
        "reciprocal_residual": rres,
        "order": M,
    }
    return fact


def factorize_unit(F, k_spec: KernelSpec, s_spec: KernelSpec, order: int | None = None,
                   embed: complex | None = None, tol: float = 1e-10) -> Factorization:
    """Factorization with a = 1 for ||F|| = 1, or for ||F|| < 1 via the embedding at w."""
    F = VectorSeries.wrap(F)
    nsq = norm_sq(k_spec, F)
    M = order if order is not None else 4 * max(F.order, 1)
    if abs(math.sqrt(nsq) - 1.0) <= tol:
        fact = factorize(F, 1.0, k_spec, s_spec, order)
    else:
        if embed is None or nsq > 1.0:
            raise NotUnitNorm(f"||F|| = {math.sqrt(nsq)!r}; use embed=w for sub-unit norm")
        w = np.atleast_1d(np.asarray(embed, dtype=complex))
        gap = 1.0 - nsq
        Mk = max(M, truncation_for(float(max(_radii(k_spec, w[None, :])[0], _radii(s_spec, w[None, :])[0]))))
        kw = kernel_series(k_spec, w, Mk)
        kww = float(np.real(kernel_matrix(k_spec, w[None, :], w[None, :])[0, 0]))
        extra_series = kw * (math.sqrt(gap) / math.sqrt(kww))
        sw = kernel_series(s_spec, w, Mk)
        V = sarason_function(k_spec, s_spec, F).v.pad(Mk) + (sw * 2.0 - 1.0) * gap
        full = VectorSeries([c.pad(Mk) for c in F] + [extra_series])

        def extra(Z):
            Zp = Z if Z.ndim == 2 else Z[:, None]
            return kernel_matrix(k_spec, Zp, w[None, :])[:, 0] * (math.sqrt(gap) / math.sqrt(kww))

        fact = factorize(F, 1.0, k_spec, s_spec, order, _V=V, _F_full=full, _extra=extra)
        fact.certificates["embed_w"] = [float(x) for x in np.concatenate([w.real, w.imag])]
    psi0 = fact.certificates["psi_at_base"]
    fact.certificates["psi_at_base_ok"] = bool(abs(psi0) <= 1e-10)
    return fact


def _random_h(spec: KernelSpec, degree: int, rng) -> Series:
    from .kernels import degree_mask
    d = spec.dimension
    a = rng.standard_normal((degree + 1,) * d) + 1j * rng.standard_normal((degree + 1,) * d)
    h = Series(np.where(degree_mask(d, degree), a, 0.0), d)
    return h * (1.0 / math.sqrt(norm_sq(spec, h)))


def contractivity_check(fact: Factorization, s_spec: KernelSpec, k_spec: KernelSpec, trials: int = 100,
                        seed: int = 0, degree: int = 20) -> dict:
    """min over random h of ||h||_s^2 - ||psi h||_s^2 - Re(a) ||Phi h||_k^2."""
    M = fact.psi.order
    worst, witness = np.inf, None
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        h = _random_h(s_spec, degree, rng).pad(M)
        ph = fact.psi * h
        Fh = fact.phi * h
        slack = 1.0 - norm_sq(s_spec, ph) - fact.a.real * norm_sq(k_spec, Fh)
        if slack < worst:
            worst, witness = slack, t
    if trials == 0:
        worst = 0.0
    fact.certificates["contractivity_margin"] = float(worst)
    return {"min_slack": float(worst), "witness_trial": witness, "trials": trials,
            "passed": bool(worst >= -1e-6)}


def r_approximant(fact: Factorization, r: float, s_spec: KernelSpec, k_spec: KernelSpec,
                  F=None, trials: int = 50, seed: int = 0, degree: int = 20) -> dict:
    """F^r = Re(a) Phi / (1 - r psi) and the slack of its multiplier inequality."""
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    M = fact.psi.order
    R = (1.0 - fact.psi * r).reciprocal()
    Fr = VectorSeries([c * R * fact.a.real for c in fact.phi])
    Q = (1.0 + fact.psi * r) * R
    worst = np.inf
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        h = _random_h(s_spec, degree, rng).pad(M)
        lhs = norm_sq(k_spec, Fr * h)
        w = norm_weights(s_spec, M)
        rhs = fact.a.real * float(np.real(np.sum((Q * h).coeffs * np.conj(h.coeffs) * w)))
        worst = min(worst, rhs - lhs)
    out = {"r": r, "min_slack": float(worst), "F_r": Fr}
    if F is not None:
        Fp = VectorSeries.wrap(F).pad(M)
        out["distance"] = math.sqrt(norm_sq(k_spec, Fr - Fp))
    return out


# Gram-type matrices ---------------------------------------------------------

def _products_with_kernel(s_spec: KernelSpec, F: VectorSeries, Z: np.ndarray, k_spec: KernelSpec):
    """Rows A_i with <s_{z_i}F, s_{z_j}F>_k = A_i . conj(A_j)."""
    d = F.dim
    radius = float(np.max(_radii(s_spec, Z))) if len(Z) else 0.0
    M = truncation_for(radius)
    L = M + F.order
    sw = np.sqrt(norm_weights(k_spec, L))
    rows = []
    for z in Z:
        sz = kernel_series(s_spec, z, M).coeffs
        parts = []
        for comp in F:
            full = convolve(sz, comp.coeffs)
            full = full[tuple(slice(0, L + 1) for _ in range(d))]
            parts.append((full * sw).ravel())
        rows.append(np.concatenate(parts))
    return np.array(rows)


def _as_pointset(pts, d):
    if isinstance(pts, PointSet):
        return pts.points if d > 1 else pts.points[:, 0]
    return _points(pts, d)


def main_lemma_psd(k_spec: KernelSpec, s_spec: KernelSpec, F, pts, tol: float = DEFAULT_TOL) -> PsdReport:
    """Section of (V(z_j) + conj V(z_i))/2 - <s_{z_i}F, s_{z_j}F>_k / s(z_j, z_i)."""
    F = VectorSeries.wrap(F)
    d = F.dim
    Z = _as_pointset(pts, d)
    V = sarason_function(k_spec, s_spec, F).v.eval(Z)
    A = _products_with_kernel(s_spec, F, Z, k_spec)
    H = A @ A.conj().T
    S = kernel_matrix(s_spec, Z, Z)
    Mat = 0.5 * (np.conj(V)[:, None] + V[None, :]) - H / S.T
    return psd_check(0.5 * (Mat + Mat.conj().T), tol)


def _rotated_norms_sq(s_spec: KernelSpec, F: VectorSeries, Z: np.ndarray, M: int) -> np.ndarray:
    """||s_z F||_s^2 on the ball through a unitary U with U z = (|z|, 0, ...).

    Unitary invariance of the norm gives ||s_z F|| = ||phi(|z| w_1) G||
    with G = F o U^*.  The coefficients of G come from an FFT of its samples
    on a torus grid; the kernel factor then has the bounded coefficients
    a_n |z|^n and the product is a shift along the first axis.
    """
    d, D = F.dim, F.order
    n = D + 1
    r = np.linalg.norm(Z, axis=1)
    P = len(Z)
    # A = U^* is unitary with first column z/|z|, completed by Householder QR
    A = np.empty((P, d, d), dtype=complex)
    for p in range(P):
        v = Z[p] / r[p] if r[p] > 0 else np.eye(d, dtype=complex)[0]
        Q, _ = np.linalg.qr(np.column_stack([v, np.eye(d)[:, 1:]]))
        Q[:, 0] = v
        A[p] = Q
    th = np.exp(2j * np.pi * np.arange(n) / n)
    torus = np.stack(np.meshgrid(*([th] * d), indexing="ij"), axis=-1).reshape(-1, d)
    X = np.einsum("pij,kj->pki", A, torus)
    a = s_spec.profile(M)
    col = a[None, :] * r[:, None] ** np.arange(M + 1)[None, :]
    w = norm_weights(s_spec, M + 2 * D)[(slice(0, M + D + 1),) + (slice(0, n),) * (d - 1)]
    acc = np.zeros(P)
    for comp in F:
        vals = comp.eval(X).reshape((P,) + (n,) * d)
        G = np.fft.fftn(vals, axes=tuple(range(1, d + 1))) / n ** d
        prod = np.zeros((P, M + D + 1) + (n,) * (d - 1), dtype=complex)
        for k in range(n):
            prod[:, k:k + M + 1] += col.reshape((P, M + 1) + (1,) * (d - 1)) * G[:, k][:, None]
        acc += np.sum(np.abs(prod) ** 2 * w[None], axis=tuple(range(1, d + 1)))
    return acc


def _norms_sq_kernel_products(s_spec: KernelSpec, F: VectorSeries, Z: np.ndarray, batch: int = 512):
    """||s_z F||_s^2 for many points, batching by radius."""
    d = F.dim
    norms = _radii(s_spec, Z)
    order = np.argsort(norms)
    out = np.empty(len(Z))
    if d > 1 and s_spec.geometry != "ball":
        batch = 16
    for start in range(0, len(Z), batch):
        ids = order[start:start + batch]
        M = truncation_for(float(norms[ids].max()))
        L = M + F.order
        w = norm_weights(s_spec, L)
        if d == 1:
            c = diagonal_coeffs(s_spec, M).values
            n = np.arange(M + 1)
            C = c[None, :] * np.conj(Z[ids])[:, None] ** n[None, :]
            nfft = 1 << int(math.ceil(math.log2(L + 1)))
            fC = np.fft.fft(C, nfft, axis=1)
            acc = np.zeros(len(ids))
            for comp in F:
                G = np.fft.ifft(fC * np.fft.fft(comp.coeffs, nfft)[None, :], axis=1)[:, :L + 1]
                acc += np.sum(np.abs(G) ** 2 * w[None, :], axis=1)
            out[ids] = acc
        elif s_spec.geometry == "ball":
            out[ids] = _rotated_norms_sq(s_spec, F, Z[ids], M)
        else:
            for i in ids:
                sz = kernel_series(s_spec, Z[i], M).coeffs
                acc = 0.0
                for comp in F:
                    G = convolve(sz, comp.coeffs)[tuple(slice(0, L + 1) for _ in range(d))]
                    acc += float(np.sum(np.abs(G) ** 2 * w))
                out[i] = acc
    return out


def majorant_check(k_spec: KernelSpec, s_spec: KernelSpec, F, grid, tol: float = 1e-8,
                   with_mid: bool | None = None) -> dict:
    """Table of lhs = s(z,z)/k(z,z) ||F(z)||^2 against rhs = Re V_F(z).

    When k = s the middle term ||s_z F||^2 / ||s_z||^2 of the chain
    |F(z)|^2 <= mid <= Re V(z) is added.
    """
    F = VectorSeries.wrap(F)
    d = F.dim
    Z = _as_pointset(grid, d)
    Zp = Z if d > 1 else Z[:, None]
    kzz = np.real(np.array([kernel_matrix(k_spec, p[None, :], p[None, :])[0, 0] for p in Zp])) \
        if len(Zp) < 64 else _diag_kernel(k_spec, Zp)
    szz = _diag_kernel(s_spec, Zp)
    lhs = szz / kzz * np.sum(np.abs(F.eval(Z)) ** 2, axis=-1)
    rhs = np.real(sarason_function(k_spec, s_spec, F).v.eval(Z))
    same = _same_kernel(k_spec, s_spec)
    if with_mid is None:
        with_mid = same
    mid = np.full(len(Z), np.nan)
    ok = lhs <= rhs + tol
    if with_mid:
        mid = _norms_sq_kernel_products(s_spec, F, Z) / szz
        ok = ok & (lhs <= mid + tol) & (mid <= rhs + tol)
    return {"z": Z, "lhs": lhs, "mid": mid, "rhs": rhs, "verdict": ok,
            "passed": bool(np.all(ok)), "min_slack": float(np.min(rhs - lhs))}


def _diag_kernel(spec: KernelSpec, Zp: np.ndarray) -> np.ndarray:
    from .kernels import check_points
    check_points(Zp, spec.domain)
    if spec.geometry == "polydisc":
        return np.real(np.prod(spec.phi(np.abs(Zp) ** 2), axis=-1))
    return np.real(spec.phi(np.sum(np.abs(Zp) ** 2, axis=-1)))


def _same_kernel(k: KernelSpec, s: KernelSpec) -> bool:
    if k.dimension != s.dimension:
        return False
    N = min(k.truncation_order, s.truncation_order, 64)
    return bool(np.allclose(diagonal_coeffs(k, N).values, diagonal_coeffs(s, N).values, rtol=1e-14, atol=0))


def extremal_check(k_spec: KernelSpec, F, max_degree: int, tol: float = 1e-10) -> dict:
    """max deviation of <z^gamma F, F>_k from delta_{gamma 0}, |gamma| <= max_degree."""
    F = VectorSeries.wrap(F)
    d = F.dim
    wk = norm_weights(k_spec, F.order)
    corr = np.zeros((F.order + 1,) * d, dtype=complex)
    for comp in F:
        corr = corr + _correlate(comp.coeffs * wk, comp.coeffs)
    dev = abs(corr[(0,) * d] - 1.0)
    for g in multi_indices(d, min(max_degree, F.order)):
        if sum(g) == 0:
            continue
        dev = max(dev, abs(corr[g]))
    return {"deviation": float(dev), "extremal": bool(dev <= tol)}


def extremal_bound_check(k_spec: KernelSpec, s_spec: KernelSpec, F, grid, k_diag=None,
                         tol: float = 1e-8) -> dict:
    """||F(z)||^2 <= k(z,z)/s(z,z) and, on the ball, ||F(z)||^2 <= (1 - |z|^2) k(z,z)."""
    F = VectorSeries.wrap(F)
    d = F.dim
    Z = _as_pointset(grid, d)
    Zp = Z if d > 1 else Z[:, None]
    kzz = np.asarray(k_diag, dtype=float) if k_diag is not None else _diag_kernel(k_spec, Zp)
    szz = _diag_kernel(s_spec, Zp)
    val = np.sum(np.abs(F.eval(Z)) ** 2, axis=-1)
    b1 = kzz / szz
    ok = val <= b1 + tol
    out = {"z": Z, "value": val, "bound": b1}
    if k_spec.geometry == "ball":
        b2 = (1.0 - np.sum(np.abs(Zp) ** 2, axis=-1)) * kzz
        out["ball_bound"] = b2
        ok = ok & (val <= b2 + tol)
    out["verdict"] = ok
    out["passed"] = bool(np.all(ok))
    return out


def uniqueness_kernel_psd(k_spec: KernelSpec, s_spec: KernelSpec, F, psi: Series, pts,
                          tol: float = DEFAULT_TOL, recovery_tol: float = 1e-6) -> dict:
    """L(z_i, z_j) = s(z_j, z_i)[Q(z_j) + conj Q(z_i)] - 2 <s_{z_i}F, s_{z_j}F>_k, Q = (1+psi)/(1-psi)."""
    F = VectorSeries.wrap(F)
    d = F.dim
    Z = _as_pointset(pts, d)
    base = np.zeros((1,) + Z.shape[1:], dtype=complex)
    has_base = np.any(np.all(np.abs(Z.reshape(len(Z), -1)) == 0, axis=1))
    if not has_base:
        Z = np.concatenate([base, Z])
    ps = psi.eval(Z)
    Q = (1.0 + ps) / (1.0 - ps)
    A = _products_with_kernel(s_spec, F, Z, k_spec)
    H = A @ A.conj().T
    S = kernel_matrix(s_spec, Z, Z)
    L = S.T * (Q[None, :] + np.conj(Q)[:, None]) - 2.0 * H
    rep = psd_check(0.5 * (L + L.conj().T), tol)
    b = int(np.nonzero(np.all(np.abs(Z.reshape(len(Z), -1)) == 0, axis=1))[0][0])
    V = sarason_function(k_spec, s_spec, F).v.eval(Z)
    rec = float(np.max(np.abs(Q - V)))
    col = float(np.max(np.abs(L[:, b])))
    return {"psd": rep, "recovery_error": rec, "base_column_max": col,
            "recovery_ok": bool(rec <= recovery_tol and col <= recovery_tol)}
