"""Weighted Dirichlet spaces D_alpha, local Dirichlet integrals and Shimorin's identity.

Conventions: dA is normalized area measure on the disc, t = |z|^2, and

    d mu_alpha = alpha (1 - t)^(alpha - 1) (1 - alpha t) dA,

which is the measure for which ||f||_alpha^2 = ||f||_{H^2}^2 + int D_zeta(f) d mu_alpha
holds with the normalized coefficients c_n of the D_alpha kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .errors import AlphaOutOfRange, TailTooLarge, TargetOutOfRange
from .quadrature import DiscMeasure
from .series import Series
from .special import S1Function, complex_log1p, dalpha_coefficients

__all__ = [
    "DAlphaKernel",
    "BlaschkeProduct",
    "dalpha_coeffs",
    "s1_eval",
    "s1_partial_sum",
    "s1_properties_check",
    "f_contractive",
    "local_dirichlet",
    "mu_alpha",
    "norm_oracle",
    "shimorin_re_v",
    "blaschke",
    "interpolation_delta",
    "find_w",
    "unbounded_demo",
]

_S1: dict = {}


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha = {alpha} not in (0, 1)")


def get_s1(alpha: float) -> S1Function:
    _check_alpha(alpha)
    if alpha not in _S1:
        _S1[alpha] = S1Function(alpha)
    return _S1[alpha]


@dataclass(frozen=True, eq=False)
class DAlphaKernel:
    alpha: float
    coeffs: np.ndarray
    order: int
    band: tuple

    def s(self, z, w):
        return s1_eval(self.alpha, np.asarray(z) * np.conj(w))


def dalpha_coeffs(alpha: float, N: int) -> DAlphaKernel:
    """c_0..c_N with the band of c_n (n+1)^(1-alpha) over 1 <= n <= N."""
    _check_alpha(alpha)
    c = dalpha_coefficients(alpha, N)
    n = np.arange(N + 1)
    ratio = c * (n + 1.0) ** (1.0 - alpha)
    band = (float(ratio.min()), float(ratio.max()))
    return DAlphaKernel(float(alpha), c, int(N), band)


# s1 -----------------------------------------------------------------------

def s1_partial_sum(alpha: float, z, N: int):
    """Partial sum to N and the tail bound c_N |z|^(N+1) / (1 - |z|)."""
    _check_alpha(alpha)
    c = dalpha_coefficients(alpha, N)
    z = np.asarray(z, dtype=complex)
    val = np.polynomial.polynomial.polyval(z, c)
    r = np.abs(z)
    with np.errstate(divide="ignore"):
        tail = c[-1] * r ** (N + 1) / (1.0 - r)
    return val, tail


def s1_eval(alpha: float, z, N: int | None = None):
    """s1(z) = 1 + sum c_n z^n.

    With N given this is the partial sum, refused (TailTooLarge) when the
    tail bound exceeds 1e-8 of the sum.  Without N the closed-form
    expansion of :class:`S1Function` is used, accurate up to |z| = 1.
    """
    if N is None:
        return get_s1(alpha)(z)
    val, tail = s1_partial_sum(alpha, z, N)
    if np.any(tail > 1e-8 * np.abs(val)):
        raise TailTooLarge(f"tail bound {np.max(tail):.3g} exceeds 1e-8 of the partial sum")
    return val


def sector_half_angle(r, eps):
    """Largest |theta| with |r e^{i theta} - r| < eps (1 - r)."""
    r = np.asarray(r, dtype=float)
    x = np.where(r > 0, eps * (1.0 - r) / (2.0 * np.maximum(r, 1e-300)), np.inf)
    return np.where(x >= 1.0, np.pi, 2.0 * np.arcsin(np.minimum(x, 1.0)))


def s1_properties_check(alpha: float, eps: float = 0.5, n_grid: int = 64) -> dict:
    """Numerical evidence for the basic properties of s1.

    Reports min Re s1 on a disc grid, the bands of s1(r)(1-r)^alpha and
    (1-r)^(alpha+1) s1'(r) on r in [0.9, 0.999], and the calibrated
    sector constant delta = inf Re s1(z) (1-|z|)^alpha over the horn
    |z - |z|| < eps (1 - |z|).
    """
    S = get_s1(alpha)
    # disc grid up to the boundary (Re s1 > 1/2 extends to the circle minus 1)
    rr = 1.0 - np.logspace(-8, 0, n_grid)[::-1][:-1]
    rr = np.concatenate([[0.0], rr])
    th = 2 * np.pi * (np.arange(n_grid) + 0.5) / n_grid
    mu = complex_log1p(-(1.0 - rr))[:, None] + 1j * th[None, :]
    mu = np.where(rr[:, None] == 0.0, -np.inf + 0j, mu)
    vals = np.where(rr[:, None] == 0.0, 1.0, S.from_mu(np.where(rr[:, None] == 0.0, -1.0, mu)))
    min_re = float(np.min(vals.real))

    delta = np.logspace(-1, -3, 41)
    sv = S.at_one_minus(delta).real
    dv = S.derivative_at_one_minus(delta).real
    ratio = sv * delta ** alpha
    dratio = dv * delta ** (alpha + 1.0)

    dd = np.logspace(-1, -9, 33)
    rows = []
    for frac in (0.0, 0.5, 0.99):
        ang = frac * sector_half_angle(1.0 - dd, eps)
        m = complex_log1p(-dd) + 1j * ang
        rows.append(S.from_mu(m).real * dd ** alpha)
    sector = np.min(np.array(rows), axis=0)
    return {
        "alpha": alpha,
        "min_re_s1": min_re,
        "re_gt_half": bool(min_re > 0.5),
        "ratio_band": (float(ratio.min()), float(ratio.max())),
        "ratio_stable": bool(ratio.max() / ratio.min() <= 2.0),
        "deriv_ratio_band": (float(dratio.min()), float(dratio.max())),
        "deriv_stable": bool(dratio.max() / dratio.min() <= 2.0),
        "eps_alpha": eps,
        "delta_alpha": float(sector.min()),
        "sector_ok": bool(sector.min() > 0 and sector.min() >= 0.5 * sector.max()),
    }


def f_contractive(alpha: float, N: int) -> Series:
    """Taylor series of f = 1 - 1/s1 to order N, with sanity checks."""
    c = dalpha_coefficients(alpha, N)
    f = 1.0 - Series(c.astype(complex)).reciprocal()
    assert abs(f.coeffs[0]) < 1e-15
    S = get_s1(alpha)
    z = 0.9 * np.exp(2j * np.pi * np.arange(64) / 64)
    if not np.all(np.abs(1.0 - 1.0 / S(z)) < 1.0):
        raise ArithmeticError("|f| >= 1 on the sample grid")
    return f


# local Dirichlet integrals ---------------------------------------------------

def local_dirichlet(f: Series, zeta):
    """D_zeta(f) = sum_j |q_j|^2 with q_j = sum_{m > j} f_m zeta^(m-1-j), for |zeta| <= 1."""
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta) > 1.0 + 1e-15):
        raise ValueError("local Dirichlet integral needs |zeta| <= 1")
    c = f.coeffs
    N = f.degree()
    q = np.zeros_like(zeta)
    acc = np.zeros(zeta.shape)
    for j in range(N - 1, -1, -1):
        q = c[j + 1] + zeta * q
        acc = acc + np.abs(q) ** 2
    return acc


def mu_alpha(alpha: float, n_radial: int = 128, n_angular: int = 256) -> DiscMeasure:
    _check_alpha(alpha)
    return DiscMeasure.mu_alpha(alpha, n_radial, n_angular)


def norm_oracle(alpha: float, n: int, measure: DiscMeasure | None = None) -> tuple:
    """(||z^n||_{H^2}^2 + int D_zeta(z^n) d mu_alpha, 1/c_n)."""
    meas = measure or mu_alpha(alpha)
    f = Series.monomial(n, n)
    lhs = 1.0 + meas.integrate(lambda p: local_dirichlet(f, p)).real
    return float(lhs), float(1.0 / dalpha_coefficients(alpha, n)[n])


def shimorin_re_v(alpha: float, f: Series, z, measure: DiscMeasure | None = None,
                  n_boundary: int = 1024) -> np.ndarray:
    """Re V_f(z) = P[|f|^2](z) + int (2 Re s_z(zeta) - 1) D_zeta(f) d mu_alpha(zeta)."""
    S = get_s1(alpha)
    meas = measure or mu_alpha(alpha)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    th = 2 * np.pi * np.arange(n_boundary) / n_boundary
    bnd = np.abs(f.eval(np.exp(1j * th))) ** 2
    nodes, wts = meas.nodes()
    D = local_dirichlet(f, nodes) * wts
    out = np.empty(z.shape)
    for i, zi in enumerate(z):
        pois = (1.0 - abs(zi) ** 2) / np.abs(np.exp(1j * th) - zi) ** 2
        P = float(np.mean(bnd * pois))
        ker = 2.0 * S(nodes * np.conj(zi)).real - 1.0
        out[i] = P + float(np.sum(ker * D))
    return out


# Blaschke products ------------------------------------------------------------

class BlaschkeProduct:
    """B(z) = prod (z_n - z)/(1 - z_n z) with real zeros in [0, 1).

    The complements 1 - z_n may be given exactly; factors are then evaluated
    from q = 1 - z as (q - o_n)/(o_n + z_n q), which avoids cancellation
    when both z and z_n are close to 1.
    """

    def __init__(self, zeros, complements=None):
        z = np.asarray(zeros, dtype=float)
        if complements is None:
            o = 1.0 - z
        else:
            o = np.asarray(complements, dtype=float)
            z = 1.0 - o
        if np.any(z < 0) or np.any(o <= 0):
            raise ValueError("zeros must lie in [0, 1)")
        if len(np.unique(z)) != len(z):
            raise ValueError("zeros must be distinct")
        self.zeros = z
        self.complements = o

    @classmethod
    def exponential(cls, J: int) -> "BlaschkeProduct":
        """Zeros 1 - 2^(-n), n = 1..J."""
        o = 2.0 ** -np.arange(1, J + 1)
        return cls(1.0 - o, o)

    def __len__(self):
        return len(self.zeros)

    def factors_q(self, q):
        """Blaschke factors at z = 1 - q, shape (len(zeros),) + q.shape."""
        q = np.asarray(q, dtype=complex)
        o = self.complements.reshape((-1,) + (1,) * q.ndim)
        zz = self.zeros.reshape(o.shape)
        return (q - o) / (o + zz * q)

    def eval_q(self, q):
        if len(self) == 0:
            return np.ones_like(np.asarray(q, dtype=complex))
        return np.prod(self.factors_q(q), axis=0)

    def __call__(self, z):
        return self.eval_q(1.0 - np.asarray(z, dtype=complex))

    def derivative_q(self, q):
        """B'(z) at z = 1 - q."""
        q = np.asarray(q, dtype=complex)
        if len(self) == 0:
            return np.zeros_like(q)
        fac = self.factors_q(q)
        o = self.complements.reshape((-1,) + (1,) * q.ndim)
        zz = self.zeros.reshape(o.shape)
        dfac = -(o * (1.0 + zz)) / (o + zz * q) ** 2
        out = np.zeros_like(q)
        for n in range(len(self)):
            others = np.prod(np.delete(fac, n, axis=0), axis=0) if len(self) > 1 else 1.0
            out = out + dfac[n] * others
        return out

    def derivative(self, z):
        return self.derivative_q(1.0 - np.asarray(z, dtype=complex))

    def derivative_at_zeros(self) -> np.ndarray:
        """|B'(z_n)| = prod_{m != n} |b_m(z_n)| / (1 - z_n^2)."""
        out = np.empty(len(self))
        for n in range(len(self)):
            others = np.delete(np.arange(len(self)), n)
            fac = np.abs(self.factors_q(self.complements[n]))[others]
            out[n] = np.prod(fac) / (self.complements[n] * (1.0 + self.zeros[n]))
        return out

    def interpolation_delta(self) -> float:
        """min_n (1 - z_n^2) |B'(z_n)|."""
        if len(self) == 0:
            return 1.0
        return float(np.min(self.derivative_at_zeros() * self.complements * (1.0 + self.zeros)))


def blaschke(zeros, complements=None) -> BlaschkeProduct:
    return BlaschkeProduct(zeros, complements)


def interpolation_delta(zeros, complements=None) -> float:
    return BlaschkeProduct(zeros, complements).interpolation_delta()


def find_w(alpha: float, z_n: float, complement: float | None = None) -> dict:
    """Solve s1(w) = 1/(1 - z_n) on [0, 1); returns w, 1 - w and the residual."""
    S = get_s1(alpha)
    o = (1.0 - z_n) if complement is None else complement
    if o >= 1.0:
        return {"w": 0.0, "one_minus_w": 1.0, "residual": 0.0}
    lo = math.log(1e-15)
    if S.at_one_minus(math.exp(lo)).real * o <= 1.0:
        raise TargetOutOfRange(f"1/(1 - z_n) = {1 / o:.6g} beyond the computable range of s1")

    def g(ld):
        return S.at_one_minus(math.exp(ld)).real * o - 1.0

    ld = brentq(g, lo, 0.0, xtol=1e-15, rtol=1e-15, maxiter=400)
    delta = math.exp(ld)
    res = abs(g(ld))
    if res > 1e-10:
        raise TargetOutOfRange(f"solver residual {res:.3g}")
    return {"w": 1.0 - delta, "one_minus_w": delta, "residual": res}


# the growth demonstration --------------------------------------------------------

def _re_v_curves(alpha, blaschke_list, n_coeffs, r_grid):
    """Re V_g(r) for g = B o f, f = 1 - 1/s1, by the coefficient rule.

    Taylor coefficients of g come from samples on the circle of radius
    rho = exp(-40/L), L = 4 n_coeffs; s1 on that circle is itself one FFT
    of its coefficients.  Returns per-product dictionaries.
    """
    N = int(n_coeffs)
    L = 4 * N
    rho = math.exp(-40.0 / L)
    c = dalpha_coefficients(alpha, L - 1)
    damp = rho ** np.arange(L)
    s_samples = np.fft.ifft(c * damp) * L
    q = 1.0 / s_samples
    del s_samples
    cN = c[:N]
    undamp = 1.0 / damp[:N]
    rpow_cache = {}
    out = []
    for B in blaschke_list:
        g = (1.0 - q) if B is None else B.eval_q(q)
        gc = np.fft.fft(g)[:N] / L * undamp
        del g
        h = gc / cN
        Mfft = 2 * N
        corr = np.fft.ifft(np.conj(np.fft.fft(gc, Mfft)) * np.fft.fft(h, Mfft))[:N]
        v = 2.0 * cN * corr
        nsq = float(np.sum(np.abs(gc) ** 2 / cN))
        v[0] = nsq
        vals = []
        for r in r_grid:
            if r not in rpow_cache:
                rpow_cache[r] = r ** np.arange(N)
            vals.append(float(np.real(np.dot(v, rpow_cache[r]))))
        out.append({"norm_sq": nsq, "re_v": np.array(vals),
                    "coeff_tail": float(np.max(np.abs(gc[-N // 16:])))})
    return out


def _horn_integral(alpha, B, eps, delta_min, panel=0.35, nodes=8, n_theta=24):
    """int_S |(B o f)'|^2 dA over the horn |z - |z|| < eps (1 - |z|)."""
    S = get_s1(alpha)
    u_max = -math.log(max(delta_min, 1e-15))
    x, w = roots_legendre(nodes)
    edges = np.arange(0.0, u_max + panel, panel)
    us, uw = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        us.append(0.5 * (b - a) * x + 0.5 * (a + b))
        uw.append(0.5 * (b - a) * w)
    u = np.concatenate(us)
    wu = np.concatenate(uw)
    delta = np.exp(-u)           # 1 - r
    r = 1.0 - delta
    half = sector_half_angle(r, eps)
    xt, wt = roots_legendre(n_theta)
    theta = half[:, None] * xt[None, :]
    wth = half[:, None] * wt[None, :]
    mu = complex_log1p(-delta)[:, None] + 1j * theta
    s = S.from_mu(mu)
    sd = S.from_mu(mu, deriv=True)
    q = 1.0 / s
    fprime = sd / s ** 2
    gp = fprime if B is None else B.derivative_q(q) * fprime
    # dA = r dr dtheta / pi, dr = delta du
    dens = np.abs(gp) ** 2 * (r * delta)[:, None] / np.pi
    return float(np.sum(dens * wth * wu[:, None]))


def unbounded_demo(alpha: float = 0.5, J: int = 12, n_coeffs: int = 2 ** 20, eps: float = 0.5,
                   calibrate: int = 5) -> dict:
    """Growth table for B_J o f with zeros 1 - 2^(-n), n <= J.

    Columns: t_n = (1-w_n) s1'(w_n)/s1(w_n); S_n = sum_{m<=n} (1-w_m)^2 |(B o f)'(w_m)|^2
    with B the product on all J zeros (and S_n_own with B_n); the sup over an
    r-grid of Re V_{B_n o f}(r); and the ratio (||g||^2 + sup Re V_g) / int_S |g'|^2 dA.
    Row 0 is the baseline g = f.
    """
    _check_alpha(alpha)
    S = get_s1(alpha)
    Bfull = BlaschkeProduct.exponential(J)
    oz = Bfull.complements
    zs = Bfull.zeros
    ws = [find_w(alpha, float(zs[k]), float(oz[k])) for k in range(J)]
    dlt = np.array([w["one_minus_w"] for w in ws])
    sv = S.at_one_minus(dlt).real
    sd = S.derivative_at_one_minus(dlt).real
    t = dlt * sd / sv
    fprime = sd / sv ** 2

    Bp_full = Bfull.derivative_at_zeros()
    incr = (dlt * Bp_full * fprime) ** 2
    S_fixed = np.cumsum(incr)
    S_own = []
    for n in range(1, J + 1):
        Bn = BlaschkeProduct.exponential(n)
        S_own.append(float(np.sum((dlt[:n] * Bn.derivative_at_zeros() * fprime[:n]) ** 2)))
    delta_int = Bfull.interpolation_delta()

    r_max = 1.0 - 10.0 / n_coeffs
    base = [1.0 - 10.0 ** (-k / 4.0) for k in range(2, 40)]
    r_grid = sorted(set([r for r in base if r <= r_max] + [float(1.0 - d) for d in dlt if 1.0 - d <= r_max]
                        + [r_max]))
    prods = [None] + [BlaschkeProduct.exponential(n) for n in range(1, J + 1)]
    curves = _re_v_curves(alpha, prods, n_coeffs, r_grid)

    rows = []
    for n in range(J + 1):
        cur = curves[n]
        k = int(np.argmax(cur["re_v"]))
        horn = _horn_integral(alpha, prods[n], eps, float(dlt[-1]) * 1e-3)
        row = {
            "n": n,
            "z_n": float(zs[n - 1]) if n else None,
            "w_n": float(1.0 - dlt[n - 1]) if n else None,
            "one_minus_w_n": float(dlt[n - 1]) if n else None,
            "t_n": float(t[n - 1]) if n else None,
            "S_n": float(S_fixed[n - 1]) if n else 0.0,
            "S_n_own": S_own[n - 1] if n else 0.0,
            "norm_sq": cur["norm_sq"],
            "sup_re_v": float(cur["re_v"][k]),
            "argmax_r": float(r_grid[k]),
            "coeff_tail": cur["coeff_tail"],
            "horn_integral": horn,
            "ratio": (cur["norm_sq"] + float(cur["re_v"][k])) / horn,
        }
        rows.append(row)

    floor = float(np.min(t[:calibrate]))
    t_ok = bool(np.all(t >= 0.5 * floor))
    inc = np.diff(np.concatenate([[0.0], S_fixed]))
    S_ok = bool(np.all(inc > 0) and np.all(inc >= (delta_int ** 2 / 4.0) * np.min(t) ** 2 * (1 - 1e-12)))
    sup = np.array([row["sup_re_v"] for row in rows[1:]])
    rv_increasing = bool(np.all(np.diff(sup) > 0))
    rv_growth = float(sup[-1] / sup[0])
    ratios = np.array([row["ratio"] for row in rows])
    return {
        "alpha": alpha,
        "J": J,
        "rows": rows,
        "r_grid": r_grid,
        "curves": [c["re_v"] for c in curves],
        "calibrated_floor": floor,
        "interpolation_delta": delta_int,
        "eps_alpha": eps,
        "verdicts": {
            "t_floor": t_ok,
            "S_increasing": S_ok,
            "re_v_increasing": rv_increasing,
            "re_v_growth_5x": bool(rv_growth >= 5.0),
            "ratio_positive": bool(np.all(ratios > 0)),
        },
        "re_v_growth": rv_growth,
        "ratio_spread": float(ratios.max() / ratios.min()),
    }
