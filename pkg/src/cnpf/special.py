"""Special functions for the weighted Dirichlet kernels.

The diagonal coefficients of the D_alpha kernel are

    c_n = 1 / (1 + n R_n),   R_n = prod_{j=1}^n j / (j + alpha),

and the generating function s1(z) = sum_n c_n z^n has a singularity at z = 1
of type (1 - z)^(-alpha).  Plain partial sums are useless close to that
point, so :class:`S1Function` evaluates s1 through an asymptotic expansion of
c_n in powers n^(-sigma) whose generating functions are polylogarithms,
plus an explicit correction for the first few coefficients.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special as sp

__all__ = [
    "dalpha_coefficients",
    "complex_log1p",
    "polylog_near_one",
    "S1Function",
]


def dalpha_coefficients(alpha: float, N: int) -> np.ndarray:
    """c_0..c_N of the normalized D_alpha kernel (running product, no Gamma)."""
    n = np.arange(1, N + 1, dtype=float)
    ratio = np.cumprod(n / (n + alpha))
    return np.concatenate([[1.0], 1.0 / (1.0 + n * ratio)])


def complex_log1p(z):
    """log(1 + z) for complex z, accurate for tiny |z|.

    numpy's log1p loses the real part for complex input near 0; this uses the
    classical correction log(u) - ((u - 1) - z) / u with u = 1 + z.
    """
    z = np.asarray(z, dtype=complex)
    u = 1.0 + z
    exact = u == 1.0
    safe_u = np.where(exact, 1.0, u)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(safe_u) - ((safe_u - 1.0) - z) / safe_u
    return np.where(exact, z, out)


def _bernoulli_poly(n: int, x: float) -> float:
    b = sp.bernoulli(n)
    return float(sum(sp.comb(n, k, exact=True) * b[k] * x ** (n - k) for k in range(n + 1)))


@lru_cache(maxsize=32)
def asymptotic_terms(alpha: float, sigma_max: float = 10.0) -> tuple:
    """Pairs (sigma, d) with c_n ~ sum d n^(-sigma) as n -> oo.

    Uses log G(x+1)/G(x+alpha+1) ~ -alpha log x + sum_k e_k x^(-k) and
    c = sum_m (-1)^(m-1) A^(-m), A = n R_n = Gamma(alpha+1) x^(1-alpha) exp(E).
    """
    K = int(math.ceil(sigma_max)) + 1
    e = [0.0] + [
        (-1) ** (k + 1) * (_bernoulli_poly(k + 1, 1.0) - _bernoulli_poly(k + 1, 1.0 + alpha)) / (k * (k + 1))
        for k in range(1, K + 1)
    ]
    g = math.gamma(alpha + 1.0)
    terms: dict = {}
    m = 1
    while m * (1.0 - alpha) <= sigma_max:
        # coefficients of exp(-m E(t)) in powers of t = 1/x
        L = [-m * x for x in e]
        E = [1.0] + [0.0] * K
        for n in range(1, K + 1):
            E[n] = sum(j * L[j] * E[n - j] for j in range(1, n + 1)) / n
        for k in range(K + 1):
            sig = m * (1.0 - alpha) + k
            if sig <= sigma_max + 1e-12:
                key = round(sig, 12)
                terms[key] = terms.get(key, 0.0) + (-1) ** (m - 1) * g ** (-m) * E[k]
        m += 1
    return tuple(sorted(terms.items()))


@lru_cache(maxsize=256)
def _zeta_table(s: float, K: int) -> tuple:
    si = round(s)
    pole = abs(s - si) < 1e-12 and si >= 1
    out = []
    for k in range(K):
        if pole and k == si - 1:
            out.append(0.0)
        else:
            out.append(float(sp.zeta(s - k) / math.factorial(k)))
    return tuple(out)


def polylog_near_one(s: float, mu, K: int = 90):
    """Li_s(exp(mu)) for |mu| < 2 pi via the Lindelof expansion around mu = 0."""
    mu = np.asarray(mu, dtype=complex)
    zc = _zeta_table(float(s), K)
    acc = np.zeros_like(mu)
    for k in range(K - 1, -1, -1):
        acc = acc * mu + zc[k]
    si = round(s)
    if abs(s - si) < 1e-12 and si >= 1:
        n1 = si - 1
        H = sum(1.0 / j for j in range(1, n1 + 1))
        acc = acc + mu ** n1 / math.factorial(n1) * (H - np.log(-mu))
    else:
        acc = acc + math.gamma(1.0 - s) * (-mu) ** (s - 1.0)
    return acc


class S1Function:
    """The D_alpha kernel generating function s1(z) = sum c_n z^n and its derivative.

    Points with |z| <= direct_radius are summed directly.  Elsewhere
    s1 = 1 + sum_{n<n0} (c_n - a(n)) z^n + sum_sigma d_sigma Li_sigma(z),
    with a(n) the truncated asymptotic expansion of c_n.  The point z = 1
    itself is a pole and returns inf.
    """

    def __init__(self, alpha: float, n0: int = 40, sigma_max: float = 10.0,
                 direct_radius: float = 0.8):
        self.alpha = float(alpha)
        self.terms = asymptotic_terms(self.alpha, float(sigma_max))
        self.direct_radius = direct_radius
        c = dalpha_coefficients(self.alpha, n0)
        n = np.arange(1, n0, dtype=float)
        self._n = n
        self._h = c[1:n0] - sum(d * n ** (-s) for s, d in self.terms)
        M = int(math.ceil(math.log(1e-18) / math.log(direct_radius))) + 1
        self._c_direct = dalpha_coefficients(self.alpha, M)

    def _direct(self, z, deriv=False):
        c = self._c_direct
        if deriv:
            c = c[1:] * np.arange(1, c.size)
        acc = np.zeros_like(z)
        for cn in c[::-1]:
            acc = acc * z + cn
        return acc

    def _from_mu(self, mu, deriv=False):
        z = np.exp(mu)
        h = self._n * self._h if deriv else self._h
        acc = np.zeros_like(z)
        for hn in h[::-1]:
            acc = acc * z + hn
        acc = acc * z
        for s, d in self.terms:
            acc = acc + d * polylog_near_one(s - 1.0 if deriv else s, mu)
        if deriv:
            return acc / z
        return 1.0 + acc

    def _dispatch(self, z, mu, deriv):
        z = np.asarray(z, dtype=complex)
        out = np.empty_like(z)
        small = np.abs(z) <= self.direct_radius
        if np.any(small):
            out[small] = self._direct(z[small], deriv)
        big = ~small
        if np.any(big):
            m = np.log(z[big]) if mu is None else np.asarray(mu, dtype=complex)[big]
            with np.errstate(divide="ignore", invalid="ignore"):
                out[big] = self._from_mu(m, deriv=deriv)
            pole = m == 0
            if np.any(pole):
                tmp = out[big]
                tmp[pole] = np.inf
                out[big] = tmp
        return out

    def __call__(self, z):
        """s1(z) for |z| <= 1."""
        return self._dispatch(z, None, False)

    def derivative(self, z):
        return self._dispatch(z, None, True)

    def from_mu(self, mu, deriv: bool = False):
        """s1 (or s1') at z = exp(mu); mu is used as given, which keeps precision near z = 1."""
        mu = np.asarray(mu, dtype=complex)
        return self._dispatch(np.exp(mu), mu, deriv)

    def at_one_minus(self, delta):
        """s1 at z = 1 - delta with delta given exactly (keeps precision near 1)."""
        delta = np.asarray(delta, dtype=complex)
        z = 1.0 - delta
        return self._dispatch(z, complex_log1p(-delta), False)

    def derivative_at_one_minus(self, delta):
        delta = np.asarray(delta, dtype=complex)
        z = 1.0 - delta
        return self._dispatch(z, complex_log1p(-delta), True)
