"""Kernel families on the disc, ball and polydisc.

Every built-in kernel is diagonal in the monomial basis,

    k(z, w) = sum_gamma c_gamma z^gamma conj(w)^gamma,

and is described by a geometry plus a one-variable profile a_n:

* ball:     k = phi(<z, w>),      c_gamma = a_|gamma| |gamma|! / gamma!
* polydisc: k = prod_i phi(z_i conj(w_i)),   c_gamma = prod_i a_{gamma_i}

with phi(x) = sum a_n x^n.  The disc is the ball with d = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import (
    NonNormalized,
    NonRadialUnsupported,
    NotCNP,
    NumericOverflow,
    PointOutsideDomain,
    UnsupportedFamily,
)
from .series import Series, degree_mask, multi_indices
from .special import S1Function, complex_log1p, dalpha_coefficients

__all__ = [
    "KernelSpec",
    "DiagonalCoeffs",
    "PointSet",
    "kernel_eval",
    "kernel_matrix",
    "diagonal_coeffs",
    "cnp_row_function",
    "convolution_identity_residual",
    "gram_matrix",
]

FAMILIES = (
    "szego",
    "drury_arveson",
    "bergman",
    "hardy_ball",
    "hardy_polydisc",
    "dirichlet",
    "custom",
    "power",
)

_ALIASES = {
    "szegodisc": "szego",
    "szego": "szego",
    "druryarveson": "drury_arveson",
    "drury_arveson": "drury_arveson",
    "bergmandiscweighted": "bergman",
    "bergman": "bergman",
    "hardyball": "hardy_ball",
    "hardy_ball": "hardy_ball",
    "hardypolydisc": "hardy_polydisc",
    "hardy_polydisc": "hardy_polydisc",
    "dirichletalpha": "dirichlet",
    "dirichlet": "dirichlet",
    "customdiagonal": "custom",
    "custom": "custom",
    "powerof": "power",
    "power": "power",
}

DEFAULT_ORDER = 200
_SINGULAR_GAP = 1e-14


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """A kernel family with its parameters, dimension and truncation order."""

    family: str
    dimension: int = 1
    truncation_order: int = DEFAULT_ORDER
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        fam = _ALIASES.get(self.family.lower().replace("-", "_").replace(" ", ""))
        if fam is None:
            fam = _ALIASES.get(self.family.lower().replace("_", ""))
        if fam is None:
            raise UnsupportedFamily(f"unknown kernel family {self.family!r}")
        object.__setattr__(self, "family", fam)
        if not 1 <= self.dimension <= 3:
            raise UnsupportedFamily(f"dimension {self.dimension} outside 1..3")
        if fam in ("szego", "bergman", "dirichlet", "custom") and self.dimension != 1:
            raise UnsupportedFamily(f"{fam} kernel lives on the disc (d = 1)")
        if fam == "dirichlet":
            from .errors import AlphaOutOfRange
            a = float(self.params.get("alpha", -1))
            if not 0.0 < a < 1.0:
                raise AlphaOutOfRange(f"alpha = {a} not in (0, 1)")
        if fam == "bergman" and float(self.params.get("beta", 0.0)) < 0:
            raise UnsupportedFamily("Bergman weight beta must be >= 0")
        if fam == "power":
            base = self.params["base"]
            if base.dimension != self.dimension:
                raise UnsupportedFamily("power kernel dimension differs from its base")
            if float(self.params["t"]) < 1.0:
                raise UnsupportedFamily("exponent t must be >= 1")

    # named constructors -------------------------------------------------
    @classmethod
    def szego(cls, N=DEFAULT_ORDER):
        return cls("szego", 1, N)

    @classmethod
    def drury_arveson(cls, d, N=DEFAULT_ORDER):
        return cls("drury_arveson", d, N)

    @classmethod
    def bergman(cls, beta=0.0, N=DEFAULT_ORDER):
        return cls("bergman", 1, N, {"beta": float(beta)})

    @classmethod
    def hardy_ball(cls, d, N=DEFAULT_ORDER):
        return cls("hardy_ball", d, N)

    @classmethod
    def hardy_polydisc(cls, d, N=DEFAULT_ORDER):
        return cls("hardy_polydisc", d, N)

    @classmethod
    def dirichlet(cls, alpha, N=DEFAULT_ORDER):
        return cls("dirichlet", 1, N, {"alpha": float(alpha)})

    @classmethod
    def custom(cls, coeffs, N=None):
        coeffs = tuple(float(c) for c in coeffs)
        return cls("custom", 1, len(coeffs) - 1 if N is None else N, {"coeffs": coeffs})

    @classmethod
    def power(cls, base: "KernelSpec", t, N=None):
        return cls("power", base.dimension, base.truncation_order if N is None else N,
                   {"base": base, "t": float(t)})

    # structure ----------------------------------------------------------
    @property
    def geometry(self) -> str:
        if self.family == "hardy_polydisc":
            return "polydisc"
        if self.family == "power":
            return self.params["base"].geometry
        return "ball"

    @property
    def domain(self) -> str:
        if self.dimension == 1:
            return "disc"
        return self.geometry

    @property
    def is_normalized_cnp(self) -> bool:
        """Families known to be normalized CNP kernels."""
        if self.family in ("szego", "drury_arveson", "dirichlet"):
            return True
        if self.family == "power":
            return self.params["t"] == 1.0 and self.params["base"].is_normalized_cnp
        return False

    def with_order(self, N: int) -> "KernelSpec":
        params = dict(self.params)
        if self.family == "power":
            params["base"] = params["base"].with_order(N)
        return KernelSpec(self.family, self.dimension, N, params)

    def profile(self, N: int) -> np.ndarray:
        """a_0..a_N of the one-variable generating function phi."""
        fam = self.family
        if fam in ("szego", "drury_arveson", "hardy_polydisc"):
            return np.ones(N + 1)
        if fam == "bergman":
            b = float(self.params.get("beta", 0.0))
            return _rising_over_factorial(b + 2.0, N)
        if fam == "hardy_ball":
            return _rising_over_factorial(float(self.dimension), N)
        if fam == "dirichlet":
            return dalpha_coefficients(float(self.params["alpha"]), N)
        if fam == "custom":
            c = np.asarray(self.params["coeffs"], dtype=float)
            if c.size < N + 1:
                raise UnsupportedFamily(f"custom sequence has {c.size} terms, order {N} requested")
            return c[:N + 1].copy()
        if fam == "power":
            return power_coefficients(self.params["base"].profile(N), float(self.params["t"]))
        raise UnsupportedFamily(fam)

    def log_phi(self, x):
        """log phi(x) on the branch with log phi(0) = log a_0."""
        fam = self.family
        x = np.asarray(x, dtype=complex)
        if fam in ("szego", "drury_arveson", "hardy_polydisc"):
            return -complex_log1p(-x)
        if fam == "bergman":
            return -(float(self.params.get("beta", 0.0)) + 2.0) * complex_log1p(-x)
        if fam == "hardy_ball":
            return -float(self.dimension) * complex_log1p(-x)
        if fam == "dirichlet":
            return np.log(_s1(float(self.params["alpha"]))(x))
        if fam == "custom":
            c = np.asarray(self.params["coeffs"], dtype=float)[:self.truncation_order + 1]
            return np.log(np.polynomial.polynomial.polyval(x, c))
        if fam == "power":
            return float(self.params["t"]) * self.params["base"].log_phi(x)
        raise UnsupportedFamily(fam)

    def phi(self, x):
        if self.family == "custom":
            c = np.asarray(self.params["coeffs"], dtype=float)[:self.truncation_order + 1]
            return np.polynomial.polynomial.polyval(np.asarray(x, dtype=complex), c)
        if self.family == "dirichlet":
            return _s1(float(self.params["alpha"]))(x)
        if self.family in ("szego", "drury_arveson", "hardy_polydisc"):
            return 1.0 / (1.0 - np.asarray(x, dtype=complex))
        return np.exp(self.log_phi(x))

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        params = {}
        for k, v in self.params.items():
            if isinstance(v, KernelSpec):
                params[k] = v.to_json()
            elif isinstance(v, tuple):
                params[k] = list(v)
            else:
                params[k] = v
        return {"family": self.family, "params": params, "dimension": self.dimension,
                "truncation_order": self.truncation_order}

    @classmethod
    def from_json(cls, obj: Mapping) -> "KernelSpec":
        params = dict(obj.get("params", {}))
        if "base" in params:
            params["base"] = cls.from_json(params["base"])
        if "coeffs" in params:
            params["coeffs"] = tuple(float(c) for c in params["coeffs"])
        for k in ("alpha", "beta", "t"):
            if k in params:
                params[k] = float(params[k])
        N = int(obj.get("truncation_order", DEFAULT_ORDER))
        if obj.get("family", "").lower() in ("custom", "customdiagonal") and "truncation_order" not in obj:
            N = len(params["coeffs"]) - 1
        return cls(obj["family"], int(obj.get("dimension", 1)), N, params)

    def __repr__(self):
        extra = {k: v for k, v in self.params.items() if k != "coeffs"}
        return f"KernelSpec({self.family}, d={self.dimension}, N={self.truncation_order}, {extra})"


def _rising_over_factorial(p: float, N: int) -> np.ndarray:
    """(p)_n / n! for n = 0..N, the coefficients of (1 - x)^(-p)."""
    n = np.arange(1, N + 1, dtype=float)
    return np.concatenate([[1.0], np.cumprod((n + p - 1.0) / n)])


_S1_CACHE: dict = {}


def _s1(alpha: float) -> S1Function:
    if alpha not in _S1_CACHE:
        _S1_CACHE[alpha] = S1Function(alpha)
    return _S1_CACHE[alpha]


def power_coefficients(a: np.ndarray, t: float) -> np.ndarray:
    """Coefficients of (sum a_n x^n)^t by the J.C.P. Miller recurrence."""
    a = np.asarray(a, dtype=float)
    N = a.size - 1
    p = np.zeros(N + 1)
    p[0] = a[0] ** t
    for n in range(1, N + 1):
        k = np.arange(1, n + 1)
        p[n] = np.dot(((t + 1.0) * k - n) * a[1:n + 1], p[n - 1::-1]) / (n * a[0])
    return p


@dataclass(frozen=True, eq=False)
class DiagonalCoeffs:
    """c_gamma for total degree <= N; zero outside that range."""

    values: np.ndarray
    dim: int

    @property
    def order(self) -> int:
        return self.values.shape[0] - 1

    def __getitem__(self, gamma):
        return self.values[gamma]

    def items(self):
        for g in multi_indices(self.dim, self.order):
            yield (g, float(self.values[g]))

    def norm_weights(self) -> np.ndarray:
        """1/c_gamma on the degree mask, 0 elsewhere (squared monomial norms)."""
        with np.errstate(divide="ignore"):
            w = np.where(self.values > 0, 1.0 / np.where(self.values > 0, self.values, 1.0), 0.0)
        return w


def _pascal(N: int) -> np.ndarray:
    """Binomial table C[n, k] by additions (exact below 2^53, inf past 1e308)."""
    C = np.zeros((N + 1, N + 1))
    C[:, 0] = 1.0
    with np.errstate(over="ignore"):
        for n in range(1, N + 1):
            C[n, 1:n + 1] = C[n - 1, 1:n + 1] + C[n - 1, :n]
    return C


def _multinomial(d: int, N: int) -> np.ndarray:
    """|gamma|! / gamma! as a product of binomials C(g_1 + .. + g_i, g_i)."""
    idx = np.indices((N + 1,) * d)
    C = _pascal(N)
    out = np.ones((N + 1,) * d)
    part = idx[0].copy()
    for i in range(1, d):
        part = part + idx[i]
        ok = part <= N
        out = np.where(ok, out * C[np.minimum(part, N), idx[i]], 0.0)
    return out


def diagonal_coeffs(spec: KernelSpec, N: int | None = None) -> DiagonalCoeffs:
    """Diagonal coefficients of the kernel up to total degree N."""
    N = spec.truncation_order if N is None else int(N)
    if N < 0:
        raise ValueError("order must be >= 0")
    a = spec.profile(N)
    d = spec.dimension
    if d == 1:
        return DiagonalCoeffs(a.astype(float), 1)
    if spec.geometry == "ball":
        idx = np.indices((N + 1,) * d)
        tot = idx.sum(axis=0)
        vals = np.where(tot <= N, a[np.minimum(tot, N)] * _multinomial(d, N), 0.0)
        return DiagonalCoeffs(vals, d)
    vals = np.ones((N + 1,) * d)
    for axis in range(d):
        shape = [1] * d
        shape[axis] = N + 1
        vals = vals * a.reshape(shape)
    return DiagonalCoeffs(np.where(degree_mask(d, N), vals, 0.0), d)


# points ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PointSet:
    """Distinct points strictly inside the disc, ball or polydisc."""

    points: np.ndarray
    domain: str = "disc"

    def __post_init__(self):
        p = np.asarray(self.points, dtype=complex)
        if p.ndim == 1:
            p = p[:, None]
        object.__setattr__(self, "points", p)
        if self.domain not in ("disc", "ball", "polydisc"):
            raise PointOutsideDomain(f"unknown domain {self.domain!r}")
        check_points(p, self.domain)
        if len(p) > 1:
            diff = np.abs(p[:, None, :] - p[None, :, :]).sum(axis=-1)
            np.fill_diagonal(diff, 1.0)
            if np.min(diff) == 0.0:
                raise ValueError("points must be pairwise distinct")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    @classmethod
    def random(cls, n: int, dim: int = 1, radius: float = 0.9, domain: str | None = None,
               rng: np.random.Generator | None = None) -> "PointSet":
        """n points uniform in the ball (or polydisc) of the given radius."""
        rng = np.random.default_rng(0) if rng is None else rng
        domain = domain or ("disc" if dim == 1 else "ball")
        if domain == "polydisc":
            r = radius * np.sqrt(rng.random((n, dim)))
            th = 2 * np.pi * rng.random((n, dim))
            return cls(r * np.exp(1j * th), domain)
        g = rng.standard_normal((n, 2 * dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = radius * rng.random(n) ** (1.0 / (2 * dim))
        g *= r[:, None]
        return cls(g[:, :dim] + 1j * g[:, dim:], domain)

    @classmethod
    def polar_grid(cls, n_radial: int, n_angular: int, radius: float = 0.9) -> "PointSet":
        """Disc grid r_i e^{i theta_j}, r_i = radius*i/n_radial."""
        r = radius * np.arange(1, n_radial + 1) / n_radial
        th = 2 * np.pi * np.arange(n_angular) / n_angular
        return cls((r[:, None] * np.exp(1j * th[None, :])).ravel(), "disc")


def check_points(p: np.ndarray, domain: str):
    p = np.asarray(p, dtype=complex)
    if p.ndim == 1:
        p = p[:, None]
    if domain == "polydisc":
        bad = np.any(np.abs(p) >= 1.0, axis=-1)
    else:
        bad = np.sum(np.abs(p) ** 2, axis=-1) >= 1.0
    if np.any(bad):
        raise PointOutsideDomain(f"{int(np.sum(bad))} point(s) outside the open {domain}")


def _as_points(z, d):
    z = np.asarray(z, dtype=complex)
    if d == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.ndim == 1:
        z = z[None, :]
    if z.shape[-1] != d:
        from .errors import DimensionMismatch
        raise DimensionMismatch(f"points have {z.shape[-1]} coordinates, kernel has {d}")
    return z


def kernel_matrix(spec: KernelSpec, Z, W) -> np.ndarray:
    """Matrix K[i, j] = k(z_i, w_j) = k_{w_j}(z_i)."""
    d = spec.dimension
    Z = _as_points(Z, d).reshape(-1, d)
    W = _as_points(W, d).reshape(-1, d)
    check_points(Z, spec.domain)
    check_points(W, spec.domain)
    if spec.geometry == "polydisc":
        X = Z[:, None, :] * np.conj(W[None, :, :])
        if np.min(np.abs(1.0 - X)) < _SINGULAR_GAP:
            raise NumericOverflow("|1 - z_i conj(w_i)| below 1e-14")
        return np.prod(spec.phi(X), axis=-1)
    X = Z @ np.conj(W).T
    if np.min(np.abs(1.0 - X)) < _SINGULAR_GAP:
        raise NumericOverflow("|1 - <z, w>| below 1e-14")
    return spec.phi(X)


def kernel_eval(spec: KernelSpec, z, w) -> complex:
    """k(z, w) for single points z, w."""
    return complex(kernel_matrix(spec, z, w)[0, 0])


def gram_matrix(spec: KernelSpec, pts: PointSet) -> np.ndarray:
    """Hermitian Gram matrix G[i, j] = k(z_i, z_j)."""
    K = kernel_matrix(spec, pts.points, pts.points)
    return 0.5 * (K + K.conj().T)


def cnp_row_function(spec: KernelSpec, N: int | None = None, tol: float = 1e-14) -> np.ndarray:
    """b_0..b_N with 1 - 1/s = sum b_n x^n, x = <z, w>.

    Raises NotCNP at the first b_n < -tol.
    """
    N = spec.truncation_order if N is None else int(N)
    if spec.geometry != "ball":
        raise NonRadialUnsupported("row function needs a kernel of the form phi(<z, w>)")
    c = spec.profile(N)
    if abs(c[0] - 1.0) > 1e-15:
        raise NonNormalized(f"c_0 = {c[0]!r}")
    g = Series(c.astype(complex)).reciprocal()
    b = -g.coeffs.real.copy()
    b[0] = 0.0
    neg = np.nonzero(b < -tol)[0]
    if neg.size:
        raise NotCNP(int(neg[0]), float(b[neg[0]]))
    return b


def convolution_identity_residual(spec: KernelSpec, N: int | None = None) -> float:
    """max_m |sum_{j<=m} b_j c_{m-j} - c_m| / c_m over 1 <= m <= N."""
    N = spec.truncation_order if N is None else int(N)
    c = spec.profile(N)
    b = cnp_row_function(spec, N, tol=np.inf)
    full = np.convolve(b, c)[:N + 1]
    return float(np.max(np.abs(full[1:] - c[1:]) / c[1:])) if N >= 1 else 0.0
