"""Truncated power series in d <= 3 complex variables.

Coefficients live in a dense array of shape (N+1,)*d; entries whose total
degree exceeds N are kept at zero.  Binary operations return the smaller of
the two truncation orders and set ``truncated`` when nonzero coefficients
were discarded, so no result claims accuracy beyond what was computed.
"""

from __future__ import annotations

import csv
import io
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import signal

from .errors import DimensionMismatch, NotUnivariate, ZeroConstantTerm

__all__ = [
    "Series",
    "VectorSeries",
    "multi_indices",
    "degree_mask",
    "compose_polynomial",
    "format_float",
]

MAX_DIM = 3


def format_float(x: float) -> str:
    """Shortest decimal string that parses back to the same double."""
    return repr(float(x))


@lru_cache(maxsize=64)
def multi_indices(d: int, N: int) -> tuple:
    """Exponent tuples of total degree <= N in graded lexicographic order."""
    out = []
    for n in range(N + 1):
        out.extend(_compositions(n, d))
    return tuple(out)


def _compositions(n, d):
    if d == 1:
        return [(n,)]
    res = []
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, d - 1):
            res.append((first,) + rest)
    return res


@lru_cache(maxsize=64)
def _degree_grid(d: int, N: int) -> np.ndarray:
    grids = np.meshgrid(*([np.arange(N + 1)] * d), indexing="ij")
    return sum(grids)


def degree_mask(d: int, N: int) -> np.ndarray:
    """Boolean array of shape (N+1,)*d marking total degree <= N."""
    return _degree_grid(d, N) <= N


def convolve(a, b):
    """Full convolution; direct when one factor is small.

    FFT convolution has error relative to the largest entry, which destroys
    products with kernel series whose monomial coefficients span many
    orders of magnitude, so it is only used when both factors are large.
    """
    if a.ndim == 1:
        return np.convolve(a, b)
    if a.size < b.size:
        a, b = b, a
    nz = np.argwhere(b != 0)
    if len(nz) <= 64:
        # shift and add over the few nonzero terms of the small factor
        out = np.zeros(tuple(x + y - 1 for x, y in zip(a.shape, b.shape)),
                       dtype=np.result_type(a, b))
        for ix in nz:
            out[tuple(slice(i, i + s) for i, s in zip(ix, a.shape))] += b[tuple(ix)] * a
        return out
    method = "direct" if b.size <= 1024 else "auto"
    return signal.convolve(a, b, method=method)


def _crop(a, N, d):
    sl = tuple(slice(0, N + 1) for _ in range(d))
    out = np.zeros((N + 1,) * d, dtype=complex)
    src = a[tuple(slice(0, min(N + 1, s)) for s in a.shape)]
    out[tuple(slice(0, s) for s in src.shape)] = src
    return out[sl]


def _lost(full, N):
    """True when coefficients of total degree > N are nonzero."""
    if full.ndim == 1:
        return bool(np.any(full[N + 1:] != 0))
    return bool(np.any(full[np.indices(full.shape).sum(axis=0) > N] != 0))


class Series:
    """Truncated power series with complex coefficients."""

    __slots__ = ("coeffs", "order", "dim", "truncated")

    def __init__(self, coeffs, dim: int | None = None, truncated: bool = False):
        a = np.asarray(coeffs, dtype=complex)
        if dim is None:
            dim = a.ndim
        if a.ndim != dim:
            raise DimensionMismatch(f"coefficient array has {a.ndim} axes, expected {dim}")
        if not 1 <= dim <= MAX_DIM:
            raise DimensionMismatch(f"dimension {dim} outside 1..{MAX_DIM}")
        N = max(a.shape) - 1
        if any(s != N + 1 for s in a.shape):
            a = _crop(a, N, dim)
        if dim > 1:
            a = np.where(degree_mask(dim, N), a, 0.0)
        self.coeffs = a
        self.coeffs.setflags(write=False)
        self.order = N
        self.dim = dim
        self.truncated = bool(truncated)

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, order: int, dim: int = 1) -> "Series":
        return cls(np.zeros((order + 1,) * dim, dtype=complex), dim)

    @classmethod
    def constant(cls, value, order: int, dim: int = 1) -> "Series":
        a = np.zeros((order + 1,) * dim, dtype=complex)
        a[(0,) * dim] = value
        return cls(a, dim)

    @classmethod
    def monomial(cls, gamma, order: int, coef=1.0) -> "Series":
        gamma = (gamma,) if np.isscalar(gamma) else tuple(gamma)
        d = len(gamma)
        a = np.zeros((order + 1,) * d, dtype=complex)
        if sum(gamma) <= order:
            a[gamma] = coef
        return cls(a, d)

    @classmethod
    def from_dict(cls, mapping: dict, order: int, dim: int = 1) -> "Series":
        a = np.zeros((order + 1,) * dim, dtype=complex)
        for k, v in mapping.items():
            k = (k,) if np.isscalar(k) else tuple(k)
            if sum(k) <= order:
                a[k] = v
        return cls(a, dim)

    # basic properties ---------------------------------------------------
    def __getitem__(self, gamma):
        return self.coeffs[gamma]

    def items(self):
        """(multi-index, coefficient) pairs in graded lexicographic order."""
        for g in multi_indices(self.dim, self.order):
            yield (g, complex(self.coeffs[g]))

    def degree(self) -> int:
        nz = np.nonzero(self.coeffs)
        if len(nz[0]) == 0:
            return 0
        return int(max(sum(ix) for ix in zip(*nz)))

    def truncate(self, N: int) -> "Series":
        dropped = self.order > N and _lost(self.coeffs, N)
        return Series(_crop(self.coeffs, N, self.dim), self.dim, self.truncated or dropped)

    def pad(self, N: int) -> "Series":
        """Raise the order to N with zero coefficients (exact for polynomials)."""
        if N <= self.order:
            return self
        return Series(_crop(self.coeffs, N, self.dim), self.dim, self.truncated)

    def conj_coeffs(self) -> "Series":
        return Series(np.conj(self.coeffs), self.dim, self.truncated)

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "Series"):
        if not isinstance(other, Series):
            raise TypeError("expected Series")
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimensions {self.dim} and {other.dim}")

    def __add__(self, other):
        if np.isscalar(other):
            a = self.coeffs.copy()
            a[(0,) * self.dim] += other
            return Series(a, self.dim, self.truncated)
        self._check(other)
        N = min(self.order, other.order)
        a = _crop(self.coeffs, N, self.dim) + _crop(other.coeffs, N, self.dim)
        flag = self.truncated or other.truncated or self.order != other.order
        return Series(a, self.dim, flag)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.coeffs, self.dim, self.truncated)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return Series(self.coeffs * other, self.dim, self.truncated)
        self._check(other)
        N = min(self.order, other.order)
        full = convolve(self.coeffs, other.coeffs)
        kept = _crop(full, N, self.dim)
        lost = _lost(full, N)
        return Series(kept, self.dim, self.truncated or other.truncated or lost)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return Series(self.coeffs / other, self.dim, self.truncated)
        return self * other.reciprocal()

    def scale(self, c) -> "Series":
        return self * c

    # calculus -----------------------------------------------------------
    def derivative(self, coordinate: int = 0) -> "Series":
        if not 0 <= coordinate < self.dim:
            raise DimensionMismatch(f"no coordinate {coordinate} in dimension {self.dim}")
        a = np.moveaxis(self.coeffs, coordinate, 0)
        n = np.arange(1, a.shape[0]).reshape((-1,) + (1,) * (self.dim - 1))
        b = a[1:] * n
        b = np.moveaxis(b, 0, coordinate)
        N = max(self.order - 1, 0)
        if self.order == 0:
            return Series.zeros(0, self.dim)
        return Series(_crop(b, N, self.dim), self.dim, self.truncated)

    def reciprocal(self, return_residual: bool = False):
        """1/f to the same order; optionally also max |f g - 1| over coefficients."""
        f0 = self.coeffs[(0,) * self.dim]
        if abs(f0) < 1e-12:
            raise ZeroConstantTerm(f"constant term {f0!r}")
        N = self.order
        if self.dim == 1:
            f = self.coeffs
            g = np.zeros(N + 1, dtype=complex)
            g[0] = 1.0 / f0
            for m in range(1, N + 1):
                g[m] = -np.dot(f[1:m + 1], g[m - 1::-1]) / f0
            out = Series(g, 1, self.truncated)
        else:
            # Newton with precision doubling: g is exact below total degree p
            g = Series.constant(1.0 / f0, 0, self.dim)
            p = 1
            while True:
                q = min(2 * p, N + 1)
                gq = g.pad(q - 1)
                fq = self.truncate(q - 1)
                g = gq + gq * (1.0 - fq * gq)
                if q == N + 1 and p == N + 1:
                    break
                p = q
            out = Series(g.coeffs, self.dim, self.truncated)
        if return_residual:
            r = (self * out) - 1.0
            return out, float(np.max(np.abs(r.coeffs)))
        return out

    # evaluation ---------------------------------------------------------
    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Evaluate at a point or an array of points.

        For d = 1, z is a scalar or array.  For d > 1 the last axis of z
        holds the coordinates.
        """
        c = self.coeffs
        if self.dim == 1:
            return P.polyval(np.asarray(z, dtype=complex), c)
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise DimensionMismatch(f"points have {z.shape[-1]} coordinates, series has {self.dim}")
        if self.dim == 2:
            return P.polyval2d(z[..., 0], z[..., 1], c)
        return P.polyval3d(z[..., 0], z[..., 1], z[..., 2], c)

    # serialization ------------------------------------------------------
    def to_json(self, nonzero_only: bool = False) -> list:
        rows = []
        for g, v in self.items():
            if nonzero_only and v == 0:
                continue
            idx = g[0] if self.dim == 1 else list(g)
            rows.append([idx, float(v.real), float(v.imag)])
        return rows

    @classmethod
    def from_json(cls, rows: Iterable, order: int | None = None, dim: int | None = None) -> "Series":
        rows = list(rows)
        keys = [(r[0],) if np.isscalar(r[0]) else tuple(r[0]) for r in rows]
        if dim is None:
            dim = len(keys[0]) if keys else 1
        if order is None:
            order = max((sum(k) for k in keys), default=0)
        return cls.from_dict({k: complex(r[1], r[2]) for k, r in zip(keys, rows)}, order, dim)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"i{j + 1}" for j in range(self.dim)] + ["re", "im"])
        for g, v in self.items():
            w.writerow(list(g) + [format_float(v.real), format_float(v.imag)])
        return buf.getvalue()

    def __repr__(self):
        return f"Series(dim={self.dim}, order={self.order}, degree={self.degree()})"


class VectorSeries:
    """A C^M-valued function stored as M component series of equal shape."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Series]):
        comps = list(components)
        if not comps:
            raise DimensionMismatch("empty VectorSeries")
        d, N = comps[0].dim, comps[0].order
        for c in comps:
            if c.dim != d:
                raise DimensionMismatch("components of different dimension")
        N = min(c.order for c in comps)
        self.components = tuple(c.truncate(N) if c.order != N else c for c in comps)

    @classmethod
    def wrap(cls, F) -> "VectorSeries":
        return F if isinstance(F, VectorSeries) else cls([F])

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def order(self) -> int:
        return self.components[0].order

    @property
    def truncated(self) -> bool:
        return any(c.truncated for c in self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def eval(self, z):
        """Values with the component index on the last axis."""
        return np.stack([c.eval(z) for c in self.components], axis=-1)

    __call__ = eval

    def mul_scalar_series(self, g: Series) -> "VectorSeries":
        return VectorSeries([c * g for c in self.components])

    def __mul__(self, other):
        if isinstance(other, Series):
            return self.mul_scalar_series(other)
        return VectorSeries([c * other for c in self.components])

    __rmul__ = __mul__

    def __add__(self, other: "VectorSeries"):
        return VectorSeries([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorSeries"):
        return VectorSeries([a - b for a, b in zip(self.components, other.components)])

    def truncate(self, N: int) -> "VectorSeries":
        return VectorSeries([c.truncate(N) for c in self.components])

    def pad(self, N: int) -> "VectorSeries":
        return VectorSeries([c.pad(N) for c in self.components])

    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    def to_json(self) -> list:
        return [c.to_json() for c in self.components]

    def __repr__(self):
        return f"VectorSeries(M={len(self)}, dim={self.dim}, order={self.order})"


def compose_polynomial(g: Series, f: Series) -> Series:
    """Taylor coefficients of g o f by Horner's rule, truncated at f.order."""
    if g.dim != 1 or f.dim != 1:
        raise NotUnivariate("composition needs univariate g and f")
    D = g.degree()
    N = f.order
    acc = Series.constant(g.coeffs[D], N)
    for k in range(D - 1, -1, -1):
        acc = acc * f + g.coeffs[k]
    return Series(acc.coeffs, 1, f.truncated or acc.truncated)
