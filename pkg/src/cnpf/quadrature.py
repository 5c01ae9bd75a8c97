"""Quadrature rules on the disc, the circle and the sphere in C^2.

Radial measures on the disc are written in t = r^2, where the normalized
area measure is dA = dt dtheta / (2 pi).  Weights of the form (1 - t)^beta
are integrated by Gauss-Jacobi, which is exact on polynomials in t and
handles the endpoint singularity of (1 - t)^(alpha - 1) without loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import QuadratureBudgetExceeded

__all__ = ["DiscMeasure", "sphere_rule", "MAX_NODES"]

MAX_NODES = 4_000_000


def _jacobi_on_unit(n: int, beta: float):
    """Nodes/weights on [0, 1] for the weight (1 - t)^beta."""
    x, w = roots_jacobi(n, beta, 0.0)
    t = 0.5 * (x + 1.0)
    return t, w * 0.5 ** (beta + 1.0)


@dataclass(frozen=True, eq=False)
class DiscMeasure:
    """Finite positive measure on the closed disc as a weighted node set.

    ``t_nodes``/``t_weights`` describe the radial part in t = r^2 (weights
    already include the density), ``n_angular`` the uniform angular rule.
    Optional point masses and a boundary component with constant density
    ``boundary_mass`` on the unit circle are carried alongside.
    """

    t_nodes: np.ndarray
    t_weights: np.ndarray
    n_angular: int
    atoms: tuple = ()
    boundary_mass: float = 0.0
    n_boundary: int = 1024
    label: str = ""

    def __post_init__(self):
        total = len(self.t_nodes) * self.n_angular + len(self.atoms)
        if self.boundary_mass:
            total += self.n_boundary
        if total > MAX_NODES:
            raise QuadratureBudgetExceeded(f"{total} nodes exceed the budget {MAX_NODES}")
        if np.any(np.asarray(self.t_weights) < 0) or any(m < 0 for _, m in self.atoms) or self.boundary_mass < 0:
            raise ValueError("measure weights must be nonnegative")

    # constructors -------------------------------------------------------
    @classmethod
    def area(cls, n_radial: int = 128, n_angular: int = 256) -> "DiscMeasure":
        """Normalized area measure dA."""
        t, w = roots_legendre(n_radial)
        return cls(0.5 * (t + 1.0), 0.5 * w, n_angular, label="area")

    @classmethod
    def weighted_bergman(cls, beta: float, n_radial: int = 128, n_angular: int = 256) -> "DiscMeasure":
        """(beta + 1)(1 - |w|^2)^beta dA, a probability measure."""
        t, w = _jacobi_on_unit(n_radial, beta)
        return cls(t, (beta + 1.0) * w, n_angular, label=f"bergman({beta})")

    @classmethod
    def mu_alpha(cls, alpha: float, n_radial: int = 128, n_angular: int = 256) -> "DiscMeasure":
        """alpha (1 - t)^(alpha - 1) (1 - alpha t) dA with t = |w|^2."""
        t, w = _jacobi_on_unit(n_radial, alpha - 1.0)
        return cls(t, alpha * (1.0 - alpha * t) * w, n_angular, label=f"mu_alpha({alpha})")

    @classmethod
    def point_mass(cls, z: complex, mass: float = 1.0) -> "DiscMeasure":
        return cls(np.zeros(0), np.zeros(0), 1, atoms=((complex(z), float(mass)),), label="atom")

    @classmethod
    def boundary(cls, mass: float = 1.0, n: int = 1024) -> "DiscMeasure":
        """Normalized arc length on the circle times mass."""
        return cls(np.zeros(0), np.zeros(0), 1, boundary_mass=float(mass), n_boundary=n, label="circle")

    # flattened nodes ----------------------------------------------------
    def nodes(self):
        """(points, weights) arrays covering every component."""
        pts, wts = [], []
        if len(self.t_nodes):
            r = np.sqrt(self.t_nodes)
            th = 2 * np.pi * np.arange(self.n_angular) / self.n_angular
            pts.append((r[:, None] * np.exp(1j * th[None, :])).ravel())
            wts.append(np.repeat(self.t_weights / self.n_angular, self.n_angular))
        if self.atoms:
            pts.append(np.array([a for a, _ in self.atoms], dtype=complex))
            wts.append(np.array([m for _, m in self.atoms]))
        if self.boundary_mass:
            th = 2 * np.pi * np.arange(self.n_boundary) / self.n_boundary
            pts.append(np.exp(1j * th))
            wts.append(np.full(self.n_boundary, self.boundary_mass / self.n_boundary))
        if not pts:
            return np.zeros(0, dtype=complex), np.zeros(0)
        return np.concatenate(pts), np.concatenate(wts)

    def total_mass(self) -> float:
        return float(np.sum(self.t_weights) + sum(m for _, m in self.atoms) + self.boundary_mass)

    def integrate(self, g) -> complex:
        """Integral of a vectorized function g(points)."""
        p, w = self.nodes()
        if p.size == 0:
            return 0.0
        return complex(np.sum(w * g(p)))


def sphere_rule(n_t: int = 64, n_theta: int = 64):
    """Nodes and weights of the normalized surface measure on the sphere of C^2.

    Writes w = (sqrt(t) e^{i a}, sqrt(1 - t) e^{i b}), so that
    d sigma = dt da db / (4 pi^2): Gauss-Legendre in t, trapezoid in a, b.
    """
    x, wx = roots_legendre(n_t)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * wx
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    T, A, B = np.meshgrid(t, th, th, indexing="ij")
    W = np.broadcast_to(wt[:, None, None], T.shape) / n_theta ** 2
    pts = np.stack([np.sqrt(T) * np.exp(1j * A), np.sqrt(1.0 - T) * np.exp(1j * B)], axis=-1)
    return pts.reshape(-1, 2), W.ravel()
