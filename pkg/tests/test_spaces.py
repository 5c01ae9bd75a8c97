import math

import numpy as np
import pytest

from cnpf.errors import DimensionMismatch, OrderMismatch, QuadratureBudgetExceeded
from cnpf.kernels import KernelSpec
from cnpf.quadrature import DiscMeasure, sphere_rule
from cnpf.series import Series, VectorSeries
from cnpf.spaces import inner_product, norm, norm_sq, norm_weights, normalize

H = KernelSpec.szego()
A0 = KernelSpec.bergman(0.0)


def test_monomial_norms():
    assert norm_sq(H, Series.monomial(5, 5)) == pytest.approx(1.0)
    assert norm_sq(A0, Series.monomial(5, 5)) == pytest.approx(1 / 6)
    DA = KernelSpec.drury_arveson(2)
    # ||z1 z2||^2 = 1!1!/2! in Drury-Arveson
    assert norm_sq(DA, Series.monomial((1, 1), 2)) == pytest.approx(0.5)


def test_inner_product_hermitian():
    rng = np.random.default_rng(0)
    f = Series(rng.standard_normal(8) + 1j * rng.standard_normal(8))
    g = Series(rng.standard_normal(8) + 1j * rng.standard_normal(8))
    assert inner_product(A0, f, g) == pytest.approx(np.conj(inner_product(A0, g, f)))
    assert inner_product(A0, f, f).real == pytest.approx(norm_sq(A0, f))


def test_inner_product_errors():
    with pytest.raises(OrderMismatch):
        inner_product(H, Series([1, 2]), Series([1, 2, 3]))
    with pytest.raises(DimensionMismatch):
        norm_weights(H, 3, dim=2)


def test_normalize():
    f = normalize(A0, Series([1, 2, 3]))
    assert norm(A0, f) == pytest.approx(1.0, rel=1e-15)
    F = normalize(H, VectorSeries([Series([1, 0]), Series([0, 1])]))
    assert norm_sq(H, F) == pytest.approx(1.0)


def test_bergman_norm_by_quadrature():
    # ||f||^2_{A^2_beta} = int |f|^2 (beta + 1)(1 - |z|^2)^beta dA
    rng = np.random.default_rng(1)
    for beta in (0.0, 1.0, 2.5):
        f = Series(rng.standard_normal(10) + 1j * rng.standard_normal(10))
        meas = DiscMeasure.weighted_bergman(beta, 32, 64)
        quad = meas.integrate(lambda p: np.abs(f.eval(p)) ** 2).real
        assert quad == pytest.approx(norm_sq(KernelSpec.bergman(beta), f), rel=1e-12)


def test_boundary_measure_is_h2_norm():
    f = Series([1, 2j, -1, 0.5])
    assert DiscMeasure.boundary(1.0, 64).integrate(lambda p: np.abs(f.eval(p)) ** 2).real == \
        pytest.approx(norm_sq(H, f), rel=1e-14)


def test_area_mass_and_atoms():
    assert DiscMeasure.area().total_mass() == pytest.approx(1.0, rel=1e-14)
    m = DiscMeasure.point_mass(0.5j, 2.0)
    assert m.integrate(lambda p: p) == pytest.approx(1j)


def test_budget():
    with pytest.raises(QuadratureBudgetExceeded):
        DiscMeasure.area(4000, 4000)


def test_negative_weights_rejected():
    with pytest.raises(ValueError):
        DiscMeasure.point_mass(0.0, -1.0)


def test_sphere_rule_moments():
    pts, w = sphere_rule(16, 16)
    assert np.sum(w) == pytest.approx(1.0, rel=1e-14)
    # int |w1|^2 d sigma = 1/2, int |w1|^2 |w2|^2 d sigma = 1/6
    assert np.sum(w * np.abs(pts[:, 0]) ** 2) == pytest.approx(0.5, rel=1e-14)
    assert np.sum(w * np.abs(pts[:, 0] * pts[:, 1]) ** 2) == pytest.approx(1 / 6, rel=1e-13)
    assert abs(np.sum(w * pts[:, 0] * np.conj(pts[:, 1]))) < 1e-15
    assert math.isclose(np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)), 0.0, abs_tol=1e-15)
