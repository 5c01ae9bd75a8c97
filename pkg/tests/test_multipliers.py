import math

import pytest

from cnpf.errors import DimensionMismatch
from cnpf.kernels import KernelSpec
from cnpf.multipliers import (
    carleson_check,
    diff_op_experiment,
    invariant_span_compare,
    multiplier_norm_lower_bound,
    sup_re_sarason,
)
from cnpf.quadrature import DiscMeasure
from cnpf.sarason import factorize_unit
from cnpf.series import Series

H = KernelSpec.szego()
HALF = Series([1, 1]) * (1 / math.sqrt(2))


def test_carleson_point_mass_at_origin():
    rep = carleson_check(H, DiscMeasure.point_mass(0.0))
    assert rep["sup_re"] == pytest.approx(1.0, rel=1e-14)
    assert rep["embedding_constant_estimate"] == pytest.approx(1.0, rel=1e-14)
    assert rep["random_ratio_max"] <= 1.0 + 1e-14


def test_carleson_point_mass_near_boundary():
    rep = carleson_check(H, DiscMeasure.point_mass(0.99), f_degree=400)
    kzz = 1 / (1 - 0.99 ** 2)
    assert rep["sup_re"] == pytest.approx(100.0, rel=1e-3)
    # finite sections of the point evaluation approach k(0.99, 0.99) from below
    assert 0.99 * kzz < rep["embedding_constant_estimate"] <= kzz


def test_carleson_area_dirichlet_finite():
    rep = carleson_check(KernelSpec.dirichlet(0.5), DiscMeasure.area(32, 64))
    assert math.isfinite(rep["sup_re"]) and math.isfinite(rep["embedding_constant_estimate"])
    assert rep["random_ratio_max"] <= rep["embedding_constant_estimate"] * (1 + 1e-12)


def test_carleson_needs_disc():
    with pytest.raises(DimensionMismatch):
        carleson_check(KernelSpec.drury_arveson(2), DiscMeasure.point_mass(0.0))


def test_lower_bound_constant_one():
    assert multiplier_norm_lower_bound(Series.constant(1.0, 0), H, H, 10) == pytest.approx(1.0, rel=1e-14)


def test_lower_bound_converges_to_sup_norm():
    b = [multiplier_norm_lower_bound(HALF, H, H, D) for D in (5, 20, 80)]
    assert b[0] < b[1] < b[2] <= math.sqrt(2) + 1e-12
    assert b[2] > 1.41


def test_lower_bound_drury_arveson_coordinate():
    DA = KernelSpec.drury_arveson(2, 40)
    b = multiplier_norm_lower_bound(Series.monomial((1, 0), 1), DA, DA, 12)
    assert b <= 1.0 + 1e-12 and b > 0.99


def test_diff_op_experiment_rows():
    rows = diff_op_experiment([("half", H, H, HALF)], degrees=(2, 4))
    assert rows[0]["sup_re_v"] == pytest.approx(2.0, rel=1e-5)
    assert rows[0]["lower_bounds"][0] <= rows[0]["lower_bounds"][1]


def test_sup_re_sarason_d2():
    DA = KernelSpec.drury_arveson(2, 20)
    assert sup_re_sarason(DA, DA, Series.monomial((0, 1), 1), n_points=256) == pytest.approx(1.0, rel=1e-12)


def test_span_identical_when_psi_zero():
    F = Series.monomial(1, 1)
    fact = factorize_unit(F, H, H)
    rep = invariant_span_compare(H, F, fact.phi, 5)
    assert rep["angle"] < 1e-7


def test_span_half_one_plus_z_converges():
    fact = factorize_unit(HALF, H, H)
    a = [invariant_span_compare(H, HALF, fact.phi, D)["angle"] for D in (5, 15, 30)]
    assert a[0] > a[1] > a[2] and a[2] < 1e-6


def test_span_negative_control():
    rep = invariant_span_compare(H, Series.monomial(1, 1), Series.constant(1.0, 1), 20)
    assert rep["angle"] > 1.0
