import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cnpf.certify import psd_check
from cnpf.errors import (
    AlphaOutOfRange,
    NonNormalized,
    NotCNP,
    NumericOverflow,
    PointOutsideDomain,
    UnsupportedFamily,
)
from cnpf.kernels import (
    KernelSpec,
    PointSet,
    cnp_row_function,
    convolution_identity_residual,
    diagonal_coeffs,
    gram_matrix,
    kernel_eval,
)

ALL = [
    KernelSpec.szego(),
    KernelSpec.drury_arveson(2),
    KernelSpec.drury_arveson(3),
    KernelSpec.bergman(0.0),
    KernelSpec.bergman(1.5),
    KernelSpec.hardy_ball(2),
    KernelSpec.hardy_polydisc(2),
    KernelSpec.dirichlet(0.25),
    KernelSpec.dirichlet(0.75),
    KernelSpec.power(KernelSpec.szego(), 1.5),
]


def test_szego_value():
    assert kernel_eval(KernelSpec.szego(), 0.5, 0.5) == pytest.approx(4 / 3, rel=1e-15)


def test_drury_arveson_orthogonal_points():
    assert kernel_eval(KernelSpec.drury_arveson(2), [0.5, 0], [0, 0.5]) == 1


def test_bergman_base_point():
    assert kernel_eval(KernelSpec.bergman(0), 0.6, 0) == 1


def test_bergman_closed_form():
    z, w = 0.3 + 0.2j, -0.5j
    ref = (1 - z * np.conj(w)) ** -3.5
    assert abs(kernel_eval(KernelSpec.bergman(1.5), z, w) - ref) < 1e-14


def test_point_outside_domain():
    with pytest.raises(PointOutsideDomain):
        kernel_eval(KernelSpec.szego(), 1.0, 0.0)
    with pytest.raises(PointOutsideDomain):
        kernel_eval(KernelSpec.drury_arveson(2), [0.8, 0.8], [0, 0])
    # polydisc accepts what the ball rejects
    kernel_eval(KernelSpec.hardy_polydisc(2), [0.8, 0.8], [0, 0])


def test_overflow_guard():
    with pytest.raises(NumericOverflow):
        kernel_eval(KernelSpec.szego(), 1 - 1e-15, 1 - 1e-15)


def test_szego_coefficients():
    assert np.array_equal(diagonal_coeffs(KernelSpec.szego(), 3).values, np.ones(4))


def test_bergman_coefficients():
    assert np.allclose(diagonal_coeffs(KernelSpec.bergman(0), 10).values, np.arange(1, 12))


def test_dirichlet_first_coefficients():
    for a in (0.25, 0.5, 0.75):
        c = diagonal_coeffs(KernelSpec.dirichlet(a), 1).values
        assert c[0] == 1
        assert c[1] == pytest.approx((a + 1) / (a + 2), rel=1e-15)


def test_dirichlet_coefficient_oracle():
    # frozen from a 30-digit Gamma-function evaluation
    c = diagonal_coeffs(KernelSpec.dirichlet(0.5), 400).values
    assert c[100] == pytest.approx(0.10173759746898456411, rel=1e-13)
    assert c[400] == pytest.approx(0.053453230033741157775, rel=1e-13)
    assert 1.0224 < c[100] * 101 ** 0.5 < 1.0225


def test_drury_arveson_multinomial():
    c = diagonal_coeffs(KernelSpec.drury_arveson(2), 4)
    assert c[(2, 2)] == 6 and c[(1, 3)] == 4 and c[(4, 0)] == 1


def test_custom_too_short():
    with pytest.raises(UnsupportedFamily):
        diagonal_coeffs(KernelSpec.custom([1, 1, 1]), 5)


def test_alpha_range():
    with pytest.raises(AlphaOutOfRange):
        KernelSpec.dirichlet(1.0)


def test_szego_row_function():
    b = cnp_row_function(KernelSpec.szego(), 10)
    assert np.array_equal(b, np.eye(11)[1])


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_dirichlet_is_cnp(alpha):
    b = cnp_row_function(KernelSpec.dirichlet(alpha), 500, tol=np.inf)
    assert b[0] == 0 and np.all(b >= -1e-14)


def test_custom_not_cnp_matches_long_division():
    # long division of 1 by 1 + 2x + x^2 + ... gives b = 0, 2, -3, 5, -8, ... (exact rationals)
    spec = KernelSpec.custom([1, 2] + [1] * 11)
    b = cnp_row_function(spec, 12, tol=np.inf)
    assert np.array_equal(b, [0, 2, -3, 5, -8, 13, -21, 34, -55, 89, -144, 233, -377])
    with pytest.raises(NotCNP) as e:
        cnp_row_function(spec, 12)
    assert e.value.index == 2 and e.value.value == -3


def test_non_normalized():
    with pytest.raises(NonNormalized):
        cnp_row_function(KernelSpec.custom([2, 1, 1]), 2)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_convolution_identity(alpha):
    assert convolution_identity_residual(KernelSpec.dirichlet(alpha), 200) < 1e-12


@pytest.mark.parametrize("t", [1, 1.5, 2, 3])
@pytest.mark.parametrize("base", [KernelSpec.szego(), KernelSpec.dirichlet(0.5)])
def test_power_coefficients_positive(t, base):
    c = KernelSpec.power(base, t).profile(200)
    assert np.all(c > 0)


def test_power_matches_closed_form():
    c = KernelSpec.power(KernelSpec.szego(), 2).profile(20)
    assert np.allclose(c, np.arange(1, 22))


def test_gram_small_sets():
    s = KernelSpec.szego()
    assert np.allclose(gram_matrix(s, PointSet(np.array([0.0]))), [[1]])
    assert np.allclose(gram_matrix(s, PointSet(np.array([0.0, 0.5]))), [[1, 1], [1, 4 / 3]])


@pytest.mark.parametrize("spec", ALL, ids=repr)
def test_gram_psd(spec):
    dom = "polydisc" if spec.geometry == "polydisc" else None
    for seed in range(3):
        P = PointSet.random(20, spec.dimension, 0.9, dom, np.random.default_rng(seed))
        G = gram_matrix(spec, P)
        assert np.array_equal(G, G.conj().T)
        lam = np.linalg.eigvalsh(G)[0]
        assert lam >= -1e-12 * np.trace(G).real


def test_json_roundtrip():
    spec = KernelSpec.power(KernelSpec.dirichlet(0.5, 50), 2)
    again = KernelSpec.from_json(spec.to_json())
    assert again.family == "power" and np.allclose(again.profile(30), spec.profile(30))


def test_spec_names():
    assert KernelSpec.from_json({"family": "DirichletAlpha", "params": {"alpha": 0.5}}).family == "dirichlet"


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_schur_product_closure(seed):
    rng = np.random.default_rng(seed)
    P = PointSet.random(12, 1, 0.9, rng=rng)
    G = gram_matrix(KernelSpec.bergman(0.5), P) * gram_matrix(KernelSpec.dirichlet(0.5), P)
    assert psd_check(G).passed
