"""Acceptance criteria 1-12; each test records one PASS/FAIL line."""

import math
import subprocess
import sys
import time

import numpy as np

from cnpf.certify import multiplier_norm_cert, psd_check
from cnpf.dirichlet import mu_alpha, norm_oracle, shimorin_re_v, unbounded_demo
from cnpf.kernels import (
    KernelSpec,
    PointSet,
    cnp_row_function,
    convolution_identity_residual,
    diagonal_coeffs,
)
from cnpf.presets import PRESETS
from cnpf.sarason import (
    contractivity_check,
    extremal_bound_check,
    extremal_check,
    factorize,
    factorize_unit,
    main_lemma_psd,
    majorant_check,
    random_function,
    sarason_by_quadrature,
    sarason_function,
    uniqueness_kernel_psd,
)
from cnpf.series import Series

PAIRS = [
    ("szego/szego", KernelSpec.szego(), KernelSpec.szego()),
    ("bergman/szego", KernelSpec.bergman(0.0), KernelSpec.szego()),
    ("bergman/dirichlet", KernelSpec.bergman(0.0), KernelSpec.dirichlet(0.5)),
    ("da2/da2", KernelSpec.drury_arveson(2, 60), KernelSpec.drury_arveson(2, 60)),
    ("hardyball2/da2", KernelSpec.hardy_ball(2, 60), KernelSpec.drury_arveson(2, 60)),
]
# polynomial degree of the test functions in criteria 4-6
DEGREE = {1: 30, 2: 6}


def _F(k, seed):
    return random_function(k, DEGREE[k.dimension], np.random.default_rng([seed, 0]))


def _polar(n_side, radius):
    r = radius * np.arange(n_side) / (n_side - 1)
    th = 2 * np.pi * np.arange(n_side) / n_side
    return (r[:, None] * np.exp(1j * th[None, :])).ravel()


def test_criterion_01_exact_anchor(verdict):
    t0 = time.perf_counter()
    H = KernelSpec.szego()
    f = Series([1, 1]) * (1 / math.sqrt(2))
    V = sarason_function(H, H, f).v
    v_err = float(np.max(np.abs(V.pad(3).coeffs - [1, 1, 0, 0])))
    fact = factorize_unit(f, H, H)
    M = fact.psi.order
    n = np.arange(M + 1)
    geo = (-0.5) ** n / 2                      # 1/(2+z)
    psi_exact = np.concatenate([[0], geo[:-1]])
    phi_exact = math.sqrt(2) * (geo + np.concatenate([[0], geo[:-1]]))
    c_err = max(np.max(np.abs(fact.psi.coeffs - psi_exact)),
                np.max(np.abs(fact.phi[0].coeffs - phi_exact)))
    zeta = np.exp(2j * np.pi * np.arange(256) / 256)
    b_err = float(np.max(np.abs(np.abs(fact.psi.eval(zeta)) ** 2
                                + np.abs(fact.phi[0].eval(zeta)) ** 2 - 1)))
    dt = time.perf_counter() - t0
    ok = v_err < 1e-12 and c_err < 1e-10 and b_err < 1e-10 and dt < 1.0
    verdict(1, ok, f"V err {v_err:.1e}, psi/Phi coeff err {c_err:.1e}, "
                   f"boundary err {b_err:.1e}, {dt:.2f} s")


def test_criterion_02_cnp_identity(verdict):
    t0 = time.perf_counter()
    res = max(convolution_identity_residual(KernelSpec.dirichlet(a, 200), 200) for a in (0.25, 0.5, 0.75))
    bmin = min(float(cnp_row_function(KernelSpec.dirichlet(a, 500), 500, tol=np.inf).min())
               for a in (0.25, 0.5, 0.75))
    dt = time.perf_counter() - t0
    verdict(2, res < 1e-12 and bmin >= -1e-14 and dt < 5.0,
            f"residual {res:.1e}, min b_n {bmin:.1e}, {dt:.2f} s")


def test_criterion_03_reconstruction(verdict):
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for p, (name, k, s) in enumerate(PAIRS):
        for i in range(10):
            F = random_function(k, 30, np.random.default_rng([3, p, i]))
            for a in (1.0, 2 + 1j):
                fact = factorize(F, a, k, s)
                worst = max(worst, fact.certificates["reconstruction_residual"])
            count += 1
    dt = time.perf_counter() - t0
    verdict(3, worst < 1e-8 and dt < 30.0, f"{count} functions, max residual {worst:.1e}, {dt:.1f} s")


def test_criterion_04_contractivity(verdict):
    worst = np.inf
    for p, (name, k, s) in enumerate(PAIRS):
        F = _F(k, 4 + p)
        for a in (1.0, 2 + 1j):
            rep = contractivity_check(factorize(F, a, k, s), s, k, trials=100, seed=p)
            worst = min(worst, rep["min_slack"])
    verdict(4, worst >= -1e-6, f"min slack {worst:.2e} over 100 h x 2 values of a x 5 pairs")


def test_criterion_05_main_lemma(verdict):
    worst, ok = np.inf, True
    for p, (name, k, s) in enumerate(PAIRS):
        F = _F(k, 5 + p)
        for i in range(10):
            pts = PointSet.random(15, k.dimension, 0.9, rng=np.random.default_rng([5, p, i]))
            rep = main_lemma_psd(k, s, F, pts)
            ok &= rep.passed
            worst = min(worst, rep.min_eigenvalue / max(1.0, rep.trace))
    verdict(5, ok, f"10 sets x 5 pairs, min eigenvalue / trace {worst:.1e}")


def test_criterion_06_majorant(verdict):
    ok, worst, chains = True, np.inf, 0
    for p, (name, k, s) in enumerate(PAIRS):
        F = _F(k, 6 + p)
        if k.dimension == 1:
            Z = _polar(100, 0.99)
        else:
            Z = PointSet.random(10_000, 2, 0.95, rng=np.random.default_rng([6, p])).points
        rep = majorant_check(k, s, F, Z)
        ok &= rep["passed"] and len(Z) == 10_000
        worst = min(worst, rep["min_slack"])
        if k is not s and k.family == s.family:
            chains += 1
            ok &= bool(np.all(np.isfinite(rep["mid"])))
    verdict(6, ok and chains == 2, f"10^4 points x 5 pairs, min slack {worst:.2e}, "
                                   f"three-term chain on {chains} pairs with k = s")


def test_criterion_07_quadrature(verdict):
    k, s = KernelSpec.bergman(0.0), KernelSpec.szego()
    F = random_function(k, 10, np.random.default_rng([7, 0]))
    Z = PointSet.random(50, 1, 0.9, rng=np.random.default_rng([7, 1])).points[:, 0]
    c = sarason_function(k, s, F).v.eval(Z)
    e1 = float(np.max(np.abs(sarason_by_quadrature(k, F, Z) - c) / np.abs(c)))
    k2, s2 = KernelSpec.hardy_ball(2, 40), KernelSpec.drury_arveson(2, 40)
    F2 = random_function(k2, 4, np.random.default_rng([7, 2]))
    Z2 = PointSet.random(20, 2, 0.6, rng=np.random.default_rng([7, 3])).points
    c2 = sarason_function(k2, s2, F2).v.eval(Z2)
    e2 = float(np.max(np.abs(sarason_by_quadrature(k2, F2, Z2) - c2) / np.abs(c2)))
    verdict(7, e1 < 1e-6 and e2 < 1e-4, f"Bergman d=1 rel err {e1:.1e} (50 pts), "
                                         f"HardyBall d=2 rel err {e2:.1e} (20 pts)")


def test_criterion_08_dirichlet_oracle(verdict):
    e_norm, e_sh = 0.0, 0.0
    for i, alpha in enumerate((0.25, 0.5, 0.75)):
        meas = mu_alpha(alpha, 256, 256)
        for n in range(31):
            lhs, rhs = norm_oracle(alpha, n, meas)
            e_norm = max(e_norm, abs(lhs - rhs) / rhs)
        k = KernelSpec.dirichlet(alpha, 200)
        f = random_function(k, 8, np.random.default_rng([8, i]))[0]
        Z = PointSet.random(20, 1, 0.9, rng=np.random.default_rng([8, i, 1])).points[:, 0]
        co = np.real(sarason_function(k, k, f).v.eval(Z))
        e_sh = max(e_sh, float(np.max(np.abs(shimorin_re_v(alpha, f, Z, meas) - co) / np.abs(co))))
    verdict(8, e_norm < 1e-6 and e_sh < 1e-5,
            f"norm identity rel err {e_norm:.1e} (n <= 30, 3 alphas), Shimorin rel err {e_sh:.1e}")


def test_criterion_09_unbounded_demo(verdict):
    t0 = time.perf_counter()
    demo = unbounded_demo(0.5, 12, 2 ** 20)
    dt = time.perf_counter() - t0
    v = demo["verdicts"]
    ok = v["t_floor"] and v["S_increasing"] and v["re_v_increasing"] and v["re_v_growth_5x"] and dt < 120
    sup = [r["sup_re_v"] for r in demo["rows"][1:]]
    verdict(9, ok, f"t floor {v['t_floor']}, S_J increasing {v['S_increasing']}, "
                   f"sup Re V increasing {v['re_v_increasing']}, growth {demo['re_v_growth']:.3f} "
                   f"(J=1 {sup[0]:.3f}, J=12 {sup[-1]:.3f}), {dt:.1f} s")


def test_criterion_10_extremal(verdict):
    H = KernelSpec.szego()
    DA = KernelSpec.drury_arveson(2, 40)
    g = (2, 1)
    mono = Series.monomial(g, 3, math.sqrt(diagonal_coeffs(DA, 3)[g]))
    cases = [(H, Series.constant(1.0, 1)), (H, Series.monomial(1, 1)), (DA, mono)]
    ok, dev, vdev = True, 0.0, 0.0
    for k, F in cases:
        ex = extremal_check(k, F, 10)
        ok &= ex["extremal"]
        dev = max(dev, ex["deviation"])
        if k.dimension == 1:
            Z = _polar(40, 0.99)
        else:
            Z = PointSet.random(400, 2, 0.99, rng=np.random.default_rng([10, 0])).points
        vdev = max(vdev, float(np.max(np.abs(sarason_function(k, k, F).v.eval(Z) - 1.0))))
        ok &= extremal_bound_check(k, k, F, Z)["passed"]
    verdict(10, ok and vdev < 1e-8, f"extremal deviation {dev:.1e}, max |V - 1| {vdev:.1e}, pointwise bounds hold")


def test_criterion_11_negative_controls(verdict):
    a = not psd_check(np.array([[1.0, 2.0], [2.0, 1.0]])).passed
    H = KernelSpec.szego()
    pts = PointSet.random(8, 1, 0.9, rng=np.random.default_rng([11, 0]))
    b = not multiplier_norm_cert(Series.constant(2.0, 0), H, H, pts, A=1.0).passed
    f = Series([1, 1]) * (1 / math.sqrt(2))
    fact = factorize_unit(f, H, H)
    wrong = fact.psi + Series.monomial(2, fact.psi.order, 0.3)
    u = uniqueness_kernel_psd(H, H, f, wrong, pts)
    c = not (u["psd"].passed and u["recovery_ok"])
    good = uniqueness_kernel_psd(H, H, f, fact.psi, pts)
    d = good["psd"].passed and good["recovery_ok"]
    verdict(11, a and b and c and d, f"psd [[1,2],[2,1]] refuted {a}, phi=2 A=1 refuted {b}, "
                                     f"wrong psi refuted {c} (true psi accepted {d})")


def _run_all(out, seed):
    blobs = {}
    for name in sorted(PRESETS):
        d = out / name
        cmd = PRESETS[name]["command"]
        subprocess.run([sys.executable, "-m", "cnpf", cmd, "--preset", name, "--seed", str(seed),
                        "--out", str(d)], check=False, capture_output=True)
        blobs[name] = (d / "report.json").read_bytes()
    return blobs


def test_criterion_12_determinism(verdict, tmp_path):
    first = _run_all(tmp_path / "a", 7)
    second = _run_all(tmp_path / "b", 7)
    same = [n for n in first if first[n] == second[n]]
    verdict(12, len(same) == len(PRESETS), f"{len(same)}/{len(PRESETS)} preset reports byte-identical")
