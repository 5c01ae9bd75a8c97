"""Command line runner: cnpf {kernel,factorize,sarason,dirichlet,carleson}.

Each run writes report.json (deterministic: verdicts, residuals, config
echo, version), timing.json (wall clock) and plot-ready CSV tables into the
output directory.  Exit status: 0 all checks pass, 1 a check failed,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .certify import psd_check, quotient_kernel_psd
from .errors import CheckFailed, CnpfError, ConfigParse, UnsupportedFamily
from .kernels import (
    KernelSpec,
    PointSet,
    cnp_row_function,
    convolution_identity_residual,
    diagonal_coeffs,
    gram_matrix,
)
from .presets import PRESETS, get_preset
from .quadrature import DiscMeasure
from .series import Series, VectorSeries, format_float, multi_indices

COMMANDS = ("kernel", "factorize", "sarason", "dirichlet", "carleson")


# serialization ------------------------------------------------------------

def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, KernelSpec):
        return obj.to_json()
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2) + "\n"


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "pass" if x else "fail"
    if isinstance(x, (float, np.floating)):
        return format_float(float(x))
    if x is None:
        return ""
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


class Run:
    """Collects checks and output files of one subcommand."""

    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.checks: list[dict] = []
        self.info: dict = {}
        self.files: dict[str, str] = {}

    def check(self, name: str, passed: bool, **details):
        self.checks.append({"name": name, "passed": bool(passed), **details})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def report(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "passed": self.passed,
            "checks": self.checks,
            "info": self.info,
            "config": self.config,
        }


# config parsing -------------------------------------------------------------

def _spec(cfg: dict, key: str, required: bool = True):
    if key not in cfg:
        if required:
            raise ConfigParse(f"missing kernel spec {key!r}")
        return None
    try:
        return KernelSpec.from_json(cfg[key])
    except (KeyError, TypeError, ValueError, UnsupportedFamily) as e:
        raise ConfigParse(f"bad kernel spec {key!r}: {e}") from e


def _seed(cfg: dict) -> int:
    s = cfg.get("seed", 0)
    if not isinstance(s, int) or s < 0:
        raise ConfigParse("seed must be a nonnegative integer")
    return s


def _rows_to_series(rows, d: int) -> Series:
    if not isinstance(rows, list) or not rows:
        raise ConfigParse("coefficient list must be a nonempty list of [index, re, im]")
    try:
        idx = [r[0] if isinstance(r[0], list) else [r[0]] for r in rows]
        order = max(sum(i) for i in idx)
        return Series.from_json(rows, order=max(order, 1), dim=d)
    except (TypeError, ValueError, IndexError) as e:
        raise ConfigParse(f"bad coefficients: {e}") from e


def _function(cfg: dict, k: KernelSpec) -> VectorSeries:
    from .sarason import random_function
    src = cfg.get("function")
    if not isinstance(src, dict):
        raise ConfigParse("missing 'function' source")
    d = k.dimension
    if "coeffs" in src:
        return VectorSeries([_rows_to_series(src["coeffs"], d)])
    if "components" in src:
        comps = [_rows_to_series(rows, d) for rows in src["components"]]
        N = max(c.order for c in comps)
        return VectorSeries([c.pad(N) for c in comps])
    if "random" in src:
        r = src["random"]
        rng = np.random.default_rng([_seed(cfg), 0])
        return random_function(k, int(r.get("degree", 10)), rng, int(r.get("components", 1)))
    raise ConfigParse("function source must be one of coeffs, components, random")


def _grid(cfg: dict, d: int, default_radius: float = 0.9) -> np.ndarray:
    g = cfg.get("grid", {})
    if not isinstance(g, dict):
        raise ConfigParse("grid must be an object")
    radius = float(g.get("radius", default_radius))
    if not 0.0 <= radius < 1.0:
        raise ConfigParse("grid radius cap must lie in [0, 1)")
    if "points" in g:
        pts = np.asarray(g["points"], dtype=float)
        if pts.size == 0:
            raise ConfigParse("empty grid")
        z = pts[..., 0] + 1j * pts[..., 1]
        return z.reshape(-1) if d == 1 else z.reshape(-1, d)
    if d == 1:
        nr, na = int(g.get("n_radial", 100)), int(g.get("n_angular", 100))
        if nr <= 0 or na <= 0:
            raise ConfigParse("empty grid")
        r = radius * np.arange(nr) / max(nr - 1, 1)
        th = 2 * np.pi * np.arange(na) / na
        return (r[:, None] * np.exp(1j * th[None, :])).ravel()
    n = int(g.get("n_points", 400))
    if n <= 0:
        raise ConfigParse("empty grid")
    rng = np.random.default_rng([_seed(cfg), 1])
    return PointSet.random(n, d, radius, rng=rng).points


def _point_sets(cfg: dict, d: int, tag: int):
    n_sets = int(cfg.get("point_sets", 10))
    n = int(cfg.get("points", 15))
    radius = float(cfg.get("radius", 0.9))
    if n <= 0 or n_sets <= 0:
        raise ConfigParse("point sets must be nonempty")
    return [PointSet.random(n, d, radius, rng=np.random.default_rng([_seed(cfg), tag, i]))
            for i in range(n_sets)]


def _zcols(Z: np.ndarray, d: int):
    Z = Z.reshape(len(Z), -1) if d > 1 else Z.reshape(-1, 1)
    header = ["re_z", "im_z"] if d == 1 else [h for i in range(d) for h in (f"re_z{i + 1}", f"im_z{i + 1}")]
    cols = [c for i in range(d) for c in (Z[:, i].real, Z[:, i].imag)]
    return header, cols


def _index_label(g) -> str:
    return str(g[0]) if len(g) == 1 else "-".join(str(x) for x in g)


# subcommands ----------------------------------------------------------------

def cmd_kernel(run: Run, cfg: dict):
    k = _spec(cfg, "k")
    s = _spec(cfg, "s", required=False)
    tol = float(cfg.get("tol", 1e-10))
    N = int(cfg.get("N", k.truncation_order))
    dc = diagonal_coeffs(k, N)
    rows = [[_index_label(g), dc[g]] for g in multi_indices(k.dimension, N)]
    header = ["index", "c"]
    if k.is_normalized_cnp and k.geometry == "ball":
        b = cnp_row_function(k, N, tol=np.inf)
        neg = np.nonzero(b < -1e-14)[0]
        run.check("cnp_row_nonnegative", neg.size == 0, N=N, min_b=float(b.min()),
                  first_negative=int(neg[0]) if neg.size else None)
        res = convolution_identity_residual(k, N)
        run.check("convolution_identity", res < 1e-12, residual=res)
        if k.dimension == 1:
            header.append("b")
            for row, bn in zip(rows, b):
                row.append(bn)
    run.files["coefficients.csv"] = csv_text(header, rows)
    worst = None
    for P in _point_sets(cfg, k.dimension, 10):
        rep = psd_check(gram_matrix(k, P), tol)
        if worst is None or rep.min_eigenvalue < worst.min_eigenvalue:
            worst = rep
        if not rep.passed:
            worst = rep
            break
    run.check("gram_psd", worst.passed, report=worst)
    if s is not None:
        worst = None
        for P in _point_sets(cfg, k.dimension, 11):
            rep = quotient_kernel_psd(k, s, P, tol)
            if worst is None or not rep.passed or rep.min_eigenvalue < worst.min_eigenvalue:
                worst = rep
            if not rep.passed:
                break
        run.check("quotient_psd", worst.passed, report=worst, s=s)


def cmd_factorize(run: Run, cfg: dict, embed=None):
    from .sarason import (
        contractivity_check,
        factorize,
        factorize_unit,
        main_lemma_psd,
        uniqueness_kernel_psd,
    )
    from .spaces import norm_sq
    k = _spec(cfg, "k")
    s = _spec(cfg, "s")
    F = _function(cfg, k)
    seed = _seed(cfg)
    if embed is None and cfg.get("embed") is not None:
        e = cfg["embed"]
        embed = complex(e[0], e[1]) if isinstance(e, list) and len(e) == 2 and k.dimension == 1 else e
    a = cfg.get("a")
    nsq = norm_sq(k, F)
    unit = a is None or embed is not None
    if unit:
        if embed is None and abs(math.sqrt(nsq) - 1.0) > 1e-10:
            F = VectorSeries([c * (1.0 / math.sqrt(nsq)) for c in F])
            run.info["normalized_input"] = True
        fact = factorize_unit(F, k, s, embed=embed)
        run.check("psi_at_base_zero", fact.certificates["psi_at_base_ok"],
                  psi_at_base=fact.certificates["psi_at_base"])
    else:
        fact = factorize(F, complex(a[0], a[1]), k, s)
    rec = fact.certificates["reconstruction_residual"]
    run.check("reconstruction", rec < 1e-8, residual=rec)
    con = contractivity_check(fact, s, k, trials=int(cfg.get("trials", 100)), seed=seed,
                              degree=int(cfg.get("degree", 20)))
    run.check("contractivity", con["passed"], min_slack=con["min_slack"], witness_trial=con["witness_trial"])
    worst = None
    for P in _point_sets(cfg, k.dimension, 20):
        rep = main_lemma_psd(k, s, F, P, float(cfg.get("tol", 1e-10)))
        if worst is None or not rep.passed or rep.min_eigenvalue < worst.min_eigenvalue:
            worst = rep
        if not rep.passed:
            break
    run.check("main_lemma_psd", worst.passed, report=worst)
    if unit and embed is None:
        P = _point_sets({**cfg, "point_sets": 1}, k.dimension, 21)[0]
        u = uniqueness_kernel_psd(k, s, F, fact.psi, P)
        run.check("uniqueness", u["psd"].passed and u["recovery_ok"], report=u["psd"],
                  recovery_error=u["recovery_error"], base_column_max=u["base_column_max"])
    run.files["factorization.json"] = dumps(fact.to_json())
    run.files["psi.csv"] = csv_text(["index", "re", "im"], [[_index_label(g), c.real, c.imag]
                                                           for g, c in fact.psi.items()])
    rows = []
    for i, comp in enumerate(fact.phi):
        rows += [[i, _index_label(g), c.real, c.imag] for g, c in comp.items()]
    run.files["phi.csv"] = csv_text(["component", "index", "re", "im"], rows)
    run.info["order"] = fact.certificates["order"]
    run.info["norm_sq"] = nsq


def cmd_sarason(run: Run, cfg: dict):
    from .sarason import extremal_check, majorant_check, sarason_by_quadrature, sarason_function
    k = _spec(cfg, "k")
    s = _spec(cfg, "s")
    F = _function(cfg, k)
    d = k.dimension
    Z = _grid(cfg, d)
    sd = sarason_function(k, s, F)
    v0 = sd.v.coeffs[(0,) * d]
    run.check("v_at_base_equals_norm", abs(v0 - sd.norm_sq) <= 1e-14 * max(1.0, sd.norm_sq),
              v0=v0, norm_sq=sd.norm_sq)
    run.files["v.csv"] = csv_text(["index", "re", "im"], [[_index_label(g), c.real, c.imag]
                                                         for g, c in sd.v.items()])
    maj = majorant_check(k, s, F, Z, tol=float(cfg.get("majorant_tol", 1e-8)))
    header, cols = _zcols(Z, d)
    rows = list(zip(*cols, maj["lhs"], maj["mid"], maj["rhs"], maj["verdict"]))
    rows = [[x if not (isinstance(x, float) and math.isnan(x)) else None for x in r] for r in rows]
    run.files["majorant.csv"] = csv_text(header + ["lhs", "mid", "rhs", "verdict"], rows)
    run.check("majorant", maj["passed"], min_slack=maj["min_slack"], points=len(Z))
    run.info["extremal"] = extremal_check(k, F, int(cfg.get("extremal_degree", 10)))
    quad_ok = (k.family == "bergman" and s.family == "szego") or \
              (k.family == "szego" and s.family == "szego") or \
              (k.family == "hardy_ball" and d == 2 and s.family == "drury_arveson")
    if quad_ok and cfg.get("quadrature", True):
        n = int(cfg.get("quadrature_points", 50 if d == 1 else 20))
        Zq = Z[np.linspace(0, len(Z) - 1, min(n, len(Z))).astype(int)]
        q = sarason_by_quadrature(k, F, Zq)
        c = sd.v.eval(Zq)
        rel = float(np.max(np.abs(q - c) / np.maximum(np.abs(c), 1e-300)))
        limit = 1e-6 if d == 1 else 1e-4
        run.check("quadrature_cross_validation", rel < limit, rel_err=rel, points=len(Zq))


def cmd_dirichlet(run: Run, cfg: dict):
    from .dirichlet import (
        norm_oracle,
        mu_alpha,
        s1_properties_check,
        shimorin_re_v,
        unbounded_demo,
    )
    from .sarason import random_function, sarason_function
    alpha = float(cfg.get("alpha", 0.5))
    J = int(cfg.get("J", 12))
    if J < 1:
        raise ConfigParse("J must be at least 1")
    k = KernelSpec.dirichlet(alpha, int(cfg.get("N", 500)))
    b = cnp_row_function(k, k.truncation_order, tol=np.inf)
    run.check("cnp_row_nonnegative", bool(np.all(b >= -1e-14)), N=k.truncation_order, min_b=float(b.min()))
    meas = mu_alpha(alpha, 256, 256)
    rel = [abs(lhs - rhs) / rhs for lhs, rhs in (norm_oracle(alpha, n, meas) for n in range(31))]
    run.check("norm_oracle", max(rel) < 1e-6, max_rel_err=max(rel))
    props = s1_properties_check(alpha, eps=float(cfg.get("eps", 0.5)))
    run.check("s1_properties", props["re_gt_half"] and props["ratio_stable"] and props["deriv_stable"]
              and props["sector_ok"], **props)
    rng = np.random.default_rng([_seed(cfg), 30])
    f = random_function(k, 8, rng)[0]
    Z = PointSet.random(20, 1, 0.9, rng=np.random.default_rng([_seed(cfg), 31])).points[:, 0]
    sh = shimorin_re_v(alpha, f, Z, meas)
    co = np.real(sarason_function(k, k, f).v.eval(Z))
    err = float(np.max(np.abs(sh - co) / np.abs(co)))
    run.check("shimorin_vs_coefficient_rule", err < 1e-5, max_rel_err=err)

    demo = unbounded_demo(alpha, J, int(cfg.get("n_coeffs", 2 ** 20)), eps=props["eps_alpha"])
    v = demo["verdicts"]
    run.check("t_floor", v["t_floor"], calibrated_floor=demo["calibrated_floor"])
    run.check("S_increasing", v["S_increasing"], interpolation_delta=demo["interpolation_delta"])
    run.check("re_v_increasing", v["re_v_increasing"])
    run.check("re_v_growth_5x", v["re_v_growth_5x"], growth=demo["re_v_growth"])
    run.check("estimate_below_ratio_positive", v["ratio_positive"], spread=demo["ratio_spread"])
    cols = ["n", "z_n", "w_n", "one_minus_w_n", "t_n", "S_n", "S_n_own", "norm_sq", "sup_re_v",
            "argmax_r", "horn_integral", "ratio"]
    run.files["growth.csv"] = csv_text(cols, [[r[c] for c in cols] for r in demo["rows"]])
    curves = demo["curves"]
    run.files["re_v_curves.csv"] = csv_text(["r"] + [f"J{j}" for j in range(J + 1)],
                                            [[r] + [c[i] for c in curves] for i, r in enumerate(demo["r_grid"])])
    run.info["bands"] = {"ratio": props["ratio_band"], "derivative_ratio": props["deriv_ratio_band"],
                         "eps_alpha": props["eps_alpha"], "delta_alpha": props["delta_alpha"]}


def _measure(m: dict) -> DiscMeasure:
    if not isinstance(m, dict) or "type" not in m:
        raise ConfigParse("measure needs a 'type'")
    t = m["type"]
    nr, na = int(m.get("n_radial", 64)), int(m.get("n_angular", 128))
    if t == "point_mass":
        z = m.get("z", [0.0, 0.0])
        return DiscMeasure.point_mass(complex(z[0], z[1]), float(m.get("mass", 1.0)))
    if t == "area":
        return DiscMeasure.area(nr, na)
    if t == "bergman":
        return DiscMeasure.weighted_bergman(float(m.get("beta", 0.0)), nr, na)
    if t == "mu_alpha":
        return DiscMeasure.mu_alpha(float(m["alpha"]), nr, na)
    if t == "boundary":
        return DiscMeasure.boundary(float(m.get("mass", 1.0)), int(m.get("n", 1024)))
    raise ConfigParse(f"unknown measure type {t!r}")


def cmd_carleson(run: Run, cfg: dict):
    from .multipliers import carleson_check, diff_op_experiment
    s = _spec(cfg, "s")
    meas = _measure(cfg.get("measure"))
    rep = carleson_check(s, meas, f_degree=int(cfg.get("f_degree", 60)), trials=int(cfg.get("trials", 20)),
                         seed=_seed(cfg))
    C = rep["embedding_constant_estimate"]
    run.check("carleson_finite", math.isfinite(rep["sup_re"]) and math.isfinite(C), **rep)
    run.check("random_below_constant", rep["random_ratio_max"] <= C * (1 + 1e-12))
    mult = cfg.get("multiplier")
    if mult:
        k = _spec(cfg, "k", required=False) or s
        F = _function({**cfg, "function": mult["function"]}, k)
        rows = diff_op_experiment([("F", k, s, F)], tuple(mult.get("degrees", (5, 10, 20))))
        lb = rows[0]["lower_bounds"]
        run.check("finite_sections_monotone", all(y >= x - 1e-12 for x, y in zip(lb, lb[1:])), **rows[0])
        run.files["multiplier.csv"] = csv_text(["degree", "lower_bound", "sup_re_v"],
                                               [[D, x, rows[0]["sup_re_v"]] for D, x in zip(rows[0]["degrees"], lb)])


# driver -----------------------------------------------------------------------

def _parse_embed(text):
    if text is None:
        return None
    try:
        parts = [complex(p.replace("i", "j")) for p in text.split(",")]
    except ValueError as e:
        raise ConfigParse(f"bad --embed value {text!r}") from e
    return parts[0] if len(parts) == 1 else np.array(parts)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cnpf", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from a named configuration")
    p.add_argument("--out", type=Path, default=Path("cnpf-out"), help="output directory")
    p.add_argument("--seed", type=int, help="PRNG seed (overrides the config)")
    p.add_argument("--embed", help="sub-unit factorization through the kernel at W (comma separated for d > 1)")
    return p


def load_config(args) -> dict:
    cfg = get_preset(args.preset) if args.preset else {}
    if args.config is not None:
        try:
            user = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigParse(f"cannot read config: {e}") from e
        if not isinstance(user, dict):
            raise ConfigParse("config must be a JSON object")
        if "preset" in user:
            try:
                cfg = {**get_preset(user.pop("preset")), **cfg}
            except KeyError as e:
                raise ConfigParse(f"unknown preset {e}") from e
        cfg.update(user)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigParse("seed must be nonnegative")
        cfg["seed"] = args.seed
    cfg.pop("command", None)
    return cfg


def execute(command: str, cfg: dict, embed=None) -> Run:
    run = Run(command, cfg)
    handler = {"kernel": cmd_kernel, "factorize": cmd_factorize, "sarason": cmd_sarason,
               "dirichlet": cmd_dirichlet, "carleson": cmd_carleson}[command]
    try:
        if command == "factorize":
            handler(run, cfg, embed)
        else:
            handler(run, cfg)
    except ConfigParse:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigParse(f"{type(e).__name__}: {e}") from e
    return run


def write_outputs(run: Run, out: Path, elapsed: float):
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps(run.report()))
    (out / "timing.json").write_text(dumps({"command": run.command, "wall_clock_s": elapsed}))
    for name, text in run.files.items():
        (out / name).write_text(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    threads = os.environ.get("CNPF_THREADS")
    try:
        limit = int(threads) if threads else None
        if limit is not None and limit < 1:
            raise ValueError
    except ValueError:
        print(f"cnpf: CNPF_THREADS must be a positive integer, got {threads!r}", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args)
        embed = _parse_embed(args.embed)
        t0 = time.perf_counter()
        with threadpool_limits(limits=limit):
            run = execute(args.command, cfg, embed)
        elapsed = time.perf_counter() - t0
        write_outputs(run, args.out, elapsed)
    except ConfigParse as e:
        print(f"cnpf: configuration error: {e}", file=sys.stderr)
        return 2
    except CnpfError as e:
        print(f"cnpf: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    for c in run.checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}")
    if not run.passed:
        print(f"cnpf: {CheckFailed.__name__}: " + ", ".join(c["name"] for c in run.checks if not c["passed"]),
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
