import csv
import io
import json

import pytest

from cnpf.cli import csv_text, dumps, main
from cnpf.presets import PRESETS, get_preset

FAST = sorted(n for n in PRESETS if n not in ("dirichlet-half", "carleson-area-dirichlet-half",
                                              "hardy-ball2-random-over-da2", "da2-z1"))


def _run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


@pytest.mark.parametrize("name", FAST)
def test_fast_presets_pass(tmp_path, name):
    code, out = _run(tmp_path, PRESETS[name]["command"], "--preset", name)
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["passed"] and rep["command"] == PRESETS[name]["command"]
    assert "wall_clock_s" in json.loads((out / "timing.json").read_text())
    assert "wall_clock" not in (out / "report.json").read_text()


def test_report_is_deterministic(tmp_path):
    _, a = _run(tmp_path, "factorize", "--preset", "bergman1-random-over-szego", "--seed", "3", name="a")
    _, b = _run(tmp_path, "factorize", "--preset", "bergman1-random-over-szego", "--seed", "3", name="b")
    for f in ("report.json", "psi.csv", "phi.csv", "factorization.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes()
    _, c = _run(tmp_path, "factorize", "--preset", "bergman1-random-over-szego", "--seed", "4", name="c")
    assert (a / "psi.csv").read_bytes() != (c / "psi.csv").read_bytes()


def test_csv_round_trip(tmp_path):
    code, out = _run(tmp_path, "factorize", "--preset", "h2-half-one-plus-z")
    assert code == 0
    rows = list(csv.reader(io.StringIO((out / "psi.csv").read_text())))
    assert rows[0] == ["index", "re", "im"]
    assert float(rows[2][1]) == 0.5      # psi = z/(2 + z)
    assert float(rows[3][1]) == -0.25


def test_embed_flag(tmp_path):
    code, out = _run(tmp_path, "factorize", "--preset", "h2-z", "--config", _write(tmp_path, {
        "function": {"coeffs": [[1, 0.5, 0.0]]}}), "--embed", "0.5")
    assert code == 0
    fac = json.loads((out / "factorization.json").read_text())
    assert fac["certificates"]["embed_w"] == [0.5, 0.0]


def _write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_config_with_preset_key(tmp_path):
    cfg = _write(tmp_path, {"preset": "h2-z", "seed": 2})
    code, out = _run(tmp_path, "factorize", "--config", cfg)
    assert code == 0
    assert json.loads((out / "report.json").read_text())["config"]["seed"] == 2


def test_check_failure_exit_one(tmp_path):
    cfg = _write(tmp_path, {"k": {"family": "SzegoDisc", "dimension": 1},
                            "s": {"family": "BergmanDiscWeighted", "params": {"beta": 0.0}, "dimension": 1}})
    code, out = _run(tmp_path, "kernel", "--config", cfg)
    assert code == 1
    rep = json.loads((out / "report.json").read_text())
    assert not rep["passed"]
    assert [c["name"] for c in rep["checks"] if not c["passed"]] == ["quotient_psd"]


@pytest.mark.parametrize("cfg", [
    "{not json",
    "[1, 2]",
    {"k": {"family": "SzegoDisc", "dimension": 1}, "s": {"family": "SzegoDisc", "dimension": 1},
     "function": {"coeffs": [[1, 1.0, 0.0]]}, "grid": {"points": []}},
    {"k": {"family": "NoSuchKernel", "dimension": 1}},
    {"preset": "no-such-preset"},
    {"seed": -1, "k": {"family": "SzegoDisc", "dimension": 1}},
])
def test_config_errors_exit_two(tmp_path, cfg):
    command = "sarason" if isinstance(cfg, dict) and "grid" in cfg else "kernel"
    code, _ = _run(tmp_path, command, "--config", _write(tmp_path, cfg))
    assert code == 2


def test_missing_function_exit_two(tmp_path):
    cfg = _write(tmp_path, {"k": {"family": "SzegoDisc", "dimension": 1}, "s": {"family": "SzegoDisc", "dimension": 1}})
    assert _run(tmp_path, "factorize", "--config", cfg)[0] == 2


def test_usage_errors(tmp_path):
    assert _run(tmp_path, "nonsense")[0] == 2
    assert _run(tmp_path, "kernel", "--preset", "nope")[0] == 2


def test_bad_thread_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CNPF_THREADS", "zero")
    assert _run(tmp_path, "kernel", "--preset", "dirichlet-half-cnp")[0] == 2


def test_thread_env_accepted(tmp_path, monkeypatch):
    monkeypatch.setenv("CNPF_THREADS", "1")
    assert _run(tmp_path, "kernel", "--preset", "dirichlet-half-cnp")[0] == 0


def test_library_error_exit_one(tmp_path):
    # unit-norm factorization of a sub-unit F without --embed
    cfg = _write(tmp_path, {"preset": "h2-z", "function": {"coeffs": [[1, 0.5, 0.0]]}, "embed": [2.0, 0.0]})
    assert _run(tmp_path, "factorize", "--config", cfg)[0] == 1


def test_get_preset_is_a_copy():
    p = get_preset("h2-z")
    p["k"]["truncation_order"] = 1
    assert PRESETS["h2-z"]["k"]["truncation_order"] == 200


def test_serialization_helpers():
    assert json.loads(dumps({"a": complex(1, 2), "b": float("nan")})) == {"a": [1.0, 2.0], "b": "nan"}
    text = csv_text(["x", "y"], [[0.1, None], [1e-300, True]])
    assert text.splitlines()[1] == "0.1,"
    assert text.splitlines()[2] == "1e-300,pass"
