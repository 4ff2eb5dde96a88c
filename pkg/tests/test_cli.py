import csv
import json
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from hallsim.cli import main
from hallsim.cli.config import ConfigError, parse_config, sim_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
FAST = ["nx=16", "ny=16", "steps=5"]


def schema(name):
    return json.loads(resources.files("hallsim").joinpath(f"schemas/{name}.schema.json")
                      .read_text())


def run(tmp_path, command, cfg, fmt="csv", sets=(), name="out"):
    out = tmp_path / f"{name}.{fmt}"
    argv = [command, "--out", str(out), "--format", fmt]
    if cfg:
        argv += ["--config", str(CONFIGS / cfg)]
    for s in sets:
        argv += ["--set", s]
    assert main(argv) == 0
    return out


def test_parse_complete():
    cfg = parse_config("B = 1.0\ntau = 1.0  # comment\n\n# only a comment\ndensity = 2\n")
    assert cfg.get("B") == 1.0 and cfg.get("density") == 2.0 and cfg.get("nx") == 64


def test_parse_typo():
    with pytest.raises(ConfigError, match=r"line 2: unknown key 'tua'"):
        parse_config("B = 1\ntua = 1.0\n")


def test_parse_invariant():
    with pytest.raises(ConfigError, match="line 1: B must be non-negative"):
        parse_config("B = -1\n")


def test_parse_type_mismatch():
    with pytest.raises(ConfigError, match="line 1: nx expects int"):
        parse_config("nx = 3.5\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("B 1\n")


def test_overrides_and_sim_config():
    cfg = parse_config((CONFIGS / "quantum_plateau.cfg").read_text(), ["nx=20", "steps=3"])
    sc = sim_config(cfg)
    assert (sc.nx, sc.steps, sc.initial_A.kind) == (20, 3, "pure_gauge")
    assert cfg.overrides == {"nx": 20, "steps": 3}


def test_natural_units_consistency():
    with pytest.raises(ConfigError, match="natural units"):
        parse_config("e = 2\n")


def test_si_parameters_are_rescaled():
    text = "units = si\ne = 1.602176634e-19\nhbar = 1.054571817e-34\nmass = 9.1093837e-31\n"
    cfg = parse_config(text + "tau = 1e-12\ndensity = 1e15\nB = 10\n")
    p = sim_config(cfg).params
    assert p.units == "natural" and p.e == 1.0


def test_sweep_csv(tmp_path):
    out = run(tmp_path, "sweep", "sweep_B.cfg")
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 50
    assert list(rows[0]) == ["B", "omega_c_tau", "sigma_L", "sigma_H", "sigma_H_quantized",
                             "regime"]
    w = np.array([float(r["omega_c_tau"]) for r in rows])
    assert np.all(np.diff(w) > 0)
    # 17 significant digits round-trip
    assert float(rows[7]["B"]) == np.logspace(-1, 2, 50)[7]


def test_tau_sweep(tmp_path):
    out = run(tmp_path, "sweep", None, "json", ["tau_sweep=lin:1:100:4", "B=2"])
    recs = json.loads(out.read_text())
    assert [r["omega_c_tau"] for r in recs] == [2.0, 68.0, 134.0, 200.0]


def test_empty_sweep(tmp_path, capsys):
    assert main(["sweep", "--out", str(tmp_path / "x.csv")]) == 1
    assert "empty sweep" in capsys.readouterr().err


def test_io_failure(tmp_path, capsys):
    code = main(["quantize", "--out", str(tmp_path / "missing" / "x.json"),
                 "--format", "json"])
    assert code == 1 and capsys.readouterr().err


def test_edge_outputs(tmp_path):
    out = run(tmp_path, "edge", "quantum_plateau.cfg", sets=FAST)
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["distance", "mass"]
    assert sum(float(r["mass"]) for r in rows) == pytest.approx(1.0, abs=1e-12)
    summary = json.loads((tmp_path / "out.summary.json").read_text())
    jsonschema.validate(summary, schema("edge_summary"))


def test_simulate_outputs(tmp_path):
    out = run(tmp_path, "simulate", "quantum_plateau.cfg", sets=FAST)
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["t", "norm", "S_cs", "action_ratio", "ohm_residual",
                             "hall_fraction"]
    assert len(rows) == 6
    state = json.loads((tmp_path / "out.state.json").read_text())
    jsonschema.validate(state, schema("state"))
    psi = np.array(state["psi_re"]).reshape(state["ny"], state["nx"])
    assert not psi[0].any() and not psi[:, 0].any()
    jsonschema.validate(json.loads((tmp_path / "out.summary.json").read_text()),
                        schema("simulate_summary"))


CASES = [
    ("sweep", "sweep_B.cfg", (), "sweep"),
    ("staircase", "staircase.cfg", (), "staircase"),
    ("quantize", "quantize.cfg", (), "quantize"),
    ("simulate", "quantum_plateau.cfg", FAST, "simulate"),
    ("simulate", "classical_ohm.cfg", ["nx=16", "ny=16", "steps=5"], "simulate"),
    ("edge", "quantum_plateau.cfg", FAST, "edge"),
    ("edge", "classical_ohm.cfg", ["nx=16", "ny=16", "steps=5"], "edge"),
]


@pytest.mark.parametrize("command,cfg,sets,name", CASES)
def test_json_schema(tmp_path, command, cfg, sets, name):
    out = run(tmp_path, command, cfg, "json", sets)
    jsonschema.validate(json.loads(out.read_text()), schema(name))


@pytest.mark.parametrize("command,cfg,sets,name", CASES)
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_deterministic(tmp_path, monkeypatch, command, cfg, sets, name, fmt):
    outputs = []
    for k, threads in enumerate(("1", "4")):
        monkeypatch.setenv("HALLSIM_THREADS", threads)
        d = tmp_path / str(k)
        d.mkdir()
        run(d, command, cfg, fmt, sets)
        outputs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outputs[0] == outputs[1]


def test_random_gauge_seeded(tmp_path):
    sets = FAST + ["lambda=random"]
    a = run(tmp_path, "simulate", "quantum_plateau.cfg", sets=sets + ["seed=1"], name="a")
    b = run(tmp_path, "simulate", "quantum_plateau.cfg", sets=sets + ["seed=1"], name="b")
    c = run(tmp_path, "simulate", "quantum_plateau.cfg", sets=sets + ["seed=2"], name="c")
    assert a.read_bytes() == b.read_bytes() != c.read_bytes()
