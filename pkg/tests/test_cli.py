import json
import subprocess
import sys
import time as _time

import pytest
import yaml

from rabisim.cli import main
from rabisim.experiments import CATALOG, THREADS_ENV

REQUIRED = ["paper-jc-validation", "adiabatic-dsc-ground-state", "trotter-sweep", "dicke-compile-roundtrip",
            "dsc-revival"]


def write(path, doc):
    path.write_text(yaml.safe_dump(doc, sort_keys=False))
    return str(path)


def test_list_catalog(capsys):
    assert main(["list"]) == 0
    first = capsys.readouterr().out
    assert main(["list"]) == 0
    assert capsys.readouterr().out == first
    for name in REQUIRED:
        assert name in first
    assert all(exp.anchor for exp in CATALOG.values())


def _run(tmp_path, name, doc, capsys=None):
    cfg = write(tmp_path / f"{name}.yaml", doc)
    code = main(["run", cfg])
    return code, tmp_path


def _roundtrip_doc(seed, out):
    return {"experiment": "compile-roundtrip", "seed": seed, "output": {"dir": out},
            "sweep": {"n_targets": 50}}


def test_run_is_byte_deterministic(tmp_path):
    for sub in ("a", "b"):
        assert main(["run", write(tmp_path / f"{sub}.yaml", _roundtrip_doc(11, sub))]) == 0
    a, b = tmp_path / "a", tmp_path / "b"
    assert (a / "compile-roundtrip.csv").read_bytes() == (b / "compile-roundtrip.csv").read_bytes()
    sa = json.loads((a / "compile-roundtrip.summary.json").read_text())
    sb = json.loads((b / "compile-roundtrip.summary.json").read_text())
    assert sa.pop("wall_time_s") >= 0 and sb.pop("wall_time_s") >= 0
    sa["config"].pop("output", None)
    sb["config"].pop("output", None)
    assert sa == sb
    assert sa["passed"] is True and sa["seed"] == 11


def test_seed_changes_random_targets(tmp_path):
    main(["run", write(tmp_path / "a.yaml", _roundtrip_doc(1, "a"))])
    main(["run", write(tmp_path / "b.yaml", _roundtrip_doc(2, "b"))])
    assert (tmp_path / "a/compile-roundtrip.csv").read_bytes() != (tmp_path / "b/compile-roundtrip.csv").read_bytes()


def test_thread_count_does_not_change_output(tmp_path, monkeypatch):
    doc = {"experiment": "trotter-sweep", "steps": {"slope_steps": [4, 8, 16]}}
    monkeypatch.setenv(THREADS_ENV, "1")
    main(["run", write(tmp_path / "one.yaml", {**doc, "output": {"dir": "one"}})])
    monkeypatch.setenv(THREADS_ENV, "3")
    main(["run", write(tmp_path / "three.yaml", {**doc, "output": {"dir": "three"}})])
    assert (tmp_path / "one/trotter-sweep.csv").read_bytes() == (tmp_path / "three/trotter-sweep.csv").read_bytes()


def test_csv_header_and_precision(tmp_path):
    doc = {"experiment": "dsc-revival", "qrm": {"points": 5}, "output": {"dir": "out"}}
    assert main(["run", write(tmp_path / "r.yaml", doc)]) == 0
    lines = (tmp_path / "out/dsc-revival.csv").read_text().splitlines()
    assert lines[0].startswith("t,")
    assert len(lines) == 6
    assert all(len(x.split("e")[0].replace("-", "").replace(".", "")) == 17 for x in lines[1].split(","))


def test_empty_grid_is_schema_error(tmp_path, capsys):
    doc = {"experiment": "paper-jc-validation",
           "t_grid": {"start": {"value": 0, "unit": "s"}, "end": {"value": 1, "unit": "t_char"}, "points": 0}}
    assert main(["run", write(tmp_path / "g.yaml", doc)]) == 2
    err = capsys.readouterr().err
    assert "t_grid.points" in err and "g.yaml:" in err


@pytest.mark.parametrize("doc,needle", [
    ({"experiment": "no-such-thing"}, "unknown experiment"),
    ({"experiment": "paper-jc-validation", "ion": {"nu": {"value": 3, "unit": "MHz"}}}, "ion.nu.unit"),
    ({"experiment": "paper-jc-validation", "ion": {"nu": 3e6}}, "ion.nu"),
    ({"experiment": "trotter-sweep", "bogus": {}}, "bogus"),
    ({"experiment": "trotter-sweep", "seed": -1}, "seed"),
])
def test_schema_violations_exit_2(tmp_path, capsys, doc, needle):
    assert main(["run", write(tmp_path / "c.yaml", doc)]) == 2
    assert needle in capsys.readouterr().err


def test_unparsable_yaml_exit_2(tmp_path, capsys):
    p = tmp_path / "broken.yaml"
    p.write_text("experiment: [\n")
    assert main(["run", str(p)]) == 2
    assert "line" in capsys.readouterr().err


def test_numerical_failure_exit_3(tmp_path, capsys):
    # one step doubling cannot reach 1e-12 from a coarse start
    doc = {"experiment": "paper-jc-validation",
           "t_grid": {"start": {"value": 0, "unit": "s"}, "end": {"value": 2e-6, "unit": "s"}, "points": 2},
           "tolerance": {"integrator": 1e-12, "refinements": 1}}
    assert main(["run", write(tmp_path / "n.yaml", doc)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_strict_run_reports_failed_checks(tmp_path):
    doc = {"experiment": "dsc-revival", "qrm": {"n_max": 12, "points": 5}, "output": {"dir": "o"}}
    cfg = write(tmp_path / "s.yaml", doc)
    assert main(["run", cfg]) == 0
    assert main(["run", "--strict", cfg]) == 1
    assert json.loads((tmp_path / "o/dsc-revival.summary.json").read_text())["passed"] is False


ION_TARGET = {"omega0": {"value": 5e4, "unit": "two_pi_hz"}, "omega": {"value": 5e4, "unit": "two_pi_hz"},
              "g": {"value": 2e3, "unit": "two_pi_hz"}, "coupling_axis": "x"}
ION_HW = {"nu": {"value": 3e6, "unit": "two_pi_hz"}, "eta_min": 0.06, "eta_max": 0.25,
          "omega_max": {"value": 5e5, "unit": "two_pi_hz"}}


def test_compile_writes_program(tmp_path):
    doc = {"platform": "ion", "target": ION_TARGET, "hardware": {**ION_HW, "t_coh": {"value": 1e-2, "unit": "s"}},
           "output": {"dir": "progs"}}
    assert main(["compile", write(tmp_path / "p.yaml", doc)]) == 0
    prog = json.loads((tmp_path / "progs/program-ion.json").read_text())
    assert prog["settings"]["eta"] == 0.06
    assert {d["constraint"] for d in prog["diagnostics"]} >= {"|delta_r|/nu", "t_char/t_coh"}


def test_compile_infeasible_exit_4(tmp_path, capsys):
    doc = {"platform": "ion", "target": {**ION_TARGET, "g": {"value": 1e6, "unit": "two_pi_hz"}}, "hardware": ION_HW}
    assert main(["compile", write(tmp_path / "p.yaml", doc)]) == 4
    assert "Omega <= Omega_max" in capsys.readouterr().err


def test_compile_circuit_and_dicke(tmp_path):
    circuit = {"platform": "circuit",
               "target": {"omega0": {"value": 1e8, "unit": "two_pi_hz"}, "omega": {"value": 1e8, "unit": "two_pi_hz"}},
               "hardware": {"omega_r": {"value": 7.5e9, "unit": "two_pi_hz"}, "g": {"value": 1e8, "unit": "two_pi_hz"}}}
    assert main(["compile", write(tmp_path / "c.yaml", circuit)]) == 0
    dicke = {"platform": "dicke",
             "target": {"n_spins": 3, "omega": ION_TARGET["omega"], "omega_q": ION_TARGET["omega0"], "g": ION_TARGET["g"]},
             "hardware": ION_HW}
    assert main(["compile", write(tmp_path / "d.yaml", dicke)]) == 0
    assert (tmp_path / "out/program-dicke.json").exists()
    assert main(["compile", write(tmp_path / "x.yaml", {**dicke, "platform": "laser"})]) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "rabisim", "list"], capture_output=True, text=True, check=True)
    assert "trotter-sweep" in out.stdout


def test_shipped_configs_are_valid(tmp_path):
    from pathlib import Path

    from rabisim.cli import compile_config, resolve_experiment
    from rabisim.config import load_document

    configs = sorted((Path(__file__).parent.parent / "configs").glob("*.yaml"))
    assert configs
    runs = set()
    for path in configs:
        raw = load_document(path)
        if "platform" in raw:
            doc = {**raw, "output": {"dir": str(tmp_path)}}
            program, _ = compile_config(Path(write(tmp_path / path.name, doc)))
            assert program.ok
        else:
            runs.add(resolve_experiment(raw)[0].name)
    assert runs == set(CATALOG)
