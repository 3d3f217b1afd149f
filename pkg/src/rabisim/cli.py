"""Command-line front end: ``rabisim run|list|compile``.

Exit codes: 0 success, 1 checks failed, 2 schema error, 3 numerical failure,
4 infeasible compile.
"""
from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import time
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import scipy

from rabisim import __version__
from rabisim.analysis import format_float, spec_dict
from rabisim.compiler import (
    CircuitBounds,
    InfeasibleTarget,
    IonBounds,
    compile_dicke_to_ions,
    compile_qrm_to_circuit,
    compile_qrm_to_ion,
)
from rabisim.config import ConfigError, deep_merge, line_of, load_document, parse_blocks, parse_field
from rabisim.experiments import CATALOG, THREADS_ENV, Experiment, Result, thread_count
from rabisim.models import DickeSpec, QRMSpec

EXIT_OK, EXIT_CHECKS, EXIT_SCHEMA, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 1, 2, 3, 4
RUN_KEYS = {"experiment", "seed", "output"}
log = logging.getLogger("rabisim")


def _output_dir(raw: dict, config_path: Path) -> Path:
    out = raw.get("output", {"dir": "out"})
    if not isinstance(out, dict) or set(out) != {"dir"} or not isinstance(out["dir"], str):
        raise ConfigError("output", "expected {dir: <path>}")
    d = Path(out["dir"])
    return d if d.is_absolute() else config_path.parent / d


def _seed(raw: dict) -> int:
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", f"expected a non-negative integer, got {seed!r}")
    return seed


def resolve_experiment(raw: dict) -> tuple[Experiment, dict, dict]:
    """Return the experiment, its merged raw blocks and the parsed blocks."""
    name = raw.get("experiment")
    if name not in CATALOG:
        raise ConfigError("experiment", f"unknown experiment {name!r}; see `rabisim list`")
    exp = CATALOG[name]
    overrides = {k: v for k, v in raw.items() if k not in RUN_KEYS}
    merged = deep_merge(exp.defaults, overrides)
    return exp, merged, parse_blocks(merged, exp.schema)


def csv_text(columns: Sequence[str], rows: np.ndarray) -> str:
    lines = [",".join(columns)]
    lines += [",".join(format_float(x) for x in row) for row in np.atleast_2d(rows)]
    return "\n".join(lines) + "\n"


def provenance() -> dict[str, Any]:
    return {"rabisim": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def dump_json(doc: dict) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def run_experiment(config_path: Path) -> tuple[Result, dict, Path]:
    raw = load_document(config_path)
    exp, merged, parsed = resolve_experiment(raw)
    seed = _seed(raw)
    out_dir = _output_dir(raw, config_path)
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    result = exp.runner(parsed, rng)
    wall = time.perf_counter() - start
    summary = {
        "experiment": exp.name, "anchor": exp.anchor, "seed": seed, "passed": bool(result.passed),
        "config": merged, "results": result.summary, "provenance": provenance(),
        "wall_time_s": wall,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{exp.name}.csv").write_text(csv_text(result.columns, result.rows))
    (out_dir / f"{exp.name}.summary.json").write_text(dump_json(summary))
    for fname, text in result.documents.items():
        (out_dir / fname).write_text(text)
    return result, summary, out_dir


# -- compile ------------------------------------------------------------------

COMPILE_SCHEMAS = {
    "ion": {"target": {"omega0": "frequency", "omega": "frequency", "g": "frequency", "coupling_axis": "str"},
            "hardware": {"nu": "frequency", "eta_min": "float", "eta_max": "float", "omega_max": "frequency"}},
    "dicke": {"target": {"n_spins": "int", "omega": "frequency", "omega_q": "frequency", "g": "frequency"},
              "hardware": {"nu": "frequency", "eta_min": "float", "eta_max": "float", "omega_max": "frequency"}},
    "circuit": {"target": {"omega0": "frequency", "omega": "frequency"},
                "hardware": {"omega_r": "frequency", "g": "frequency"}},
}
OPTIONAL_HARDWARE = {"t_coh": "time"}


def compile_config(config_path: Path):
    raw = load_document(config_path)
    plat = raw.get("platform")
    if plat not in COMPILE_SCHEMAS:
        raise ConfigError("platform", f"expected one of {sorted(COMPILE_SCHEMAS)}, got {plat!r}")
    body = {k: v for k, v in raw.items() if k not in {"platform", "output"}}
    hw_raw = dict(body.get("hardware", {}))
    t_coh_raw = hw_raw.pop("t_coh", None)
    body["hardware"] = hw_raw
    parsed = parse_blocks(body, COMPILE_SCHEMAS[plat])
    t_coh = None
    if t_coh_raw is not None:
        value, unit = parse_field("time", t_coh_raw, "hardware.t_coh")
        if unit != "s":
            raise ConfigError("hardware.t_coh", "coherence time must be given in seconds")
        t_coh = value
    tgt, hw = parsed["target"], parsed["hardware"]
    if plat == "ion":
        program = compile_qrm_to_ion(QRMSpec(tgt["omega0"], tgt["omega"], tgt["g"], tgt["coupling_axis"]),
                                     IonBounds(t_coh=t_coh, **hw))
    elif plat == "dicke":
        program = compile_dicke_to_ions(DickeSpec(tgt["n_spins"], tgt["omega"], tgt["omega_q"], tgt["g"]),
                                        IonBounds(t_coh=t_coh, **hw))
    else:
        program = compile_qrm_to_circuit(QRMSpec(tgt["omega0"], tgt["omega"], hw["g"]),
                                         CircuitBounds(omega_r=hw["omega_r"], g=hw["g"], t_coh=t_coh))
    out_dir = _output_dir(raw, config_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"program-{plat}.json"
    path.write_text(program.to_json())
    return program, path


# -- entry point --------------------------------------------------------------

def _schema_message(exc: ConfigError, config_path: Optional[Path]) -> str:
    line = line_of(config_path, exc.path) if config_path is not None else None
    where = f"{config_path}:{line}: " if line else (f"{config_path}: " if config_path else "")
    return f"schema error: {where}{exc}"


def _guarded(fn, config_path: Path) -> int:
    try:
        return fn()
    except ConfigError as exc:
        print(_schema_message(exc, config_path), file=sys.stderr)
        return EXIT_SCHEMA
    except InfeasibleTarget as exc:
        print(f"infeasible target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, ValueError) as exc:
        print(f"schema error: {config_path}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        module = getattr(type(exc), "__module__", "rabisim")
        print(f"numerical failure [{module}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def cmd_list(args) -> int:
    for exp in CATALOG.values():
        print(f"{exp.name:28s} {exp.anchor}")
    return EXIT_OK


def cmd_run(args) -> int:
    path = Path(args.config)

    def go():
        result, summary, out_dir = run_experiment(path)
        status = "PASS" if result.passed else "FAIL"
        print(f"{summary['experiment']}: {status} ({summary['wall_time_s']:.2f} s) -> {out_dir}")
        return EXIT_OK if result.passed or not args.strict else EXIT_CHECKS

    return _guarded(go, path)


def cmd_compile(args) -> int:
    path = Path(args.config)

    def go():
        program, out = compile_config(path)
        for d in program.diagnostics:
            print(f"  {d.constraint}: {d.value:.4g} (bound {d.bound:.4g}) {d.status}")
        print(f"{program.platform}: {'ok' if program.ok else 'check diagnostics'} -> {out}")
        return EXIT_OK

    return _guarded(go, path)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rabisim", description="Rabi/Dicke model quantum simulation toolkit.",
                                epilog=f"Set {THREADS_ENV}=N to run sweep points on N threads.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="print the named experiments").set_defaults(fn=cmd_list)
    r = sub.add_parser("run", help="run a named experiment from a config file")
    r.add_argument("config")
    r.add_argument("--strict", action="store_true", help="exit 1 if the experiment's checks fail")
    r.set_defaults(fn=cmd_run)
    c = sub.add_parser("compile", help="compile a target model into a hardware program")
    c.add_argument("config")
    c.set_defaults(fn=cmd_compile)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.debug("threads=%d", thread_count())
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
