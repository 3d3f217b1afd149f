"""Named, reproducible experiments; one per acceptance check.

Each experiment declares its config schema and defaults in config syntax.
A runner receives the parsed blocks and a seeded generator and returns a
table, a summary and optional extra documents.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from rabisim.analysis import Trajectory, exact_ground_state, mean_phonons
from rabisim.compiler import (
    CircuitBounds,
    IonBounds,
    circuit_forward,
    compile_dicke_to_ions,
    compile_qrm_to_circuit,
    compile_qrm_to_ion,
    dicke_forward,
    ion_forward,
)
from rabisim.config import frequency, resolve_time, time
from rabisim.hilbert import BasisSpec, commutator, max_abs, spin_boson_ops
from rabisim.ionhw import (
    IonDriveSpec,
    effective_qrm_params,
    effective_reference,
    sideband_frequencies,
    simulate_full_drive,
)
from rabisim.models import CircuitSpec, DickeSpec, QRMSpec, build_qrm, interaction_picture_residual
from rabisim.propagate import Propagator
from rabisim.protocols import (
    RampSpec,
    adiabatic_prepare,
    characteristic_time,
    digital_analog_qrm,
    dsc_diagnostics,
    ramp_gap,
    slow_ramp_time,
)

THREADS_ENV = "RABISIM_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items) -> list:
    """Order-preserving map; worker count from ``RABISIM_THREADS``."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class Result:
    columns: list[str]
    rows: np.ndarray
    summary: dict[str, Any]
    passed: bool
    documents: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Experiment:
    name: str
    anchor: str
    description: str
    schema: dict[str, dict[str, str]]
    defaults: dict[str, dict[str, Any]]
    runner: Callable[[dict, np.random.Generator], Result]


def _trajectory_result(traj: Trajectory, summary: dict, passed: bool) -> Result:
    return Result(traj.columns(), traj.table(), summary, passed)


def _grid(block: dict, t_char: float) -> np.ndarray:
    start = resolve_time(block["start"], t_char)
    end = resolve_time(block["end"], t_char)
    if not end > start:
        raise ValueError(f"time grid end {end} must exceed start {start}")
    return np.linspace(start, end, block["points"])


def _ion_spec(ion: dict, n_max: Optional[int] = None) -> IonDriveSpec:
    return IonDriveSpec(nu=ion["nu"], eta=ion["eta"], omega_r_rabi=ion["omega_rabi"],
                        omega_b_rabi=ion["omega_rabi"], delta_r=ion["delta_r"], delta_b=ion["delta_b"],
                        n_max=ion["n_max"] if n_max is None else n_max)


def _jc_run(spec: IonDriveSpec, grid: dict, tol: float, refinements: int = 12) -> Trajectory:
    t = _grid(grid, characteristic_time(spec))
    psi0 = spec.basis.state("e", 0)
    return simulate_full_drive(spec, psi0, t, reference=lambda tt: effective_reference(spec, psi0, tt),
                               prop=Propagator(tolerance=tol, max_refinements=refinements))


# -- paper-jc-validation ------------------------------------------------------

ION_SCHEMA = {"nu": "frequency", "eta": "float", "omega_rabi": "frequency",
              "delta_r": "frequency", "delta_b": "frequency", "n_max": "int"}
ION_DEFAULTS = {"nu": frequency(3e6), "eta": 0.06, "omega_rabi": frequency(68e3),
                "delta_r": frequency(0.0), "delta_b": frequency(-102e3), "n_max": 20}
JC_GRID = {"start": time(0.0), "end": time(5.0, "t_char"), "points": 201}


def run_jc_validation(cfg: dict, rng) -> Result:
    spec = _ion_spec(cfg["ion"])
    tol = cfg["tolerance"]
    traj = _jc_run(spec, cfg["t_grid"], tol["integrator"], tol["refinements"])
    eff = effective_qrm_params(spec)
    lasers = sideband_frequencies(spec)
    min_f = float(traj.fidelity.min())
    leak = traj.provenance["leakage_max"]
    summary = {
        **traj.summary(),
        "effective_model": {"omega0": eff.omega0, "omega": eff.omega, "g": eff.g,
                            "coupling_axis": eff.coupling_axis, "g_over_omega": eff.g / eff.omega},
        "t_char": characteristic_time(spec),
        "sidebands": {"omega_r": lasers.omega_r, "omega_b": lasers.omega_b,
                      "literal_omega_r": lasers.literal_omega_r, "literal_omega_b": lasers.literal_omega_b},
        "max_population_outside_manifold": leak,
        "steps_per_trap_period": traj.provenance["steps_per_period"],
        "detuning_ok": spec.detuning_ok,
        "lamb_dicke_ok": traj.provenance["lamb_dicke_ok"],
        "checks": {"fidelity": min_f >= tol["fidelity"], "leakage": leak <= tol["leakage"]},
    }
    return _trajectory_result(traj, summary, min_f >= tol["fidelity"] and leak <= tol["leakage"])


# -- ground-state-structure ---------------------------------------------------

def run_ground_state_structure(cfg: dict, rng) -> Result:
    q = cfg["qrm"]
    w = q["omega"]
    rows = []
    for r in q["ratios"]:
        spec = QRMSpec(omega0=w, omega=w, g=r * w, n_max=q["n_max"])
        e, psi = exact_ground_state(build_qrm(spec), spec.basis)
        rows.append([r, r * w, e, float(mean_phonons(psi, spec.basis))])
    rows = np.array(rows)
    order = np.argsort(rows[:, 0])
    n = rows[order, 3]
    zero = rows[order][0, 0] == 0
    checks = {
        "zero_coupling_vacuum": bool(not zero or n[0] == 0.0),
        "positive_when_coupled": bool(np.all(n[rows[order, 0] > 0] > 0)),
        "strictly_increasing": bool(np.all(np.diff(n) > 0)),
    }
    summary = {"ratios": [float(x) for x in rows[:, 0]], "mean_phonons": [float(x) for x in rows[:, 3]],
               "ground_energies": [float(x) for x in rows[:, 2]], "checks": checks}
    return Result(["g_over_omega", "g", "ground_energy", "mean_phonons"], rows, summary, all(checks.values()))


# -- adiabatic-dsc-ground-state -----------------------------------------------

def run_adiabatic(cfg: dict, rng) -> Result:
    r = cfg["ramp"]
    w = r["omega"]
    start = QRMSpec(omega0=w, omega=w, g=r["start_ratio"] * w, n_max=r["n_max"])
    end = start.replace(g=r["end_ratio"] * w)
    gap = ramp_gap(start, end, r["n_checkpoints"])
    t_slow = slow_ramp_time(start, end, r["n_checkpoints"], factor=r["slowness"])
    ramp = RampSpec(start, end, t_slow, "increase_g", r["profile"], r["n_checkpoints"])
    runs = parallel_map(adiabatic_prepare, [ramp, ramp.with_time(t_slow / r["fast_factor"])])
    slow, fast = runs
    checks = {
        "slow_fidelity": slow.fidelity >= r["fidelity"],
        "fast_is_worse": fast.fidelity < slow.fidelity,
        "ground_state_has_phonons": slow.mean_phonons > 0,
    }
    summary = {
        "min_gap": gap, "ramp_time": t_slow, "fast_ramp_time": t_slow / r["fast_factor"],
        "fidelity": slow.fidelity, "fast_fidelity": fast.fidelity,
        "final_mean_phonons": slow.mean_phonons, "ground_energy": slow.ground_energy,
        "checks": checks,
    }
    return _trajectory_result(slow.trajectory, summary, all(checks.values()))


# -- trotter-sweep ------------------------------------------------------------

def trotter_setup(omega: float, omega0: float, g: float, omega_r: float, n_max: int):
    target = QRMSpec(omega0=omega0, omega=omega, g=g, n_max=n_max)
    program = compile_qrm_to_circuit(target, CircuitBounds(omega_r=omega_r, g=g))
    s = program.settings
    circuit = CircuitSpec(omega_r=omega_r, omega_q=s["omega_q1"], g=g, omega_tilde=s["omega_tilde"],
                          omega_q1=s["omega_q1"], omega_q2=s["omega_q2"], n_max=n_max)
    return target, circuit


def trotter_infidelity(target: QRMSpec, circuit: CircuitSpec, n_steps: int, t_total: float) -> float:
    traj = digital_analog_qrm(target, circuit, n_steps, t_total, record_every=n_steps)
    return float(1.0 - traj.fidelity[-1])


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def run_trotter_sweep(cfg: dict, rng) -> Result:
    tgt, dev, st, tol = cfg["target"], cfg["device"], cfg["steps"], cfg["tolerance"]
    target, circuit = trotter_setup(tgt["omega"], tgt["omega0"], dev["g"], dev["omega_r"], tgt["n_max"])
    t_char = characteristic_time(target)
    t_slope = resolve_time(st["slope_time"], t_char)
    t_check = resolve_time(st["check_time"], t_char)
    ns = list(st["slope_steps"])
    jobs = [(n, t_slope) for n in ns] + [(st["check_steps"], t_check)]
    inf = parallel_map(lambda job: trotter_infidelity(target, circuit, *job), jobs)
    slope = loglog_slope(ns, inf[:-1])
    check_fid = 1.0 - inf[-1]
    checks = {
        "slope_in_range": tol["slope_min"] <= slope <= tol["slope_max"],
        "monotone": bool(np.all(np.diff(inf[:-1]) < 0)),
        "check_fidelity": check_fid >= tol["fidelity"],
    }
    rows = np.array([[n, t, x] for (n, t), x in zip(jobs, inf)])
    summary = {"slope": slope, "check_steps": st["check_steps"], "check_fidelity": check_fid,
               "slope_time": t_slope, "check_time": t_check,
               "circuit": {"omega_tilde": circuit.omega_tilde, "omega_q1": circuit.omega_q1,
                           "omega_q2": circuit.omega_q2},
               "checks": checks}
    return Result(["n_steps", "t_total", "infidelity"], rows, summary, all(checks.values()))


# -- dsc-revival --------------------------------------------------------------

def revival_check(omega: float, ratio: float, n_max: int, n_points: int):
    """Return (report, revival at 2 pi / omega, ground energy error) for the omega0 = 0 model."""
    spec = QRMSpec(omega0=0.0, omega=omega, g=ratio * omega, n_max=n_max)
    basis = spec.basis
    psi0 = (basis.state("g", 0) + basis.state("e", 0)) / np.sqrt(2)
    period = 2 * np.pi / omega
    report = dsc_diagnostics(spec, psi0, np.linspace(0.0, period, n_points))
    energy, _ = exact_ground_state(build_qrm(spec), basis)
    return report, float(report.revival[-1]), abs(energy + spec.g ** 2 / omega)


def run_dsc_revival(cfg: dict, rng) -> Result:
    q, tol = cfg["qrm"], cfg["tolerance"]
    report, revival, e_err = revival_check(q["omega"], q["ratio"], q["n_max"], q["points"])
    drift = float(np.max(np.abs(report.sigma_x - report.sigma_x[0])))
    checks = {"revival": revival >= 1 - tol["revival"], "ground_energy": e_err <= tol["energy"],
              "sigma_x_conserved": drift <= 1e-9}
    rows = np.column_stack([report.t, report.revival, report.parity, report.sigma_x,
                            report.even_phonons @ np.arange(q["n_max"] + 1),
                            report.odd_phonons @ np.arange(q["n_max"] + 1)])
    summary = {"revival_at_period": revival, "ground_energy_error": e_err, "sigma_x_drift": drift,
               "peak_revival_time": float(report.t[1:][np.argmax(report.revival[1:])]), "checks": checks}
    return Result(["t", "revival", "parity", "sigma_x", "even_sector_phonons", "odd_sector_phonons"],
                  rows, summary, all(checks.values()))


# -- compile round trips ------------------------------------------------------

def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


# Targets keep every frequency within a factor 100 of the others: the forward maps
# rebuild each parameter from sums of detunings, so per-component relative error
# is only meaningful away from zero.
def random_ion_target(rng, hw: dict) -> QRMSpec:
    g = rng.uniform(0.01, 1.0) * hw["eta_max"] * hw["omega_max"] / 2
    return QRMSpec(omega0=rng.uniform(0.01, 1) * hw["nu"] / 50, omega=rng.uniform(0.01, 1) * hw["nu"] / 50,
                   g=g, coupling_axis=str(rng.choice(["x", "y"])))


def roundtrip_ion(target: QRMSpec, hw: dict) -> float:
    bounds = IonBounds(nu=hw["nu"], eta_min=hw["eta_min"], eta_max=hw["eta_max"], omega_max=hw["omega_max"])
    back = ion_forward(compile_qrm_to_ion(target, bounds))
    if back.coupling_axis != target.coupling_axis:
        return math.inf
    return max(_rel(target.omega0, back.omega0), _rel(target.omega, back.omega), _rel(target.g, back.g))


def random_dicke_target(rng, hw: dict, n_spins: int) -> DickeSpec:
    g = rng.uniform(0.01, 1.0) * hw["eta_max"] * hw["omega_max"] / 2
    return DickeSpec(n_spins=n_spins, omega=rng.uniform(0.01, 1) * hw["nu"] / 50,
                     omega_q=rng.uniform(0.01, 1) * hw["nu"] / 50, g=g, n_max=2)


def roundtrip_dicke(target: DickeSpec, hw: dict) -> float:
    bounds = IonBounds(nu=hw["nu"], eta_min=hw["eta_min"], eta_max=hw["eta_max"], omega_max=hw["omega_max"])
    back = dicke_forward(compile_dicke_to_ions(target, bounds))
    return max(_rel(target.omega, back["omega"]), _rel(target.omega_q[0], back["omega_q"]),
               _rel(target.g[0], back["g"]))


def random_circuit_target(rng, hw: dict) -> QRMSpec:
    g = hw["g"]
    return QRMSpec(omega0=rng.uniform(0.1, 10) * g, omega=rng.uniform(0.1, 10) * g, g=g)


def roundtrip_circuit(target: QRMSpec, hw: dict) -> float:
    back = circuit_forward(compile_qrm_to_circuit(target, CircuitBounds(omega_r=hw["omega_r"], g=hw["g"])))
    return max(_rel(target.omega0, back.omega0), _rel(target.omega, back.omega), _rel(target.g, back.g))


def run_compile_roundtrip(cfg: dict, rng) -> Result:
    sw, hw, tol = cfg["sweep"], cfg["hardware"], cfg["tolerance"]
    makers = {
        "ion": (lambda: random_ion_target(rng, hw), roundtrip_ion),
        "dicke": (lambda: random_dicke_target(rng, hw, sw["n_spins"]), roundtrip_dicke),
        "circuit": (lambda: random_circuit_target(rng, hw), roundtrip_circuit),
    }
    rows, worst = [], {}
    for p_idx, platform in enumerate(sw["platforms"]):
        if platform not in makers:
            raise ValueError(f"unknown platform {platform!r}")
        make, check = makers[platform]
        targets = [make() for _ in range(sw["n_targets"])]
        errs = parallel_map(lambda t: check(t, hw), targets)
        worst[platform] = float(max(errs))
        rows += [[p_idx, i, e] for i, e in enumerate(errs)]
    checks = {p: worst[p] <= tol["relative"] for p in worst}
    summary = {"platforms": list(sw["platforms"]), "max_relative_error": worst, "checks": checks}
    return Result(["platform_index", "target_index", "relative_error"], np.array(rows), summary,
                  all(checks.values()))


# -- observable-invariance ----------------------------------------------------

def frame_commutator_norms(alpha: float, beta: float, basis: BasisSpec) -> float:
    """Largest max-norm commutator of ``alpha n + beta sz`` with the standard observables."""
    G = interaction_picture_residual(alpha, beta, basis)
    o = spin_boson_ops(basis)
    worst = max(max_abs(commutator(G, o.sz)), max_abs(commutator(G, o.num)))
    fock = basis.fock_levels()
    for n in range(basis.n_fock):
        proj = np.diag((fock == n).astype(complex))
        worst = max(worst, max_abs(commutator(G, proj)))
    return worst


def run_observable_invariance(cfg: dict, rng) -> Result:
    sw, tol = cfg["sweep"], cfg["tolerance"]
    basis = BasisSpec(1, sw["n_max"])
    pairs = rng.uniform(-sw["scale"], sw["scale"], size=(sw["n_samples"], 2))
    norms = [frame_commutator_norms(a, b, basis) for a, b in pairs]
    rows = np.column_stack([pairs, norms])
    worst = float(max(norms))
    return Result(["alpha", "beta", "max_commutator"], rows,
                  {"max_commutator": worst, "checks": {"commute": worst <= tol["commutator"]}},
                  worst <= tol["commutator"])


# -- truncation-convergence ---------------------------------------------------

def run_truncation(cfg: dict, rng) -> Result:
    ion, tr, tol = cfg["ion"], cfg["truncation"], cfg["tolerance"]
    lo, hi = tr["ion_n_max"]
    runs = parallel_map(lambda n: _jc_run(_ion_spec(ion, n), cfg["t_grid"], 1e-7), [lo, hi])
    fid_change = float(np.max(np.abs(runs[0].fidelity - runs[1].fidelity)))
    n0 = tr["revival_n_max"]
    rev = [revival_check(tr["omega"], tr["ratio"], n, 201)[1:] for n in (n0, n0 + 10)]
    checks = {
        "jc_fidelity_stable": fid_change < tol["fidelity_change"],
        "revival_stable": all(r >= 1 - tol["revival"] for r, _ in rev),
        "energy_stable": all(e <= tol["energy"] for _, e in rev),
    }
    rows = np.column_stack([runs[0].t, runs[0].fidelity, runs[1].fidelity])
    summary = {"ion_n_max": [lo, hi], "max_fidelity_change": fid_change,
               "revival": {str(n): r for n, (r, _) in zip((n0, n0 + 10), rev)},
               "ground_energy_error": {str(n): e for n, (_, e) in zip((n0, n0 + 10), rev)},
               "checks": checks}
    return Result(["t", f"fidelity_n{lo}", f"fidelity_n{hi}"], rows, summary, all(checks.values()))


HARDWARE_SCHEMA = {"nu": "frequency", "eta_min": "float", "eta_max": "float", "omega_max": "frequency",
                   "omega_r": "frequency", "g": "frequency"}
HARDWARE_DEFAULTS = {"nu": frequency(3e6), "eta_min": 0.06, "eta_max": 0.25, "omega_max": frequency(500e3),
                     "omega_r": frequency(7.5e9), "g": frequency(100e6)}


def _roundtrip_experiment(name: str, platforms: list[str], description: str) -> Experiment:
    return Experiment(
        name, "target-to-hardware parameter maps inverted and re-applied", description,
        schema={"sweep": {"n_targets": "int", "n_spins": "int", "platforms": "str_list"},
                "hardware": HARDWARE_SCHEMA, "tolerance": {"relative": "float"}},
        defaults={"sweep": {"n_targets": 1000, "n_spins": 3, "platforms": platforms},
                  "hardware": HARDWARE_DEFAULTS, "tolerance": {"relative": 1e-12}},
        runner=run_compile_roundtrip,
    )


CATALOG: dict[str, Experiment] = {e.name: e for e in [
    Experiment(
        "paper-jc-validation",
        "single trapped ion, full bichromatic drive vs. effective JC evolution",
        "Integrates the full drive Hamiltonian from |e,0> and tracks fidelity against the analytic "
        "JC solution plus population leaking out of the initial excitation manifold.",
        schema={"ion": ION_SCHEMA, "t_grid": "grid",
                "tolerance": {"fidelity": "float", "leakage": "float", "integrator": "float",
                              "refinements": "int"}},
        defaults={"ion": ION_DEFAULTS, "t_grid": JC_GRID,
                  "tolerance": {"fidelity": 0.99, "leakage": 0.01, "integrator": 1e-7, "refinements": 12}},
        runner=run_jc_validation,
    ),
    Experiment(
        "ground-state-structure",
        "Rabi ground state beyond the JC regime carries phonons",
        "Mean phonon number of the exact resonant Rabi ground state across coupling ratios.",
        schema={"qrm": {"omega": "frequency", "ratios": "float_list", "n_max": "int"}},
        defaults={"qrm": {"omega": frequency(1.0, "rad_per_s"), "ratios": [0.0, 0.5, 1.0, 2.0], "n_max": 60}},
        runner=run_ground_state_structure,
    ),
    Experiment(
        "adiabatic-dsc-ground-state",
        "adiabatic ground-state preparation from |g,0> by ramping the coupling",
        "Gap-based slow ramp to g/omega = 1 and a 100x faster control ramp.",
        schema={"ramp": {"omega": "frequency", "start_ratio": "float", "end_ratio": "float", "n_max": "int",
                         "slowness": "float", "fast_factor": "float", "profile": "str",
                         "n_checkpoints": "int", "fidelity": "float"}},
        defaults={"ramp": {"omega": frequency(1.0, "rad_per_s"), "start_ratio": 0.01, "end_ratio": 1.0,
                           "n_max": 30, "slowness": 50.0, "fast_factor": 100.0, "profile": "smoothstep",
                           "n_checkpoints": 41, "fidelity": 0.99}},
        runner=run_adiabatic,
    ),
    Experiment(
        "trotter-sweep",
        "digital-analog Rabi simulation on a transmon-resonator device",
        "Trotter infidelity versus step count at a resonant g = omega point, plus the 90-step check.",
        schema={"target": {"omega": "frequency", "omega0": "frequency", "n_max": "int"},
                "device": {"omega_r": "frequency", "g": "frequency"},
                "steps": {"slope_steps": "int_list", "slope_time": "time", "check_steps": "int",
                          "check_time": "time"},
                "tolerance": {"fidelity": "float", "slope_min": "float", "slope_max": "float"}},
        defaults={"target": {"omega": frequency(100e6), "omega0": frequency(100e6), "n_max": 40},
                  "device": {"omega_r": frequency(7.5e9), "g": frequency(100e6)},
                  "steps": {"slope_steps": [4, 8, 16, 32, 64, 128], "slope_time": time(0.25, "t_char"),
                            "check_steps": 90, "check_time": time(1.0, "t_char")},
                  "tolerance": {"fidelity": 0.99, "slope_min": -2.3, "slope_max": -1.7}},
        runner=run_trotter_sweep,
    ),
    Experiment(
        "dsc-revival",
        "deep-strong coupling wave packets in the exactly solvable omega0 = 0 limit",
        "Revival of |+,0> after one mode period at g/omega = 2 and the displaced-oscillator ground energy.",
        schema={"qrm": {"omega": "frequency", "ratio": "float", "n_max": "int", "points": "int"},
                "tolerance": {"revival": "float", "energy": "float"}},
        defaults={"qrm": {"omega": frequency(1.0, "rad_per_s"), "ratio": 2.0, "n_max": 94, "points": 401},
                  "tolerance": {"revival": 1e-4, "energy": 1e-8}},
        runner=run_dsc_revival,
    ),
    _roundtrip_experiment("dicke-compile-roundtrip", ["dicke"],
                          "Random homogeneous Dicke targets compiled to ion drives and mapped back."),
    _roundtrip_experiment("compile-roundtrip", ["ion", "dicke", "circuit"],
                          "Random targets for every platform compiled and mapped back."),
    Experiment(
        "observable-invariance",
        "frame changes of the form alpha n + beta sigma_z leave measured observables unchanged",
        "Commutators of random frame generators with sigma_z, a^dag a and Fock projectors.",
        schema={"sweep": {"n_samples": "int", "n_max": "int", "scale": "float"},
                "tolerance": {"commutator": "float"}},
        defaults={"sweep": {"n_samples": 100, "n_max": 20, "scale": 10.0}, "tolerance": {"commutator": 1e-12}},
        runner=run_observable_invariance,
    ),
    Experiment(
        "truncation-convergence",
        "Fock truncation convergence of the ion validation and the revival oracle",
        "Reruns the JC validation at two truncations and the revival check at n_max and n_max + 10.",
        schema={"ion": {k: v for k, v in ION_SCHEMA.items() if k != "n_max"}, "t_grid": "grid",
                "truncation": {"ion_n_max": "int_list", "revival_n_max": "int", "omega": "frequency",
                               "ratio": "float"},
                "tolerance": {"fidelity_change": "float", "revival": "float", "energy": "float"}},
        defaults={"ion": {k: v for k, v in ION_DEFAULTS.items() if k != "n_max"}, "t_grid": JC_GRID,
                  "truncation": {"ion_n_max": [20, 30], "revival_n_max": 94,
                                 "omega": frequency(1.0, "rad_per_s"), "ratio": 2.0},
                  "tolerance": {"fidelity_change": 1e-4, "revival": 1e-4, "energy": 1e-8}},
        runner=run_truncation,
    ),
]}
