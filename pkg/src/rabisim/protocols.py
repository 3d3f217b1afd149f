"""Experiment-level procedures built on the models and propagators."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from rabisim.analysis import Trajectory, exact_ground_state, fidelity, mean_phonons, spec_dict
from rabisim.hilbert import BasisSpec, parity_diagonal, spin_boson_ops
from rabisim.ionhw import IonDriveSpec, effective_qrm_params
from rabisim.models import CircuitSpec, QRMSpec, build_qrm, build_rotating_frame_jc, x_rotation
from rabisim.propagate import (
    Propagator,
    Segment,
    StaticEvolution,
    TrotterSchedule,
    evolve_timedep,
    trotter_evolve,
)

JC_REGIME_RATIO = 0.05
SLOWNESS_FACTOR = 50.0
PROFILES = ("linear", "smoothstep")
RAMP_MODES = ("increase_g", "decrease_omega")


def ramp_profile(s, profile: str = "smoothstep"):
    s = np.clip(s, 0.0, 1.0)
    if profile == "linear":
        return s
    if profile == "smoothstep":
        return s * s * (3 - 2 * s)
    raise ValueError(f"unknown ramp profile {profile!r}; expected one of {PROFILES}")


@dataclass(frozen=True)
class RampSpec:
    """Interpolation between two Rabi models over ``total_time``."""

    start: QRMSpec
    end: QRMSpec
    total_time: float
    mode: str = "increase_g"
    profile: str = "smoothstep"
    n_checkpoints: int = 41

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError(f"ramp total_time must be positive, got {self.total_time}")
        if self.mode not in RAMP_MODES:
            raise ValueError(f"unknown ramp mode {self.mode!r}; expected one of {RAMP_MODES}")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown ramp profile {self.profile!r}")
        if (self.start.coupling_axis, self.start.n_max) != (self.end.coupling_axis, self.end.n_max):
            raise ValueError("ramp endpoints must share coupling axis and truncation")
        if self.start.omega0 != self.end.omega0:
            raise ValueError("ramp endpoints must share omega0")
        if self.mode == "increase_g" and self.start.omega != self.end.omega:
            raise ValueError("increase_g ramps keep omega fixed")
        if self.mode == "decrease_omega" and self.start.g != self.end.g:
            raise ValueError("decrease_omega ramps keep g fixed")
        if self.n_checkpoints < 2:
            raise ValueError("n_checkpoints must be at least 2")

    def spec_at(self, s: float) -> QRMSpec:
        """Model at path parameter ``s`` in [0, 1] (parameters interpolated linearly)."""
        a, b = self.start, self.end
        return a.replace(omega=a.omega + s * (b.omega - a.omega), g=a.g + s * (b.g - a.g))

    def with_time(self, total_time: float) -> "RampSpec":
        return RampSpec(self.start, self.end, total_time, self.mode, self.profile, self.n_checkpoints)


def ramp_gap(start: QRMSpec, end: QRMSpec, n_checkpoints: int = 41) -> float:
    """Smallest ground-to-first-excited gap along the straight parameter path."""
    path = RampSpec(start, end, 1.0, _infer_mode(start, end), n_checkpoints=n_checkpoints)
    gaps = []
    for s in np.linspace(0.0, 1.0, n_checkpoints):
        e = np.linalg.eigvalsh(build_qrm(path.spec_at(s)))
        gaps.append(e[1] - e[0])
    return float(min(gaps))


def _infer_mode(start: QRMSpec, end: QRMSpec) -> str:
    return "decrease_omega" if start.g == end.g and start.omega != end.omega else "increase_g"


def slow_ramp_time(start: QRMSpec, end: QRMSpec, n_checkpoints: int = 41,
                   factor: float = SLOWNESS_FACTOR) -> float:
    """Ramp duration ``factor * 2 pi / gap_min``."""
    gap = ramp_gap(start, end, n_checkpoints)
    if gap <= 0:
        raise ValueError("spectral gap closes along the ramp; no adiabatic duration exists")
    return factor * 2 * np.pi / gap


@dataclass
class AdiabaticResult:
    final: np.ndarray
    fidelity: float
    mean_phonons: float
    ground_energy: float
    ground_state: np.ndarray
    trajectory: Trajectory


def adiabatic_prepare(ramp: RampSpec, prop: Optional[Propagator] = None) -> AdiabaticResult:
    """Evolve ``|g, 0>`` under the ramped Rabi model and compare with the exact ground state."""
    if abs(ramp.start.ratio) > JC_REGIME_RATIO:
        raise ValueError(f"ramp must start in the JC regime (g/omega <= {JC_REGIME_RATIO}), "
                         f"got {ramp.start.ratio:.3g}")
    prop = Propagator(tolerance=1e-7) if prop is None else prop
    basis = ramp.start.basis
    h0 = build_qrm(ramp.start)
    h1 = build_qrm(ramp.end)
    T = ramp.total_time

    def hamiltonian(t):
        f = ramp_profile(t / T, ramp.profile)
        return (1 - f) * h0 + f * h1

    psi0 = basis.state("g", 0)
    t_grid = np.linspace(0.0, T, ramp.n_checkpoints)
    # One step per unit of the largest energy scale is already deep in the converged regime.
    scale = max(abs(ramp.start.omega), abs(ramp.end.omega), abs(ramp.end.g), abs(ramp.start.omega0), 1e-300)
    substeps = max(4, math.ceil(T * scale / (2 * np.pi) / (ramp.n_checkpoints - 1)))
    traj = evolve_timedep(hamiltonian, psi0, t_grid, prop=prop, basis=basis, substeps=substeps)

    energy, ground = exact_ground_state(h1, basis)
    final = traj.final
    traj.provenance.update({"protocol": "adiabatic-ramp", "start": spec_dict(ramp.start),
                            "end": spec_dict(ramp.end), "total_time": T, "profile": ramp.profile})
    return AdiabaticResult(final=final, fidelity=fidelity(ground, final),
                           mean_phonons=float(mean_phonons(final, basis)),
                           ground_energy=energy, ground_state=ground, trajectory=traj)


def check_circuit_map(target: QRMSpec, circuit: CircuitSpec, rtol: float = 1e-12) -> None:
    """Raise if the circuit settings do not reproduce ``target``."""
    if target.coupling_axis != "x":
        raise ValueError("digital-analog decomposition targets the sigma_x Rabi coupling")
    checks = [
        ("omega_r^R = 2 Delta_r", target.omega, circuit.simulated_omega_r),
        ("omega_q^R = 2 (Delta_q1 - Delta_q2)", target.omega0, circuit.simulated_omega_q),
        ("g^R = g", target.g, circuit.g),
    ]
    for relation, want, got in checks:
        if abs(want - got) > rtol * max(abs(want), abs(got)):
            raise ValueError(f"circuit settings violate {relation}: target {want!r}, device gives {got!r}")


def qrm_trotter_schedule(circuit: CircuitSpec, n_steps: int, t_total: float,
                         basis: Optional[BasisSpec] = None) -> TrotterSchedule:
    """JC block, then the anti-JC block realized as pi-pulse, JC, inverse pi-pulse."""
    basis = circuit.basis if basis is None else basis
    dt = t_total / n_steps
    flip = x_rotation(np.pi, basis)
    segments = [
        Segment.rotation(flip.conj().T, "x(-pi)"),
        Segment(build_rotating_frame_jc(circuit, 2, basis), dt, label="jc step 2"),
        Segment.rotation(flip, "x(pi)"),
        Segment(build_rotating_frame_jc(circuit, 1, basis), dt, label="jc step 1"),
    ]
    return TrotterSchedule(segments, n_steps)


def digital_analog_qrm(target: QRMSpec, circuit: CircuitSpec, n_steps: int, t_total: float,
                       psi0: Optional[np.ndarray] = None, record_every: int = 1) -> Trajectory:
    """Trotterized Rabi evolution with fidelity against the exact target evolution."""
    check_circuit_map(target, circuit)
    basis = target.basis
    psi0 = basis.state("g", 0) if psi0 is None else np.asarray(psi0, dtype=complex)
    record_every = max(1, min(record_every, n_steps))
    schedule = qrm_trotter_schedule(circuit, n_steps, t_total, basis)
    states = trotter_evolve(schedule, psi0, record_every=record_every)
    t = np.arange(states.shape[0]) * record_every * (t_total / n_steps)
    exact = StaticEvolution(build_qrm(target))(psi0, t)
    traj = Trajectory(t, states, basis, provenance={
        "protocol": "digital-analog", "n_steps": n_steps, "t_total": t_total,
        "target": spec_dict(target), "circuit": spec_dict(circuit)})
    return traj.with_reference(exact)


@dataclass
class ParityChainReport:
    t: np.ndarray
    parity: np.ndarray
    sigma_x: np.ndarray
    even_phonons: np.ndarray
    odd_phonons: np.ndarray
    revival: np.ndarray

    def __post_init__(self):
        if np.any(np.abs(self.parity) > 1 + 1e-12):
            raise ValueError("parity expectation outside [-1, 1]")


def dsc_diagnostics(spec: QRMSpec, psi0: np.ndarray, t_grid) -> ParityChainReport:
    """Parity, sigma_x, per-parity phonon weights and revival probability under the exact model."""
    basis = spec.basis
    psi0 = np.asarray(psi0, dtype=complex)
    t = np.asarray(t_grid, dtype=float)
    states = StaticEvolution(build_qrm(spec))(psi0, t)
    pops = np.abs(states) ** 2
    par = parity_diagonal(basis)
    sx = spin_boson_ops(basis).sx
    fock = basis.fock_levels()
    even = np.zeros((t.size, basis.n_fock))
    odd = np.zeros((t.size, basis.n_fock))
    for n in range(basis.n_fock):
        even[:, n] = pops[:, (fock == n) & (par > 0)].sum(axis=1)
        odd[:, n] = pops[:, (fock == n) & (par < 0)].sum(axis=1)
    return ParityChainReport(
        t=t,
        parity=pops @ par,
        sigma_x=np.real(np.einsum("ij,ij->i", states.conj(), states @ sx.T)),
        even_phonons=even,
        odd_phonons=odd,
        revival=np.abs(states @ psi0.conj()) ** 2,
    )


def characteristic_time(spec: Union[QRMSpec, IonDriveSpec]) -> float:
    """``2 pi / g``; for an ion drive this is ``4 pi / (eta Omega)``."""
    if isinstance(spec, IonDriveSpec):
        if spec.eta * spec.omega_r_rabi == 0:
            raise ValueError("characteristic time undefined for zero coupling")
        effective_qrm_params(spec)
        return 4 * np.pi / (spec.eta * spec.omega_r_rabi)
    if spec.g == 0:
        raise ValueError("characteristic time undefined for zero coupling")
    return 2 * np.pi / abs(spec.g)
