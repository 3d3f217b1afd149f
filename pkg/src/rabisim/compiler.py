"""Compile target spin-boson models into physical drive settings.

Each compiler inverts a forward parameter map and attaches diagnostics
against hardware bounds.  The matching ``*_forward`` functions apply the
forward maps to an emitted :class:`DriveProgram`, so round trips can be
checked independently of the inversion.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import numpy as np

from rabisim.analysis import spec_dict
from rabisim.ionhw import IonDriveSpec, effective_qrm_params, sideband_frequencies
from rabisim.models import CircuitSpec, DickeSpec, QRMSpec
from rabisim.protocols import characteristic_time

TWO_PI = 2 * np.pi
DETUNING_PASS = 0.1
DETUNING_WARN = 1 / 3
LAMB_DICKE_PASS = 0.3
PHASE_X = -np.pi / 2
PHASE_Y = 0.0


class InfeasibleTarget(ValueError):
    """The target cannot be reached within the hardware bounds."""

    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


@dataclass(frozen=True)
class IonBounds:
    nu: float
    eta_min: float = 0.06
    eta_max: float = 0.25
    omega_max: float = TWO_PI * 500e3
    nu0: float = 0.0
    t_coh: Optional[float] = None
    expected_phonons: Optional[float] = None

    def __post_init__(self):
        if not (self.nu > 0 and 0 < self.eta_min <= self.eta_max and self.omega_max > 0):
            raise ValueError("ion hardware bounds must be positive with eta_min <= eta_max")


@dataclass(frozen=True)
class CircuitBounds:
    omega_r: float
    g: float
    omega_q_idle: Optional[float] = None
    t_coh: Optional[float] = None
    rtol: float = 1e-12

    def __post_init__(self):
        if not (self.omega_r > 0 and self.g > 0):
            raise ValueError("circuit hardware bounds must be positive")


@dataclass(frozen=True)
class Diagnostic:
    constraint: str
    value: float
    bound: float
    status: str


@dataclass
class DriveProgram:
    platform: str
    target: dict[str, Any]
    settings: dict[str, Any]
    diagnostics: list[Diagnostic] = field(default_factory=list)
    t_char: float = float("nan")

    @property
    def ok(self) -> bool:
        return all(d.status == "pass" for d in self.diagnostics)

    def to_dict(self) -> dict[str, Any]:
        return {
            "platform": self.platform,
            "target": self.target,
            "settings": self.settings,
            "diagnostics": [asdict(d) for d in self.diagnostics],
            "t_char": self.t_char,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _grade(value: float, passing: float, warning: Optional[float] = None) -> str:
    if value < passing:
        return "pass"
    if warning is not None and value < warning:
        return "warn"
    return "fail"


def _detuning_diagnostics(deltas: dict[str, float], nu: float) -> list[Diagnostic]:
    return [Diagnostic(f"|{name}|/nu", abs(d) / nu, DETUNING_PASS, _grade(abs(d) / nu, DETUNING_PASS, DETUNING_WARN))
            for name, d in deltas.items()]


def _coherence_diagnostic(t_char: float, t_coh: Optional[float]) -> list[Diagnostic]:
    if t_coh is None:
        return []
    return [Diagnostic("t_char/t_coh", t_char / t_coh, 1.0, _grade(t_char / t_coh, 1.0))]


def _expected_phonons(target: QRMSpec, given: Optional[float]) -> float:
    if given is not None:
        return given
    return (2 * target.g / target.omega) ** 2 if target.omega else math.inf


def _pick_eta(g: float, bounds: IonBounds) -> tuple[float, float]:
    eta = max(bounds.eta_min, 2 * abs(g) / bounds.omega_max)
    if eta > bounds.eta_max * (1 + 1e-12):
        need = 2 * abs(g) / bounds.eta_max
        raise InfeasibleTarget(
            "Omega <= Omega_max",
            f"coupling {abs(g):.6g} rad/s needs Omega/2pi = {need / TWO_PI:.6g} Hz at eta_max={bounds.eta_max}, "
            f"above the {bounds.omega_max / TWO_PI:.6g} Hz limit")
    eta = min(eta, bounds.eta_max)
    return eta, 2 * abs(g) / eta


def compile_qrm_to_ion(target: QRMSpec, bounds: IonBounds) -> DriveProgram:
    """Detunings, Rabi frequency and Lamb-Dicke parameter realizing ``target``.

    Inverts ``omega0 = -(d_r + d_b)/2``, ``omega = (d_r - d_b)/2``, ``g = eta Omega / 2``.
    The smallest admissible ``eta`` is chosen.  A negative ``g`` is absorbed by
    shifting both drive phases by pi.
    """
    delta_r = target.omega - target.omega0
    delta_b = -target.omega - target.omega0
    eta, rabi = _pick_eta(target.g, bounds)
    phase = PHASE_X if target.coupling_axis == "x" else PHASE_Y
    if target.g < 0:
        phase += np.pi
    drive = IonDriveSpec(nu=bounds.nu, eta=eta, omega_r_rabi=rabi, omega_b_rabi=rabi, delta_r=delta_r,
                         delta_b=delta_b, nu0=bounds.nu0, phi_r=phase, phi_b=phase, n_max=target.n_max)
    lasers = sideband_frequencies(drive)
    t_char = characteristic_time(target)
    n_exp = _expected_phonons(target, bounds.expected_phonons)
    ld = eta * math.sqrt(n_exp + 1)
    diagnostics = _detuning_diagnostics({"delta_r": delta_r, "delta_b": delta_b}, bounds.nu)
    diagnostics.append(Diagnostic("eta*sqrt(n+1)", ld, LAMB_DICKE_PASS, _grade(ld, LAMB_DICKE_PASS)))
    diagnostics.append(Diagnostic("Omega/nu", rabi / bounds.nu, DETUNING_PASS, _grade(rabi / bounds.nu, DETUNING_PASS)))
    diagnostics += _coherence_diagnostic(t_char, bounds.t_coh)
    settings = {
        "nu": bounds.nu, "nu0": bounds.nu0, "eta": eta, "omega_rabi": rabi,
        "delta_r": delta_r, "delta_b": delta_b, "phi_r": phase, "phi_b": phase,
        "laser_omega_r": lasers.omega_r, "laser_omega_b": lasers.omega_b,
        "literal_laser_omega_r": lasers.literal_omega_r, "literal_laser_omega_b": lasers.literal_omega_b,
    }
    return DriveProgram("ion", spec_dict(target), settings, diagnostics, t_char)


def ion_drive_from_program(program: DriveProgram, n_max: int = 20) -> IonDriveSpec:
    s = program.settings
    return IonDriveSpec(nu=s["nu"], eta=s["eta"], omega_r_rabi=s["omega_rabi"], omega_b_rabi=s["omega_rabi"],
                        delta_r=s["delta_r"], delta_b=s["delta_b"], nu0=s["nu0"],
                        phi_r=s["phi_r"], phi_b=s["phi_b"], n_max=n_max)


def ion_forward(program: DriveProgram) -> QRMSpec:
    """Effective Rabi model of an emitted ion program (sign of ``g`` from the phase)."""
    drive = ion_drive_from_program(program, program.target.get("n_max", 20))
    flipped = abs(np.exp(1j * drive.phi_r) - np.exp(1j * (PHASE_X + np.pi))) < 1e-9 or \
        abs(np.exp(1j * drive.phi_r) - np.exp(1j * (PHASE_Y + np.pi))) < 1e-9
    if flipped:
        phase = drive.phi_r - np.pi
        drive = IonDriveSpec(drive.nu, drive.eta, drive.omega_r_rabi, drive.omega_b_rabi, drive.delta_r,
                             drive.delta_b, drive.nu0, phase, phase, drive.n_max)
    eff = effective_qrm_params(drive)
    return eff.replace(g=-eff.g) if flipped else eff


def compile_dicke_to_ions(target: DickeSpec, bounds: IonBounds) -> DriveProgram:
    """Homogeneous Dicke model on a chain of ions sharing one motional mode."""
    if not target.homogeneous:
        raise ValueError("only homogeneous Dicke targets compile to a single bichromatic drive; "
                         "simulate inhomogeneous models directly with rabisim.models.build_dicke")
    w, wq, g = target.omega, target.omega_q[0], target.g[0]
    delta_r = w - wq
    delta_b = -(w + wq)
    eta, rabi = _pick_eta(g, bounds)
    phase = PHASE_X if g >= 0 else PHASE_X + np.pi
    laser_r = bounds.nu0 - wq + w - bounds.nu
    laser_b = bounds.nu0 - wq - w + bounds.nu
    t_char = 2 * np.pi / abs(g) if g else math.inf
    diagnostics = _detuning_diagnostics({"delta_r": delta_r, "delta_b": delta_b}, bounds.nu)
    if bounds.expected_phonons is not None:
        ld = eta * math.sqrt(bounds.expected_phonons + 1)
        diagnostics.append(Diagnostic("eta*sqrt(n+1)", ld, LAMB_DICKE_PASS, _grade(ld, LAMB_DICKE_PASS)))
    diagnostics += _coherence_diagnostic(t_char, bounds.t_coh)
    settings = {
        "n_ions": target.n_spins, "nu": bounds.nu, "nu0": bounds.nu0, "eta": eta, "omega_rabi": rabi,
        "delta_r": delta_r, "delta_b": delta_b, "phi_r": phase, "phi_b": phase,
        "laser_omega_r": laser_r, "laser_omega_b": laser_b,
    }
    return DriveProgram("ion-dicke", spec_dict(target), settings, diagnostics, t_char)


def dicke_forward(program: DriveProgram) -> dict[str, float]:
    """Mode frequency, spin frequency and coupling implied by a Dicke program.

    The detuning route and the laser-frequency route are both returned.
    """
    s = program.settings
    sign = 1.0 if abs(np.exp(1j * s["phi_r"]) - np.exp(1j * PHASE_X)) < 1e-9 else -1.0
    return {
        "omega": (s["delta_r"] - s["delta_b"]) / 2,
        "omega_q": -(s["delta_r"] + s["delta_b"]) / 2,
        "omega_from_lasers": s["nu"] + (s["laser_omega_r"] - s["laser_omega_b"]) / 2,
        "omega_q_from_lasers": s["nu0"] - (s["laser_omega_r"] + s["laser_omega_b"]) / 2,
        "g": sign * s["omega_rabi"] * s["eta"] / 2,
    }


def compile_qrm_to_circuit(target: QRMSpec, bounds: CircuitBounds) -> DriveProgram:
    """Rotating-frame and qubit detunings for the digital-analog Rabi simulation.

    The coupling is fixed by the device, so ``target.g`` must equal ``bounds.g``.
    The two qubit detunings are split symmetrically about the frame.
    """
    if target.coupling_axis != "x":
        raise ValueError("circuit compilation targets the sigma_x Rabi coupling")
    if abs(target.g - bounds.g) > bounds.rtol * abs(bounds.g):
        raise InfeasibleTarget("g^R = g", f"target coupling {target.g:.6g} differs from device coupling "
                                          f"{bounds.g:.6g}; the map has no rescaling freedom")
    delta_r = target.omega / 2
    delta_q1 = target.omega0 / 4
    delta_q2 = -target.omega0 / 4
    omega_tilde = bounds.omega_r - delta_r
    omega_q1 = omega_tilde + 2 * delta_q1
    omega_q2 = omega_tilde + 2 * delta_q2
    idle = omega_tilde if bounds.omega_q_idle is None else bounds.omega_q_idle
    t_char = characteristic_time(target)
    excursion = max(abs(omega_q1 - idle), abs(omega_q2 - idle))
    diagnostics = [Diagnostic("qubit excursion/omega_r", excursion / bounds.omega_r, 0.1,
                              _grade(excursion / bounds.omega_r, 0.1))]
    diagnostics += _coherence_diagnostic(t_char, bounds.t_coh)
    settings = {
        "omega_r": bounds.omega_r, "g": bounds.g, "omega_tilde": omega_tilde,
        "delta_r": delta_r, "delta_q1": delta_q1, "delta_q2": delta_q2,
        "omega_q1": omega_q1, "omega_q2": omega_q2, "qubit_excursion": excursion,
        "literal_delta_q1": target.omega0 / 2, "literal_delta_q2": -target.omega0 / 2,
    }
    return DriveProgram("circuit", spec_dict(target), settings, diagnostics, t_char)


def circuit_from_program(program: DriveProgram, n_max: int = 20) -> CircuitSpec:
    s = program.settings
    return CircuitSpec(omega_r=s["omega_r"], omega_q=s["omega_q1"], g=s["g"], omega_tilde=s["omega_tilde"],
                       omega_q1=s["omega_q1"], omega_q2=s["omega_q2"], n_max=n_max)


def circuit_forward(program: DriveProgram) -> QRMSpec:
    """Simulated Rabi parameters from the emitted detunings."""
    s = program.settings
    return QRMSpec(omega0=2 * (s["delta_q1"] - s["delta_q2"]), omega=2 * s["delta_r"], g=s["g"],
                   coupling_axis="x", n_max=program.target.get("n_max", 20))
