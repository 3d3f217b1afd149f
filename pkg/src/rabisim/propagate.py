"""Time evolution: exact static propagation, midpoint stepping, Trotter sequencing."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from rabisim.analysis import Trajectory, fidelity
from rabisim.hilbert import BasisSpec, dense, is_hermitian, matrix_exponential

log = logging.getLogger(__name__)

KINDS = ("eigendecomposition", "stepped-midpoint", "trotter")


class RefinementError(RuntimeError):
    """Adaptive step halving ran out of refinements.

    ``time`` is the first grid time at which the last two refinements still
    disagreed by more than the tolerance.
    """

    def __init__(self, message: str, time: float, substeps: int, infidelity: float):
        super().__init__(f"{message} (t={time:.6g}, substeps={substeps}, infidelity={infidelity:.3g})")
        self.time = time
        self.substeps = substeps
        self.infidelity = infidelity


@dataclass(frozen=True)
class Propagator:
    kind: str = "stepped-midpoint"
    tolerance: float = 1e-7
    max_refinements: int = 12

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown propagator kind {self.kind!r}")
        if not 0 < self.tolerance <= 1e-3:
            raise ValueError(f"tolerance must lie in (0, 1e-3], got {self.tolerance}")
        if not 0 <= self.max_refinements <= 20:
            raise ValueError(f"max_refinements must lie in [0, 20], got {self.max_refinements}")


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-d sequence")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


class StaticEvolution:
    """Eigendecomposition of a hermitian ``H``, reused for many times."""

    def __init__(self, H):
        H = dense(H)
        scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
        if not is_hermitian(H, atol=1e-12 * scale):
            raise ValueError("evolve_static: Hamiltonian is not hermitian")
        self.energies, self.vectors = np.linalg.eigh(H)

    def __call__(self, psi0: np.ndarray, t):
        coeff = self.vectors.conj().T @ psi0
        t = np.asarray(t, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(t, self.energies))
        return (phases * coeff) @ self.vectors.T

    def unitary(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T


def evolve_static(H, psi0: np.ndarray, t):
    """``exp(-iHt) psi0``; an array of times returns stacked states."""
    return StaticEvolution(H)(np.asarray(psi0, dtype=complex), t)


def _step_unitary(h: np.ndarray, dt: float) -> np.ndarray:
    e, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * e * dt)) @ v.conj().T


def midpoint_states(H_of_t: Callable[[float], np.ndarray], psi0: np.ndarray,
                    t_grid, substeps: int) -> np.ndarray:
    """Fixed-step exponential midpoint rule, ``substeps`` steps per grid interval."""
    t = _check_grid(t_grid)
    psi = np.asarray(psi0, dtype=complex).copy()
    out = np.empty((t.size, psi.size), dtype=complex)
    out[0] = psi
    for i in range(t.size - 1):
        dt = (t[i + 1] - t[i]) / substeps
        for k in range(substeps):
            psi = _step_unitary(dense(H_of_t(t[i] + (k + 0.5) * dt)), dt) @ psi
        out[i + 1] = psi
    return out


def refine_until_converged(run: Callable[[int], np.ndarray], t: np.ndarray,
                           substeps: int, prop: Propagator) -> tuple[np.ndarray, int]:
    """Double ``substeps`` until two successive runs agree in final-state fidelity.

    ``run(substeps)`` must return the stacked states on the grid ``t``.
    """
    prev = run(substeps)
    if prop.max_refinements == 0:
        return prev, substeps
    for _ in range(prop.max_refinements):
        substeps *= 2
        cur = run(substeps)
        gap = 1.0 - fidelity(prev[-1], cur[-1])
        log.debug("refinement substeps=%d final-state infidelity=%.3g", substeps, gap)
        if gap <= prop.tolerance:
            return cur, substeps
        older, prev = prev, cur
    overlaps = np.abs(np.einsum("ij,ij->i", older.conj(), prev)) ** 2
    bad = np.flatnonzero(1.0 - overlaps > prop.tolerance)
    when = float(t[bad[0]]) if bad.size else float(t[-1])
    raise RefinementError("step refinement exhausted", when, substeps, gap)


def evolve_timedep(H_of_t: Callable[[float], np.ndarray], psi0: np.ndarray, t_grid,
                   prop: Optional[Propagator] = None, basis: Optional[BasisSpec] = None,
                   substeps: int = 1) -> Trajectory:
    """Adaptive midpoint-exponential evolution under ``H_of_t``.

    Each step applies ``exp(-i H(t_mid) dt)`` and is unitary by construction.
    """
    prop = Propagator() if prop is None else prop
    if prop.kind != "stepped-midpoint":
        raise ValueError(f"evolve_timedep needs a stepped-midpoint propagator, got {prop.kind!r}")
    t = _check_grid(t_grid)
    psi0 = np.asarray(psi0, dtype=complex)
    basis = BasisSpec(1, psi0.size // 2 - 1) if basis is None else basis
    if t.size == 1:
        states = psi0[None, :].copy()
        used = substeps
    else:
        states, used = refine_until_converged(lambda m: midpoint_states(H_of_t, psi0, t, m), t, substeps, prop)
    return Trajectory(t, states, basis, provenance={"propagator": "stepped-midpoint", "substeps": used,
                                                    "tolerance": prop.tolerance})


@dataclass(frozen=True)
class Segment:
    """One block of a Trotter step: evolution under ``generator`` or a fixed gate."""

    generator: Optional[np.ndarray] = None
    duration: float = 0.0
    gate: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        if (self.generator is None) == (self.gate is None):
            raise ValueError("a segment carries either a generator or a gate")
        if self.duration < 0:
            raise ValueError(f"segment duration must be >= 0, got {self.duration}")

    @classmethod
    def rotation(cls, gate: np.ndarray, label: str = "rotation") -> "Segment":
        return cls(gate=gate, label=label)

    def unitary(self) -> np.ndarray:
        if self.gate is not None:
            return np.asarray(self.gate)
        return matrix_exponential(-1j * self.duration * dense(self.generator))


@dataclass(frozen=True)
class TrotterSchedule:
    """Segments applied in list order, the whole block repeated ``n_steps`` times."""

    segments: Sequence[Segment]
    n_steps: int

    def __post_init__(self):
        if not self.segments:
            raise ValueError("Trotter schedule is empty")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")

    def step_unitary(self) -> np.ndarray:
        u = None
        for seg in self.segments:
            s = seg.unitary()
            u = s if u is None else s @ u
        return u


def trotter_evolve(schedule: TrotterSchedule, psi0: np.ndarray, record_every: int = 0):
    """Apply the schedule to ``psi0``.

    With ``record_every > 0`` the states after every ``record_every`` repetitions
    (plus the initial state) are returned stacked; otherwise just the final one.
    """
    u = schedule.step_unitary()
    psi = np.asarray(psi0, dtype=complex).copy()
    kept = [psi.copy()] if record_every else None
    for k in range(1, schedule.n_steps + 1):
        psi = u @ psi
        if record_every and k % record_every == 0:
            kept.append(psi.copy())
    return np.array(kept) if record_every else psi
