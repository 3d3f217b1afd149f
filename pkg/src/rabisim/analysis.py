"""Observables, fidelities and reference solutions."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field, is_dataclass
from functools import cached_property
from typing import Any, Optional

import numpy as np

from rabisim.hilbert import BasisSpec, dense, is_hermitian, parity_diagonal
from rabisim.models import QRMSpec


def fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """``|<psi|phi>|^2`` for normalized pure states."""
    psi = np.asarray(psi)
    phi = np.asarray(phi)
    if psi.shape != phi.shape:
        raise ValueError(f"fidelity: dimension mismatch {psi.shape} vs {phi.shape}")
    return float(min(1.0, abs(np.vdot(psi, phi)) ** 2))


def infidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    return 1.0 - fidelity(psi, phi)


def _amplitude_grid(states: np.ndarray, basis: BasisSpec) -> np.ndarray:
    return np.abs(states.reshape(states.shape[:-1] + (basis.spin_dim, basis.n_fock))) ** 2


def phonon_distribution(psi: np.ndarray, basis: BasisSpec) -> np.ndarray:
    """``p(n)`` summed over spin configurations; works on stacked states too."""
    return _amplitude_grid(np.asarray(psi), basis).sum(axis=-2)


def spin_populations(psi: np.ndarray, basis: BasisSpec) -> np.ndarray:
    """Probability of each spin configuration (summed over Fock levels)."""
    return _amplitude_grid(np.asarray(psi), basis).sum(axis=-1)


def sigma_z_expectations(psi: np.ndarray, basis: BasisSpec) -> np.ndarray:
    """``<sigma_z^m>`` for every spin ``m`` (last axis)."""
    pops = spin_populations(psi, basis)
    configs = np.arange(basis.spin_dim)
    out = []
    for m in range(basis.n_spins):
        bit = (configs >> (basis.n_spins - 1 - m)) & 1
        out.append(pops @ np.where(bit == 1, 1.0, -1.0))
    return np.stack(out, axis=-1)


def expectation(op, psi: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, op @ psi)))


def mean_phonons(psi: np.ndarray, basis: BasisSpec) -> np.ndarray:
    p = phonon_distribution(psi, basis)
    return p @ np.arange(basis.n_fock)


@dataclass
class Trajectory:
    """States on a time grid plus derived observables.

    ``fidelity`` holds the overlap with a reference trajectory when one was
    supplied.  ``provenance`` records the inputs that produced the run.
    """

    t: np.ndarray
    states: np.ndarray
    basis: BasisSpec
    fidelity: Optional[np.ndarray] = None
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.states.shape != (self.t.size, self.basis.dim):
            raise ValueError(f"states shape {self.states.shape} does not match "
                             f"({self.t.size}, {self.basis.dim})")
        if self.fidelity is not None:
            self.fidelity = np.asarray(self.fidelity, dtype=float)

    def __len__(self):
        return self.t.size

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @cached_property
    def phonons(self) -> np.ndarray:
        return phonon_distribution(self.states, self.basis)

    @cached_property
    def mean_phonons(self) -> np.ndarray:
        return self.phonons @ np.arange(self.basis.n_fock)

    @cached_property
    def sigma_z(self) -> np.ndarray:
        return sigma_z_expectations(self.states, self.basis)

    @cached_property
    def parity(self) -> np.ndarray:
        return (np.abs(self.states) ** 2) @ parity_diagonal(self.basis)

    @cached_property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    def with_reference(self, reference: np.ndarray) -> "Trajectory":
        """Fill ``fidelity`` against stacked reference states on the same grid."""
        reference = np.asarray(reference)
        if reference.shape != self.states.shape:
            raise ValueError(f"reference shape {reference.shape} != {self.states.shape}")
        self.fidelity = np.minimum(1.0, np.abs(np.einsum("ij,ij->i", reference.conj(), self.states)) ** 2)
        return self

    def validate(self, atol: float = 1e-9) -> None:
        p = self.phonons
        if np.max(np.abs(p.sum(axis=1) - 1)) > atol:
            raise ValueError("phonon distribution does not sum to one")
        n = p @ np.arange(self.basis.n_fock)
        if np.max(np.abs(n - self.mean_phonons)) > atol:
            raise ValueError("mean phonon number inconsistent with p(n)")

    def columns(self) -> list[str]:
        cols = ["t", "mean_phonons", "parity"]
        cols += [f"sigma_z_{m}" for m in range(self.basis.n_spins)]
        if self.fidelity is not None:
            cols.append("fidelity")
        cols += [f"p_{n}" for n in range(self.basis.n_fock)]
        return cols

    def table(self) -> np.ndarray:
        parts = [self.t[:, None], self.mean_phonons[:, None], self.parity[:, None], self.sigma_z]
        if self.fidelity is not None:
            parts.append(self.fidelity[:, None])
        parts.append(self.phonons)
        return np.hstack(parts)

    def to_csv(self, path=None) -> str:
        """Serialize with a fixed column order and 17 significant digits."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns())
        for row in self.table():
            w.writerow([format_float(x) for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def summary(self) -> dict[str, Any]:
        out = {
            "n_points": int(self.t.size),
            "t_final": float(self.t[-1]),
            "max_norm_error": float(np.max(np.abs(self.norms - 1))),
            "final_mean_phonons": float(self.mean_phonons[-1]),
            "final_sigma_z": [float(x) for x in self.sigma_z[-1]],
        }
        if self.fidelity is not None:
            out["min_fidelity"] = float(self.fidelity.min())
            out["final_fidelity"] = float(self.fidelity[-1])
        return out


def format_float(x: float) -> str:
    return f"{float(x):.16e}"


def exact_ground_state(H, basis: Optional[BasisSpec] = None,
                       degeneracy_tol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Lowest eigenpair by full diagonalization.

    A ground doublet split by less than ``degeneracy_tol`` is resolved to its
    even-parity member when ``basis`` is given.  The returned state has its
    largest-magnitude amplitude real and positive.
    """
    H = dense(H)
    if not is_hermitian(H, atol=1e-10 * max(1.0, float(np.max(np.abs(H))))):
        raise ValueError("exact_ground_state: Hamiltonian is not hermitian")
    evals, evecs = np.linalg.eigh(H)
    e0 = float(evals[0])
    state = evecs[:, 0]
    degenerate = np.flatnonzero(evals - e0 <= degeneracy_tol)
    if degenerate.size > 1 and basis is not None:
        sub = evecs[:, degenerate]
        pi_sub = sub.conj().T @ (parity_diagonal(basis)[:, None] * sub)
        w, v = np.linalg.eigh(pi_sub)
        state = sub @ v[:, -1]
    state = state / np.linalg.norm(state)
    k = np.argmax(np.abs(state))
    state = state * (abs(state[k]) / state[k])
    return e0, state


def jc_reference_states(spec: QRMSpec, psi0: np.ndarray, t_grid) -> np.ndarray:
    """Closed-form Jaynes-Cummings evolution, one 2x2 block per excitation manifold.

    Manifold ``k >= 1`` is spanned by ``|e, k-1>`` and ``|g, k>``; ``|g, 0>`` and,
    under hard truncation, ``|e, n_max>`` evolve by a phase only.
    """
    basis = spec.basis
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (basis.dim,):
        raise ValueError(f"psi0 has shape {psi0.shape}, expected ({basis.dim},)")
    t = np.asarray(t_grid, dtype=float)
    nf = basis.n_fock
    c = spec.g if spec.coupling_axis == "x" else 1j * spec.g
    w0, w = spec.omega0, spec.omega
    g_idx = np.arange(nf)
    e_idx = nf + np.arange(nf)
    out = np.zeros((t.size, basis.dim), dtype=complex)

    out[:, g_idx[0]] = psi0[g_idx[0]] * np.exp(1j * (w0 / 2) * t)
    top = e_idx[-1]
    out[:, top] = psi0[top] * np.exp(-1j * (w0 / 2 + w * basis.n_max) * t)

    k = np.arange(1, nf)
    ie, ig = e_idx[k - 1], g_idx[k]
    mean = w * (k - 0.5)
    half = (w0 - w) / 2
    off = c * np.sqrt(k)
    rabi = np.sqrt(half ** 2 + np.abs(off) ** 2)
    ce, cg = psi0[ie], psi0[ig]
    tt = t[:, None]
    cos = np.cos(rabi * tt)
    sinc = np.where(rabi > 0, np.sin(rabi * tt) / np.where(rabi > 0, rabi, 1), tt)
    phase = np.exp(-1j * mean * tt)
    out[:, ie] = phase * (cos * ce - 1j * sinc * (half * ce + off * cg))
    out[:, ig] = phase * (cos * cg - 1j * sinc * (np.conj(off) * ce - half * cg))
    return out


def jc_reference_trajectory(spec: QRMSpec, psi0: np.ndarray, t_grid) -> Trajectory:
    states = jc_reference_states(spec, psi0, t_grid)
    return Trajectory(np.asarray(t_grid, dtype=float), states, spec.basis,
                      provenance={"model": "jc-analytic", "spec": spec_dict(spec)})


def spec_dict(spec) -> dict[str, Any]:
    """Plain-data view of a spec dataclass for provenance records."""
    if not is_dataclass(spec):
        raise TypeError(f"not a spec dataclass: {spec!r}")
    d = asdict(spec)
    d["type"] = type(spec).__name__
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}


def population_outside_manifolds(states: np.ndarray, basis: BasisSpec, psi0: np.ndarray,
                                 atol: float = 1e-14) -> np.ndarray:
    """Population outside the excitation-number manifolds that ``psi0`` occupies."""
    n_exc = basis.fock_levels() + basis.excited_counts()
    occupied = np.unique(n_exc[np.abs(np.asarray(psi0)) ** 2 > atol])
    inside = np.isin(n_exc, occupied)
    pops = np.abs(np.asarray(states)) ** 2
    return 1.0 - pops[..., inside].sum(axis=-1)
