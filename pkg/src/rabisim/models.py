"""Time-independent spin-boson Hamiltonians.

All frequencies are angular frequencies (rad/s or any consistent unit).
``coupling_axis="y"`` stands for the coupling ``i g (sigma_+ - sigma_-)(a + a^dag)``
produced by the bichromatic ion drive.  With ``sigma_pm = (sigma_x +- i sigma_y)/2``
that operator equals ``-sigma_y (a + a^dag)``; it is unitarily equivalent to the
x-axis coupling through ``exp(+i pi sigma_z / 4)`` and shares its spectrum.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sparse

from rabisim.hilbert import (
    BasisSpec,
    embed,
    make_ladder,
    make_pauli,
    matrix_exponential,
    spin_boson_ops,
)

log = logging.getLogger(__name__)

COUPLING_AXES = ("x", "y")


@dataclass(frozen=True)
class QRMSpec:
    """Quantum Rabi model parameters: ``(omega0/2) sz + omega n + g C``."""

    omega0: float
    omega: float
    g: float
    coupling_axis: str = "x"
    n_max: int = 20

    def __post_init__(self):
        if self.coupling_axis not in COUPLING_AXES:
            raise ValueError(f"coupling_axis must be 'x' or 'y', got {self.coupling_axis!r}")
        for name in ("omega0", "omega", "g"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.exotic:
            log.warning("QRMSpec with negative frequency (omega0=%g, omega=%g) flagged as exotic",
                        self.omega0, self.omega)

    @property
    def exotic(self) -> bool:
        """Negative simulated frequency, reachable from detuning differences."""
        return self.omega < 0 or self.omega0 < 0

    @property
    def basis(self) -> BasisSpec:
        return BasisSpec(1, self.n_max)

    @property
    def ratio(self) -> float:
        """Coupling strength ``g / omega``."""
        return self.g / self.omega if self.omega else np.inf

    def replace(self, **changes) -> "QRMSpec":
        kw = dict(omega0=self.omega0, omega=self.omega, g=self.g,
                  coupling_axis=self.coupling_axis, n_max=self.n_max)
        kw.update(changes)
        return QRMSpec(**kw)


@dataclass(frozen=True)
class DickeSpec:
    """N spins on one mode; per-spin ``omega_q`` and ``g`` (scalars broadcast)."""

    n_spins: int
    omega: float
    omega_q: Union[float, Sequence[float]]
    g: Union[float, Sequence[float]]
    n_max: int = 10

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("DickeSpec needs at least one spin")
        for name in ("omega_q", "g"):
            vals = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (self.n_spins,))
            object.__setattr__(self, name, tuple(float(v) for v in vals))

    @property
    def homogeneous(self) -> bool:
        return len(set(self.omega_q)) == 1 and len(set(self.g)) == 1

    @property
    def basis(self) -> BasisSpec:
        return BasisSpec(self.n_spins, self.n_max)


@dataclass(frozen=True)
class CircuitSpec:
    """Transmon-resonator device seen from a frame rotating at ``omega_tilde``.

    ``omega_q1``/``omega_q2`` are the physical qubit frequencies used in the two
    digital steps; they default to the idle ``omega_q``.
    """

    omega_r: float
    omega_q: float
    g: float
    omega_tilde: float = 0.0
    omega_q1: Optional[float] = None
    omega_q2: Optional[float] = None
    n_max: int = 20

    def __post_init__(self):
        if self.omega_q1 is None:
            object.__setattr__(self, "omega_q1", self.omega_q)
        if self.omega_q2 is None:
            object.__setattr__(self, "omega_q2", self.omega_q)

    @property
    def basis(self) -> BasisSpec:
        return BasisSpec(1, self.n_max)

    @property
    def delta_r(self) -> float:
        return self.omega_r - self.omega_tilde

    @property
    def delta_q(self) -> float:
        return (self.omega_q - self.omega_tilde) / 2

    @property
    def delta_q1(self) -> float:
        return (self.omega_q1 - self.omega_tilde) / 2

    @property
    def delta_q2(self) -> float:
        return (self.omega_q2 - self.omega_tilde) / 2

    @property
    def step_frequencies(self) -> tuple[float, float]:
        """Spin frequencies entering the two halves of the Rabi split."""
        return 2 * self.delta_q1, 2 * self.delta_q2

    @property
    def simulated_omega_r(self) -> float:
        return 2 * self.delta_r

    @property
    def simulated_omega_q(self) -> float:
        w1, w2 = self.step_frequencies
        return w1 - w2

    def with_frame(self, omega_tilde: float) -> "CircuitSpec":
        return CircuitSpec(self.omega_r, self.omega_q, self.g, omega_tilde,
                           self.omega_q1, self.omega_q2, self.n_max)


def _basis_for(spec, basis: Optional[BasisSpec]) -> BasisSpec:
    basis = spec.basis if basis is None else basis
    if basis.n_spins != 1:
        raise ValueError(f"single-spin model built on a {basis.n_spins}-spin basis")
    return basis


def coupling_operator(axis: str, basis: BasisSpec) -> np.ndarray:
    """Spin-boson coupling operator without the strength ``g``."""
    o = spin_boson_ops(basis)
    quad = o.a + o.a_dag
    if axis == "x":
        return o.sx @ quad
    if axis == "y":
        return 1j * (o.sp - o.sm) @ quad
    raise ValueError(f"coupling_axis must be 'x' or 'y', got {axis!r}")


def build_qrm(spec: QRMSpec, basis: Optional[BasisSpec] = None) -> np.ndarray:
    basis = _basis_for(spec, basis)
    o = spin_boson_ops(basis)
    return (spec.omega0 / 2) * o.sz + spec.omega * o.num + spec.g * coupling_operator(spec.coupling_axis, basis)


def build_jc(spec: QRMSpec, basis: Optional[BasisSpec] = None) -> np.ndarray:
    """Rotating-wave part of :func:`build_qrm` (same coupling phase)."""
    basis = _basis_for(spec, basis)
    o = spin_boson_ops(basis)
    c = spec.g if spec.coupling_axis == "x" else 1j * spec.g
    v = c * (o.sp @ o.a)
    return (spec.omega0 / 2) * o.sz + spec.omega * o.num + v + v.conj().T


def build_dicke(spec: DickeSpec, basis: Optional[BasisSpec] = None):
    """Dicke Hamiltonian; dense up to the dense limit, CSR above it."""
    basis = spec.basis if basis is None else basis
    if basis.n_spins != spec.n_spins:
        raise ValueError(f"DickeSpec has {spec.n_spins} spins, basis has {basis.n_spins}")
    a, a_dag = make_ladder(basis)
    A = embed(a, "boson", basis)
    Ad = embed(a_dag, "boson", basis)
    h = spec.omega * (Ad @ A)
    for m in range(spec.n_spins):
        sz = embed(make_pauli("z"), m, basis)
        sp = embed(make_pauli("+"), m, basis)
        tc = spec.g[m] * (A @ sp)
        atc = spec.g[m] * (Ad @ sp)
        h = h + (spec.omega_q[m] / 2) * sz + tc + tc.conj().T + atc + atc.conj().T
    return h.tocsr() if sparse.issparse(h) else h


def build_circuit_jc(spec: CircuitSpec, basis: Optional[BasisSpec] = None) -> np.ndarray:
    """Lab-frame transmon-resonator Hamiltonian."""
    basis = _basis_for(spec, basis)
    o = spin_boson_ops(basis)
    v = spec.g * (o.a @ o.sp)
    return spec.omega_r * o.num + (spec.omega_q / 2) * o.sz + v + v.conj().T


def build_rotating_frame_jc(spec: CircuitSpec, step: Optional[int] = None,
                            basis: Optional[BasisSpec] = None) -> np.ndarray:
    """Device Hamiltonian in the frame rotating at ``omega_tilde``.

    ``step`` selects the qubit detuning of digital step 1 or 2; ``None`` uses
    the idle qubit frequency.
    """
    basis = _basis_for(spec, basis)
    dq = {None: spec.delta_q, 1: spec.delta_q1, 2: spec.delta_q2}[step]
    o = spin_boson_ops(basis)
    v = spec.g * (o.a @ o.sp)
    return spec.delta_r * o.num + dq * o.sz + v + v.conj().T


def build_h1_h2(spec: CircuitSpec, basis: Optional[BasisSpec] = None) -> tuple[np.ndarray, np.ndarray]:
    """JC and anti-JC halves whose sum is the simulated Rabi Hamiltonian."""
    basis = _basis_for(spec, basis)
    o = spin_boson_ops(basis)
    w1, w2 = spec.step_frequencies
    half_r = spec.simulated_omega_r / 2
    jc = spec.g * (o.a @ o.sp)
    ajc = spec.g * (o.a_dag @ o.sp)
    h1 = half_r * o.num + (w1 / 2) * o.sz + jc + jc.conj().T
    h2 = half_r * o.num - (w2 / 2) * o.sz + ajc + ajc.conj().T
    return h1, h2


def x_rotation(angle: float, basis: BasisSpec, site: int = 0) -> np.ndarray:
    """``exp(-i angle sigma_x / 2)`` on one spin."""
    return embed(matrix_exponential(-0.5j * angle * make_pauli("x")), site, basis)


def z_rotation(angle: float, basis: BasisSpec, site: int = 0) -> np.ndarray:
    """``exp(-i angle sigma_z / 2)`` on one spin."""
    return embed(matrix_exponential(-0.5j * angle * make_pauli("z")), site, basis)


def interaction_picture_residual(alpha: float, beta: float, basis: BasisSpec) -> np.ndarray:
    """Generator ``alpha a^dag a + beta sigma_z`` of the frame changes."""
    o = spin_boson_ops(_basis_for(None, basis))
    return alpha * o.num + beta * o.sz
