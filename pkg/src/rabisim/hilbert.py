"""Truncated spin-boson Hilbert space and elementary operators.

Basis ordering is fixed everywhere in the package: spins first (spin 0 is
the slowest index), the single bosonic mode last.  Each spin uses the
ordered basis ``(|g>, |e>)`` with ``sigma_z |e> = +|e>``, so a composite
index reads ``index = spin_config * (n_max + 1) + n``.

Operators are plain ``numpy`` arrays up to :data:`DENSE_LIMIT`; above that
``embed`` hands back ``scipy.sparse`` CSR matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sparse

DENSE_LIMIT = 4096

Operator = Union[np.ndarray, sparse.spmatrix]


@dataclass(frozen=True)
class BasisSpec:
    """Spins tensored with one Fock mode truncated at ``n_max`` (inclusive)."""

    n_spins: int = 1
    n_max: int = 20

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 1:
            raise ValueError(f"n_spins must be a positive integer, got {self.n_spins!r}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    @property
    def spin_dim(self) -> int:
        return 2 ** self.n_spins

    @property
    def dim(self) -> int:
        return self.spin_dim * self.n_fock

    @property
    def sparse(self) -> bool:
        return self.dim > DENSE_LIMIT

    def index(self, spins: Union[str, Sequence[int]], n: int) -> int:
        """Composite index of ``|spins, n>``; ``spins`` like ``"ge"`` or ``(0, 1)``."""
        bits = [_spin_bit(s) for s in spins]
        if len(bits) != self.n_spins:
            raise ValueError(f"expected {self.n_spins} spin labels, got {len(bits)}")
        if not 0 <= n <= self.n_max:
            raise ValueError(f"Fock level {n} outside 0..{self.n_max}")
        config = 0
        for b in bits:
            config = 2 * config + b
        return config * self.n_fock + n

    def state(self, spins: Union[str, Sequence[int]], n: int = 0) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(spins, n)] = 1.0
        return psi

    def fock_levels(self) -> np.ndarray:
        """Phonon number of every composite basis index."""
        return np.tile(np.arange(self.n_fock), self.spin_dim)

    def excited_counts(self) -> np.ndarray:
        """Number of spins in |e> for every composite basis index."""
        configs = np.arange(self.spin_dim)
        counts = np.array([bin(c).count("1") for c in configs])
        return np.repeat(counts, self.n_fock)


def _spin_bit(label) -> int:
    if label in ("g", 0, "0"):
        return 0
    if label in ("e", 1, "1"):
        return 1
    raise ValueError(f"unknown spin label {label!r}; use 'g'/'e' or 0/1")


def make_ladder(basis: BasisSpec) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation operators on the Fock factor alone.

    Hard truncation: ``a_dag |n_max> = 0``.
    """
    a = np.diag(np.sqrt(np.arange(1, basis.n_fock, dtype=float)), k=1).astype(complex)
    return a, a.conj().T.copy()


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "+": np.array([[0, 0], [1, 0]], dtype=complex),
    "-": np.array([[0, 1], [0, 0]], dtype=complex),
}


def make_pauli(axis: str) -> np.ndarray:
    """Pauli or ladder matrix in the ``(|g>, |e>)`` ordering.

    ``sigma_pm = (sigma_x +- i sigma_y) / 2`` and ``sigma_+ |g> = |e>``.
    """
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected one of x, y, z, +, -") from None


def embed(op: Operator, site: Union[int, str], basis: BasisSpec) -> Operator:
    """Tensor ``op`` with identities on every other subsystem.

    ``site`` is a spin index ``0..n_spins-1`` or ``"boson"``.
    """
    shape = op.shape
    if site == "boson":
        expected, name = basis.n_fock, "boson"
        left, right = basis.spin_dim, 1
    else:
        if not isinstance(site, (int, np.integer)) or not 0 <= site < basis.n_spins:
            raise ValueError(f"site must be 'boson' or a spin index below {basis.n_spins}, got {site!r}")
        expected, name = 2, f"spin {site}"
        left = 2 ** site
        right = 2 ** (basis.n_spins - site - 1) * basis.n_fock
    if shape != (expected, expected):
        raise ValueError(f"operator of shape {shape} does not act on {name} (dimension {expected})")

    if basis.sparse:
        out = sparse.kron(sparse.identity(left, format="csr"), sparse.csr_matrix(op), format="csr")
        return sparse.kron(out, sparse.identity(right, format="csr"), format="csr")
    op = op.toarray() if sparse.issparse(op) else np.asarray(op)
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def identity(basis: BasisSpec) -> Operator:
    if basis.sparse:
        return sparse.identity(basis.dim, dtype=complex, format="csr")
    return np.eye(basis.dim, dtype=complex)


def matrix_exponential(m: Operator) -> np.ndarray:
    """Dense ``exp(m)`` by Pade scaling and squaring."""
    if sparse.issparse(m):
        m = m.toarray()
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix_exponential needs a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix_exponential: input has non-finite entries")
    return scipy.linalg.expm(m)


def dense(op: Operator) -> np.ndarray:
    return op.toarray() if sparse.issparse(op) else np.asarray(op)


def is_hermitian(op: Operator, atol: float = 1e-12) -> bool:
    d = op - op.conj().T
    return max_abs(d) <= atol


def is_unitary(op: Operator, atol: float = 1e-10) -> bool:
    op = dense(op)
    return max_abs(op.conj().T @ op - np.eye(op.shape[0])) <= atol


def max_abs(m: Operator) -> float:
    """Largest absolute entry; the ``max``-norm used in every tolerance check."""
    if sparse.issparse(m):
        return float(abs(m).max()) if m.nnz else 0.0
    return float(np.max(np.abs(m))) if m.size else 0.0


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def interior_projector(basis: BasisSpec, margin: int = 5) -> np.ndarray:
    """Boolean mask of composite indices with Fock level <= n_max - margin."""
    return basis.fock_levels() <= basis.n_max - margin


class SpinBosonOps(NamedTuple):
    """Single-spin operators embedded in the full space, for model builders."""

    a: np.ndarray
    a_dag: np.ndarray
    num: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    sp: np.ndarray
    sm: np.ndarray
    eye: np.ndarray


def spin_boson_ops(basis: BasisSpec) -> SpinBosonOps:
    if basis.n_spins != 1:
        raise ValueError(f"single-spin operator set needs n_spins=1, got {basis.n_spins}")
    a, a_dag = make_ladder(basis)
    A = embed(a, "boson", basis)
    Ad = embed(a_dag, "boson", basis)
    return SpinBosonOps(
        a=A,
        a_dag=Ad,
        num=Ad @ A,
        sx=embed(make_pauli("x"), 0, basis),
        sy=embed(make_pauli("y"), 0, basis),
        sz=embed(make_pauli("z"), 0, basis),
        sp=embed(make_pauli("+"), 0, basis),
        sm=embed(make_pauli("-"), 0, basis),
        eye=np.eye(basis.dim, dtype=complex),
    )


def parity_diagonal(basis: BasisSpec) -> np.ndarray:
    """Eigenvalues of ``exp{i pi [a^dag a + sum_m (sigma_z^m + 1)/2]}`` (diagonal)."""
    return np.where((basis.fock_levels() + basis.excited_counts()) % 2 == 0, 1.0, -1.0)


def parity_operator(basis: BasisSpec) -> Operator:
    d = parity_diagonal(basis).astype(complex)
    return sparse.diags(d, format="csr") if basis.sparse else np.diag(d)


def excitation_number(basis: BasisSpec) -> Operator:
    """``a^dag a + sum_m (sigma_z^m + 1)/2``, diagonal in the product basis."""
    d = (basis.fock_levels() + basis.excited_counts()).astype(complex)
    return sparse.diags(d, format="csr") if basis.sparse else np.diag(d)
