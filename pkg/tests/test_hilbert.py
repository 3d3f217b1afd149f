import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rabisim.hilbert import (
    DENSE_LIMIT,
    BasisSpec,
    commutator,
    dense,
    embed,
    excitation_number,
    identity,
    interior_projector,
    is_hermitian,
    is_unitary,
    make_ladder,
    make_pauli,
    matrix_exponential,
    max_abs,
    parity_diagonal,
    parity_operator,
    spin_boson_ops,
)


def power_series_expm(m, terms=80):
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


def test_basis_dimensions():
    b = BasisSpec(2, 7)
    assert (b.n_fock, b.spin_dim, b.dim) == (8, 4, 32)
    assert not b.sparse


@pytest.mark.parametrize("n_spins,n_max", [(0, 5), (1, 0), (1, -1), (1, 0.5)])
def test_basis_rejects_bad_sizes(n_spins, n_max):
    with pytest.raises((ValueError, TypeError)):
        BasisSpec(n_spins, n_max)


@given(st.integers(1, 3), st.integers(1, 12), st.data())
def test_index_state_roundtrip(n_spins, n_max, data):
    b = BasisSpec(n_spins, n_max)
    spins = data.draw(st.lists(st.integers(0, 1), min_size=n_spins, max_size=n_spins))
    n = data.draw(st.integers(0, n_max))
    i = b.index(spins, n)
    v = b.state(spins, n)
    assert v[i] == 1 and np.count_nonzero(v) == 1
    assert b.fock_levels()[i] == n
    assert b.excited_counts()[i] == sum(spins)


def test_ladder_matrix_elements():
    a, a_dag = make_ladder(BasisSpec(1, 6))
    for n in range(1, 7):
        assert a[n - 1, n] == pytest.approx(math.sqrt(n))
    np.testing.assert_array_equal(a_dag, a.conj().T)


def test_canonical_commutator_away_from_edge():
    b = BasisSpec(1, 15)
    a, a_dag = make_ladder(b)
    c = a @ a_dag - a_dag @ a
    np.testing.assert_allclose(c[:15, :15], np.eye(15), atol=1e-14)
    assert c[15, 15] == pytest.approx(-15)


def test_pauli_algebra():
    x, y, z = (make_pauli(k) for k in "xyz")
    np.testing.assert_allclose(x @ y - y @ x, 2j * z, atol=1e-15)
    sp_, sm = make_pauli("+"), make_pauli("-")
    np.testing.assert_allclose(sp_, (x + 1j * y) / 2)
    np.testing.assert_allclose(sm, (x - 1j * y) / 2)
    # |g> = (1,0), |e> = (0,1)
    np.testing.assert_allclose(z, np.diag([-1, 1]))
    np.testing.assert_allclose(sp_ @ np.array([1, 0]), np.array([0, 1]))


def test_embed_acts_on_named_site():
    b = BasisSpec(2, 3)
    z1 = embed(make_pauli("z"), 1, b)
    for spins in ([0, 0], [0, 1], [1, 0], [1, 1]):
        v = b.state(spins, 2)
        assert v @ z1 @ v == pytest.approx(1 if spins[1] else -1)


def test_embed_dimension_mismatch_names_subsystem():
    b = BasisSpec(1, 4)
    with pytest.raises(ValueError, match="boson"):
        embed(np.eye(3), "boson", b)
    with pytest.raises(ValueError, match="spin"):
        embed(np.eye(3), 0, b)


def test_large_space_is_sparse():
    b = BasisSpec(6, 80)
    assert b.dim > DENSE_LIMIT
    op = embed(make_pauli("x"), 0, b)
    assert sp.issparse(op)
    assert sp.issparse(identity(b))


def test_matrix_exponential_matches_power_series(rng):
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    np.testing.assert_allclose(matrix_exponential(0.3 * m), power_series_expm(0.3 * m), atol=1e-12)


def test_matrix_exponential_rejects_nan():
    with pytest.raises(ValueError):
        matrix_exponential(np.array([[np.nan]]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.floats(0.01, 5.0))
def test_exponential_of_antihermitian_is_unitary(seed, scale):
    r = np.random.default_rng(seed)
    h = r.normal(size=(5, 5)) + 1j * r.normal(size=(5, 5))
    h = scale * (h + h.conj().T)
    assert is_hermitian(h)
    assert is_unitary(matrix_exponential(-1j * h))


def test_interior_projector_drops_top_levels():
    b = BasisSpec(1, 10)
    p = interior_projector(b, margin=3)
    assert p.sum() == 2 * 8


def test_parity_commutes_with_jc_and_counter_rotating_terms():
    b = BasisSpec(1, 10)
    o = spin_boson_ops(b)
    par = dense(parity_operator(b))
    assert max_abs(commutator(par, o.sx @ (o.a + o.a_dag))) < 1e-12
    np.testing.assert_array_equal(np.diag(par), parity_diagonal(b))
    assert parity_diagonal(b)[b.index("g", 0)] == 1
    assert parity_diagonal(b)[b.index("e", 0)] == -1


def test_excitation_number_is_diagonal():
    b = BasisSpec(2, 3)
    n_exc = dense(excitation_number(b))
    np.testing.assert_array_equal(np.diag(n_exc), b.fock_levels() + b.excited_counts())
