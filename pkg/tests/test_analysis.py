import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from rabisim.analysis import (
    Trajectory,
    exact_ground_state,
    fidelity,
    format_float,
    jc_reference_states,
    mean_phonons,
    phonon_distribution,
    population_outside_manifolds,
    spec_dict,
    spin_populations,
)
from rabisim.hilbert import BasisSpec, parity_diagonal
from rabisim.models import QRMSpec, build_jc, build_qrm


@pytest.mark.parametrize("axis", ["x", "y"])
@pytest.mark.parametrize("omega0", [1.0, 1.4])
def test_jc_closed_form_matches_expm(axis, omega0, rng):
    spec = QRMSpec(omega0, 1.0, 0.3, coupling_axis=axis, n_max=8)
    d = spec.basis.dim
    psi0 = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi0 /= np.linalg.norm(psi0)
    t = np.linspace(0, 7, 5)
    h = build_jc(spec)
    want = np.array([expm(-1j * h * tt) @ psi0 for tt in t])
    np.testing.assert_allclose(jc_reference_states(spec, psi0, t), want, atol=1e-12)


def test_ground_state_of_degenerate_doublet_is_even():
    # omega0 = 0 makes the ground level exactly two-fold degenerate
    spec = QRMSpec(0.0, 1.0, 1.0, n_max=40)
    e, psi = exact_ground_state(build_qrm(spec), spec.basis)
    assert e == pytest.approx(-1.0, abs=1e-10)
    assert np.abs(psi) ** 2 @ parity_diagonal(spec.basis) == pytest.approx(1.0, abs=1e-10)
    k = np.argmax(np.abs(psi))
    assert psi[k].imag == 0 and psi[k].real > 0


def test_uncoupled_ground_state_is_vacuum():
    spec = QRMSpec(1.0, 1.0, 0.0, n_max=10)
    e, psi = exact_ground_state(build_qrm(spec), spec.basis)
    assert e == -0.5
    assert mean_phonons(psi, spec.basis) == 0.0
    np.testing.assert_array_equal(np.abs(psi), spec.basis.state("g", 0))


def test_distributions_sum_to_one(rng):
    b = BasisSpec(2, 5)
    psi = rng.normal(size=b.dim) + 0j
    psi /= np.linalg.norm(psi)
    assert phonon_distribution(psi, b).sum() == pytest.approx(1.0)
    pops = spin_populations(psi, b)
    np.testing.assert_allclose(pops.sum(axis=-1), 1.0)


@settings(max_examples=50)
@given(st.integers(0, 10_000), st.floats(0, 2 * np.pi))
def test_fidelity_properties(seed, phase):
    r = np.random.default_rng(seed)
    a = r.normal(size=6) + 1j * r.normal(size=6)
    b = r.normal(size=6) + 1j * r.normal(size=6)
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    f = fidelity(a, b)
    assert 0 <= f <= 1
    assert f == pytest.approx(fidelity(b, a))
    assert fidelity(a, np.exp(1j * phase) * a) == pytest.approx(1.0)


def test_leakage_counts_only_foreign_manifolds():
    b = BasisSpec(1, 5)
    psi0 = b.state("e", 0)
    inside = (b.state("e", 0) + b.state("g", 1)) / np.sqrt(2)
    outside = np.sqrt(0.9) * b.state("e", 0) + np.sqrt(0.1) * b.state("e", 2)
    leak = population_outside_manifolds(np.array([inside, outside]), b, psi0)
    np.testing.assert_allclose(leak, [0.0, 0.1], atol=1e-15)


def _trajectory():
    spec = QRMSpec(1.0, 1.0, 0.2, n_max=4)
    t = np.linspace(0, 1, 3)
    psi0 = spec.basis.state("e", 0)
    states = jc_reference_states(spec, psi0, t)
    return Trajectory(t, states, spec.basis).with_reference(states)


def test_trajectory_table_and_csv():
    traj = _trajectory()
    traj.validate()
    cols = traj.columns()
    assert cols[:5] == ["t", "mean_phonons", "parity", "sigma_z_0", "fidelity"]
    assert cols[-1] == "p_4"
    text = traj.to_csv()
    lines = text.split("\n")
    assert lines[0] == ",".join(cols) and text.endswith("\n")
    first = lines[1].split(",")
    assert len(first) == len(cols)
    assert float(first[4]) == 1.0
    assert traj.summary()["min_fidelity"] == pytest.approx(1.0)


def test_format_float_roundtrips_exactly():
    for x in (0.1, 1 / 3, -2.5e-300, 6.02214076e23):
        s = format_float(x)
        assert float(s) == x
        assert len(s.split("e")[0].replace("-", "").replace(".", "")) == 17


def test_reference_shape_checked():
    traj = _trajectory()
    with pytest.raises(ValueError):
        traj.with_reference(traj.states[:2])


def test_spec_dict_has_type():
    d = spec_dict(QRMSpec(1.0, 1.0, 0.1))
    assert d["type"] == "QRMSpec" and d["g"] == 0.1
    with pytest.raises(TypeError):
        spec_dict(3)
