import numpy as np
import pytest
from scipy.linalg import expm

from rabisim.analysis import fidelity
from rabisim.hilbert import BasisSpec, is_hermitian, make_ladder, spin_boson_ops
from rabisim.ionhw import (
    IonDriveSpec,
    _displacement,
    drive_states,
    effective_qrm_params,
    effective_reference,
    ion_hamiltonian_at,
    rotated_displacement,
    sideband_frequencies,
    simulate_full_drive,
)
from rabisim.propagate import midpoint_states

TWO_PI = 2 * np.pi
JC_SPEC = IonDriveSpec(nu=TWO_PI * 3e6, eta=0.06, omega_r_rabi=TWO_PI * 68e3, omega_b_rabi=TWO_PI * 68e3,
                       delta_r=0.0, delta_b=-TWO_PI * 102e3, n_max=20)


@pytest.mark.parametrize("eta", [0.06, 0.25])
def test_displacement_coherent_overlaps(eta):
    d = _displacement(eta, 40)
    assert d[0, 0] == pytest.approx(np.exp(-eta ** 2 / 2), abs=1e-14)
    assert d[1, 0] == pytest.approx(1j * eta * np.exp(-eta ** 2 / 2), abs=1e-14)


def test_rotated_displacement_matches_direct_exponential():
    a, a_dag = make_ladder(BasisSpec(1, JC_SPEC.n_max))
    for t in (0.0, 1.3e-7, 4.1e-6):
        ph = np.exp(-1j * JC_SPEC.nu * t)
        direct = expm(1j * JC_SPEC.eta * (a * ph + a_dag * ph.conjugate()))
        np.testing.assert_allclose(rotated_displacement(t, JC_SPEC), direct, atol=1e-12)


def test_hamiltonian_hermitian_and_trap_periodic():
    period = TWO_PI / JC_SPEC.nu
    np.testing.assert_allclose(rotated_displacement(0.3e-6 + period, JC_SPEC), rotated_displacement(0.3e-6, JC_SPEC),
                               atol=1e-9)
    resonant = IonDriveSpec(nu=JC_SPEC.nu, eta=0.06, omega_r_rabi=1e5, omega_b_rabi=1e5, delta_r=0.0,
                            delta_b=0.0, n_max=10)
    h0 = ion_hamiltonian_at(0.21e-6, resonant)
    assert is_hermitian(h0)
    np.testing.assert_allclose(ion_hamiltonian_at(0.21e-6 + period, resonant), h0, atol=1e-7 * 1e5)


def test_drive_squares_to_scalar():
    h = ion_hamiltonian_at(2.7e-6, JC_SPEC)
    c2 = (h @ h)[0, 0]
    np.testing.assert_allclose(h @ h, c2 * np.eye(h.shape[0]), atol=1e-6 * abs(c2))


def test_first_order_lamb_dicke_expansion():
    spec = JC_SPEC
    b = spec.basis
    o = spin_boson_ops(b)
    keep = np.flatnonzero(b.fock_levels() <= 2)
    omega = spec.omega_r_rabi
    for t in np.linspace(0, 3e-6, 7):
        h = ion_hamiltonian_at(t, spec)
        ph = np.exp(-1j * spec.nu * t)
        lin = np.eye(spec.n_max + 1) + 1j * spec.eta * (make_ladder(b)[0] * ph + make_ladder(b)[1] * ph.conjugate())
        nf = spec.n_max + 1
        c = h[nf, 0] / rotated_displacement(t, spec)[0, 0]
        h1 = np.zeros_like(h)
        h1[nf:, :nf] = c * lin
        h1[:nf, nf:] = (c * lin).conj().T
        diff = (h - h1)[np.ix_(keep, keep)]
        assert np.max(np.abs(diff)) < 5 * spec.eta ** 2 * omega
    assert o.a.shape[0] == b.dim


def test_kernel_matches_generic_midpoint():
    spec = JC_SPEC
    psi0 = spec.basis.state("e", 0)
    t = np.linspace(0, 2e-6, 3)
    kernel = drive_states(spec, psi0, t, steps_per_period=16)
    steps = int(round(spec.nu * (t[1] - t[0]) / TWO_PI * 16))
    generic = midpoint_states(lambda tt: ion_hamiltonian_at(tt, spec), psi0, t, steps)
    np.testing.assert_allclose(kernel, generic, atol=1e-11)


def test_effective_parameters_and_axis():
    eff = effective_qrm_params(JC_SPEC)
    assert eff.coupling_axis == "y"
    assert eff.omega == pytest.approx(TWO_PI * 51e3)
    assert eff.omega0 == pytest.approx(TWO_PI * 51e3)
    assert eff.g == pytest.approx(0.06 * TWO_PI * 68e3 / 2)
    x_spec = IonDriveSpec(**{**JC_SPEC.__dict__, "phi_r": -np.pi / 2, "phi_b": -np.pi / 2})
    assert effective_qrm_params(x_spec).coupling_axis == "x"


@pytest.mark.parametrize("changes", [{"omega_b_rabi": 1.0}, {"phi_r": 0.3, "phi_b": 0.3}, {"phi_b": -np.pi / 2}])
def test_effective_map_rejects_unmappable_drives(changes):
    with pytest.raises(ValueError):
        effective_qrm_params(IonDriveSpec(**{**JC_SPEC.__dict__, **changes}))


def test_sideband_frequencies_conventions():
    s = IonDriveSpec(**{**JC_SPEC.__dict__, "nu0": TWO_PI * 1e9})
    f = sideband_frequencies(s)
    assert f.omega_r == pytest.approx(s.nu0 - s.nu + s.delta_r)
    assert f.omega_b == pytest.approx(s.nu0 + s.nu + s.delta_b)
    assert f.literal_omega_r == pytest.approx(s.nu0 + s.nu + s.delta_r)


def test_validity_flags():
    assert JC_SPEC.detuning_ok
    assert JC_SPEC.lamb_dicke_ok(1.0)
    assert not JC_SPEC.lamb_dicke_ok(100.0)
    far = IonDriveSpec(**{**JC_SPEC.__dict__, "delta_b": -JC_SPEC.nu / 2})
    assert not far.detuning_ok


@pytest.mark.parametrize("phase", [0.0, -np.pi / 2])
def test_full_drive_tracks_effective_rabi_model(phase):
    spec = IonDriveSpec(**{**JC_SPEC.__dict__, "phi_r": phase, "phi_b": phase, "delta_r": TWO_PI * 20e3,
                           "delta_b": -TWO_PI * 20e3, "n_max": 12})
    psi0 = spec.basis.state("g", 0)
    t = np.linspace(0, 20e-6, 11)
    traj = simulate_full_drive(spec, psi0, t, reference=lambda tt: effective_reference(spec, psi0, tt, "qrm"))
    assert traj.fidelity.min() > 0.999
    # omega0 = 0 here, so counter-rotating terms matter and the JC reference falls behind
    jc = effective_reference(spec, psi0, t, "jc")
    jc_fid = np.abs(np.einsum("ij,ij->i", jc.conj(), traj.states)) ** 2
    assert jc_fid.min() < traj.fidelity.min()
    with pytest.raises(ValueError):
        effective_reference(spec, psi0, t, model="dicke")
    assert fidelity(traj.states[0], psi0) == pytest.approx(1.0)
