import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from wclass import dynamics as dyn
from wclass.corelin import DensityMatrix, StateVector, evolve, trace_distance
from wclass.states import bell, collective_S, w_state
from strategies import complex_vectors


@given(st.integers(1, 6), st.data(), complex_vectors(2), st.floats(0, 6))
def test_raman_closed_form_matches_numeric(n, data, ab, t):
    m = data.draw(st.integers(0, n))
    cf = dyn.raman_closed_form(ab[0], ab[1], m, n, 0.9, t)
    nu = dyn.raman_numeric(ab[0], ab[1], m, n, 0.9, t)
    assert np.abs(cf.amps - nu.amps).max() < 1e-9


@given(st.integers(1, 4), st.floats(0, 4))
def test_full_evolution_agrees_with_subspace(n, t):
    st0 = dyn.raman_initial(0.6, 0.8, min(1, n), n)
    full = dyn.evolve_full(st0, 0.9, t)
    sub = dyn.raman_numeric(0.6, 0.8, min(1, n), n, 0.9, t)
    assert np.abs(full.amps - sub.amps).max() < 1e-10


@pytest.mark.parametrize("kind", ["raman", "one_photon"])
def test_excitation_integral_commutes(kind):
    h = dyn.atom_field_hamiltonian(3, 1.0, kind, n_max=3)
    i = dyn.excitation_integral(3, kind, n_max=3)
    if kind == "raman":
        # one-photon absorption leaks at the photon cutoff, Raman does not
        assert np.abs(h @ i - i @ h).max() < 1e-12
    st0 = dyn.raman_initial(1.0, 0.0, 0, 3, n_max=3)
    before = dyn.integral_expectation(st0, kind)
    after = dyn.integral_expectation(dyn.evolve_full(st0, 1.0, 0.8, kind), kind)
    assert abs(before - after) < 1e-10


def test_invalid_raman_arguments():
    with pytest.raises(ValueError):
        dyn.raman_closed_form(1.0, 0.0, 4, 3, 1.0, 0.1)
    with pytest.raises(ValueError):
        dyn.raman_initial(1.0, 1.0, 0, 3)
    with pytest.raises(ValueError):
        dyn.atom_field_hamiltonian(2, 1.0, "two_photon")


@pytest.mark.parametrize("n", range(2, 7))
def test_pi_half_pulse_prepares_w(n):
    assert abs(dyn.atomic_w_fidelity(n) - 1) < 1e-12


def test_s_from_d_sideband_leaves_ground_state_dark():
    psi = dyn.ion_basis("SSS", 0)
    for ion in (1, 2, 3):
        out = dyn.ion_Rplus(1.3, 0.4, ion, "s_from_d") @ psi.data
        assert np.abs(out - psi.data).max() < 1e-12


def test_ion_readings():
    out = dyn.ion_w_readings()
    assert out["chosen"] is None
    assert out["alternative"] == "left_to_right/d_from_s"
    alt = out["runs"]["left_to_right/d_from_s"]
    assert alt.first_pulse_fidelity > 1 - 1e-9
    assert alt.final_fidelity > 1 - 1e-9
    assert alt.max_leakage < 1e-12
    assert alt.ion_purity > 1 - 1e-9
    for key, run in out["runs"].items():
        if key != "left_to_right/d_from_s":
            assert run.final_fidelity < 0.5


def test_two_level_map_matches_pulse():
    a, b = 0.6, 0.8j
    u = dyn.ion_R(0.9, 0.3, 1)
    psi = a * dyn.ion_basis("SSS").data + b * dyn.ion_basis("DSS").data
    out = u @ psi
    mapped = dyn.two_level_map(a, b, 0.9, 0.3)
    got = np.array([out[np.ravel_multi_index((0, 0, 0, 0), dyn.ION_DIMS)],
                    out[np.ravel_multi_index((1, 0, 0, 0), dyn.ION_DIMS)]])
    assert np.abs(got - mapped).max() < 1e-12


def test_ion_pulses_are_unitary():
    from wclass.corelin import is_unitary

    for conv in dyn.CONVENTIONS:
        for ion in (1, 2, 3):
            assert is_unitary(dyn.ion_R(0.7, 0.3, ion, conv))
            assert is_unitary(dyn.ion_Rplus(0.7, 0.3, ion, conv))
    with pytest.raises(ValueError):
        dyn.ion_R(0.1, 0.0, 0)


def test_gauge_fidelity_removes_local_phases():
    target = dyn.ion_w_target()
    ph = np.exp(1j * np.array([0.3, -1.1, 2.0]))
    d = np.ones(8, dtype=complex)
    for i in range(8):
        for k in range(3):
            if (i >> (2 - k)) & 1:
                d[i] *= ph[k]
    rotated = StateVector(d * target.data, (2, 2, 2))
    fid, _ = dyn.gauge_fidelity(rotated.dm().data, target)
    assert fid > 1 - 1e-12


def test_lindblad_matches_liouvillian():
    rho0 = StateVector.normalized([0.3, 0.5, 0.4j, 0.7], (2, 2)).dm()
    gamma, t = 0.7, 1.3
    traj = dyn.lindblad_trajectory(rho0, gamma, t, 400)
    r = collective_S(0, 1, 2)
    vec = expm(dyn.liouvillian(r, gamma) * t) @ rho0.data.reshape(-1)
    assert np.abs(traj.states[-1] - vec.reshape(4, 4)).max() < 1e-8
    assert traj.min_eigenvalue > -1e-10


def test_psi_minus_is_decoherence_free():
    rho = bell("psi-").dm()
    out = dyn.lindblad_collective_decay(rho, 1.0, 10.0, 2000)
    assert trace_distance(out.data, rho.data) < 1e-8


def test_excited_pair_decays_monotonically():
    traj = dyn.lindblad_trajectory(StateVector.qubits("11").dm(), 1.0, 10.0, 2000)
    pops = np.array([s[3, 3].real for s in traj.states])
    assert np.all(np.diff(pops) <= 1e-12)
    assert pops[-1] < 1e-6


def test_lindblad_guards():
    rho = StateVector.qubits("11").dm()
    with pytest.raises(ValueError, match="step size"):
        dyn.lindblad_trajectory(rho, 1.0, 100.0, 10)
    with pytest.raises(ValueError):
        dyn.lindblad_trajectory(rho, -1.0, 1.0, 10)
    with pytest.raises(ValueError):
        dyn.lindblad_trajectory(rho, 1.0, 1.0, 0)


def test_df_check():
    assert dyn.df_check(bell("psi-")) < 1e-12
    w = w_state(3)
    assert dyn.df_check(w) < 1e-12
    assert abs(dyn.collective_decay_amplitude(w) - np.sqrt(3)) < 1e-12


def test_evolve_is_exp():
    h = dyn.atom_field_hamiltonian(2, 1.0)
    assert np.abs(evolve(h, 0.4) - expm(-0.4j * h)).max() < 1e-12
    assert isinstance(bell("psi-").dm(), DensityMatrix)
