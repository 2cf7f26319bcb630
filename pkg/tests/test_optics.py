import json
from math import sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wclass import optics as opt
from strategies import seeds


def test_fock_vector_canonical_and_normalized():
    v = opt.FockVector({(0, 1): 0.6, (1, 0): 0.8}, 2)
    assert list(v.terms) == [(0, 1), (1, 0)]
    with pytest.raises(ValueError):
        opt.FockVector({(0, 1): 1.0, (1, 0): 1.0}, 2)
    with pytest.raises(ValueError):
        opt.FockVector({(7, 0): 1.0}, 2)


@given(seeds)
def test_text_round_trip_is_exact(seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    v = opt.FockVector.normalized({(1, 0, 0): z[0], (0, 1, 0): z[1], (0, 0, 2): z[2]}, 3)
    w = opt.FockVector.from_text(v.to_text())
    assert w.terms == v.terms


def test_hwp_45_swaps_polarization():
    st_h = opt.FockVector.fock((1, 0))
    out = opt.apply_mode_unitary(st_h, opt.hwp(np.pi / 4), [0, 1])
    assert abs(abs(out.amplitude((0, 1))) - 1) < 1e-12


def test_beamsplitter_hong_ou_mandel():
    out = opt.apply_mode_unitary(opt.FockVector.fock((1, 1)), opt.beamsplitter(), [0, 1])
    assert abs(out.amplitude((1, 1))) < 1e-12
    assert abs(abs(out.amplitude((2, 0))) ** 2 - 0.5) < 1e-12


@given(st.integers(2, 6))
def test_dft_is_unitary(n):
    u = opt.multiport_dft(n).matrix
    assert np.abs(u @ u.conj().T - np.eye(n)).max() < 1e-12


def test_non_unitary_element_rejected():
    with pytest.raises(ValueError):
        opt.ModeUnitary(np.array([[1, 1], [0, 1]]))


@given(st.integers(2, 6), st.integers(0, 5))
def test_multiport_single_photon_gives_w(n, k):
    k %= n
    out = opt.apply_mode_unitary(opt.sps(k, n), opt.multiport_dft(n), list(range(n)))
    probs = np.array([abs(out.amplitude(tuple(int(j == m) for j in range(n)))) ** 2 for m in range(n)])
    assert np.abs(probs - 1 / n).max() < 1e-12


@given(seeds)
def test_linear_optics_preserves_norm_and_photon_number(seed):
    rng = np.random.default_rng(seed)
    from wclass.corelin import random_unitary

    u = opt.ModeUnitary(random_unitary(3, rng))
    out = opt.apply_mode_unitary(opt.FockVector.fock((2, 1, 0)), u, [0, 1, 2])
    assert abs(sum(abs(a) ** 2 for a in out.terms.values()) - 1) < 1e-12
    assert set(out.photon_distribution()) == {3}


def test_postselect_empty_and_no_match():
    with pytest.raises(ValueError):
        opt.postselect(opt.sps(0, 2), [])
    cond, p = opt.postselect(opt.sps(0, 2), [opt.Clause((1,), count=1)])
    assert cond is None and p == 0.0
    with pytest.raises(ValueError):
        opt.postselect(opt.sps(0, 2), [opt.Clause((4,), count=1)])


@pytest.mark.parametrize("name,prob,fid", [
    ("multiport_w4", 1.0, 1.0),
    ("tritter_w3v", 1 / 9, 1.0),
    ("fourport_w4v", 1 / 16, 1.0),
    ("collinear_w3v", 3 / 64, 1.0),
])
def test_shipped_schemes(name, prob, fid):
    rep = opt.run_scheme(opt.load_scheme(opt.shipped_scheme(name)))
    assert abs(rep.probability - prob) < 1e-12
    assert abs(rep.fidelity - fid) < 1e-12


def test_fourport_without_phase_plates_is_zsa():
    d = json.loads(opt.shipped_scheme("fourport_w4v").read_text())
    d["elements"] = [e for e in d["elements"] if e["type"] != "phase"]
    rep = opt.run_scheme(opt.parse_scheme(d))
    assert abs(rep.probability - 1 / 16) < 1e-12
    qubits = opt.fock_to_qubits(rep.conditional_state, range(4))
    amps = qubits[[1 << (3 - k) for k in range(4)]]
    assert abs(amps.sum()) < 1e-12


def test_psi4_scheme_and_trigger_search():
    scheme = opt.load_scheme(opt.shipped_scheme("psi4_w3v"))
    rep = opt.run_scheme(scheme)
    assert abs(rep.fidelity - 8 / 27) < 1e-12
    found = opt.trigger_search(scheme)
    assert set(found["settings"]) == set(opt.TRIGGER_SETTINGS)
    assert found["settings"][found["best"]]["fidelity"] >= rep.fidelity - 1e-12


def test_scheme_errors_name_the_field(tmp_path):
    with pytest.raises(opt.SchemeError, match="postselect"):
        opt.parse_scheme({"modes": 2, "source": {"kind": "sps", "mode": 0}})
    with pytest.raises(opt.SchemeError, match=r"elements\[0\]"):
        opt.parse_scheme({"modes": 2, "source": {"kind": "sps", "mode": 0},
                          "elements": [{"type": "mirror", "targets": [0]}],
                          "postselect": [{"modes": [0], "count": 1}]})
    bad = tmp_path / "bad.scheme"
    bad.write_text('{"modes": 2,\n "source": }')
    with pytest.raises(opt.SchemeError, match="line 2"):
        opt.load_scheme(bad)


def test_truncation_overflow():
    d = {"modes": 2, "source": {"kind": "fock", "occupation": [2, 2]},
         "postselect": [{"modes": [0], "at_least": 0}]}
    with pytest.raises((OverflowError, ValueError)):
        opt.run_scheme(opt.parse_scheme(d, n_max=3))


@pytest.mark.parametrize("n", range(2, 7))
def test_mode_statistics_of_w(n):
    s = opt.mode_statistics(opt.photonic_w1(n))
    assert np.abs(s.mandel + 1 / n).max() < 1e-12
    assert np.abs(s.correlation - 1 / n).max() < 1e-12
    assert np.abs(s.mean_a).max() < 1e-12


def test_anticorrelation_report():
    rep = opt.anticorrelation_report(3)
    assert rep["distinct_mode_coincidence"] == 0
    assert rep["distinct_less_than_product"]
    assert not rep["moment_one_over_n_below_product"]


def test_photonic_wv_layout():
    v = opt.photonic_wV(3)
    occ = (0, 1, 1, 0, 1, 0)  # V on port 0, H on ports 1, 2
    assert abs(v.amplitude(occ) - 1 / sqrt(3)) < 1e-12
