"""Acceptance gate: one printed PASS/FAIL line per criterion, then the assertion."""

from math import sqrt

import numpy as np
import pytest
from scipy.linalg import expm

from wclass import dynamics as dyn
from wclass import entanglement as ent
from wclass import optics as opt
from wclass import protocols as proto
from wclass.cli import main
from wclass.corelin import StateVector, binary_entropy, fidelity, kron, partial_trace, trace_distance
from wclass.states import (
    bell,
    collective_S,
    df_states,
    dicke_numbers,
    eta_state,
    ghz_prime,
    ghz_state,
    random_zsa_profile,
    w_state,
)

STRUCT, ASSERT = 1e-10, 1e-12


def gate(number: int, title: str, ok: bool, detail: str) -> None:
    print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    assert ok, f"criterion {number} failed: {detail}"


def test_c01_reduced_w_pair():
    psi_p = bell("psi+").data
    expect = np.zeros((4, 4), dtype=complex)
    expect[0, 0] = 1 / 3
    expect += 2 / 3 * np.outer(psi_p, psi_p.conj())
    dev = np.abs(partial_trace(w_state(3).dm(), [0, 1]).data - expect).max()
    gate(1, "rho_W(12) from |W3>", dev <= ASSERT, f"max deviation {dev:.3e} (tol 1e-12)")


def test_c02_ppt_spectrum_of_reduced_w():
    part = ent.BipartitionSpec((0,), (1,))
    dev, negative = 0.0, True
    mins = []
    for n in range(3, 51):
        lam = np.sort(ent.ppt_spectrum(ent.reduced_w(n, 2), part))
        dev = max(dev, np.abs(lam - ent.ppt_closed_form_w(n)).max())
        negative &= lam[0] < 0
        mins.append(lam[0])
    far = ent.ppt_closed_form_w(10**6)[0]
    shrinking = bool(np.all(np.diff(np.abs(mins)) < 0)) and abs(far) < abs(mins[-1])
    ok = dev <= STRUCT and negative and far < 0 and shrinking
    gate(2, "PPT spectrum closed form, n=3..50", ok,
         f"max deviation {dev:.3e}; all minima negative={negative}; n=1e6 minimum {far:.3e}")


def test_c03_ghz_pair_separable():
    rho = partial_trace(ghz_state(3).dm(), [0, 1])
    part = ent.BipartitionSpec((0,), (1,))
    verdict, neg = ent.ppt_verdict(rho, part), ent.negativity(rho, part)
    gate(3, "rho_GHZ(12) separable", verdict == "separable" and neg <= ASSERT,
         f"verdict {verdict}, negativity {neg:.3e}")


def test_c04_entropy_of_w():
    dev, half_max = 0.0, True
    for n in range(2, 9):
        vals = [ent.ent_entropy(w_state(n), ent.BipartitionSpec.of(range(s), n)) for s in range(1, n)]
        dev = max(dev, max(abs(v - binary_entropy(s / n)) for s, v in enumerate(vals, 1)))
        if n % 2 == 0:
            half_max &= int(np.argmax(np.round(vals, 12))) + 1 == n // 2
    gate(4, "entanglement entropy H(s/n)", dev <= STRUCT and half_max,
         f"max deviation {dev:.3e}; maximum at s=n/2 for even n: {half_max}")


def test_c05_persistency():
    got = (ent.persistency(ghz_state(3)), ent.persistency(w_state(3)), ent.persistency(w_state(4)))
    gate(5, "persistency GHZ3, W3, W4", got == (1, 2, 3), f"{got}, expected (1, 2, 3)")


def test_c06_witnesses():
    v1 = ent.witness_value(ent.witness_w1(), w_state(3))
    v2 = ent.witness_value(ent.witness_w2(), ghz_prime())
    rng = np.random.default_rng(2024)
    lo = np.inf
    for _ in range(1000):
        qs = [rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(3)]
        qs = [q / np.linalg.norm(q) for q in qs]
        lo = min(lo, ent.witness_value(ent.witness_w1(), StateVector(kron(*qs), (2, 2, 2))))
    expansion = ent.witness_w1_pauli_expansion().deviation
    ok = abs(v1 + 1 / 3) <= ASSERT and abs(v2 + 0.5) <= ASSERT and lo >= -STRUCT
    gate(6, "witness values", ok,
         f"Tr[W1 W] + 1/3 = {v1 + 1 / 3:.3e}; Tr[W2 GHZ'] + 1/2 = {v2 + 0.5:.3e}; "
         f"min over products {lo:.4f}; Pauli expansion deviation {expansion:.3e}")


def test_c07_dicke_numbers():
    rng = np.random.default_rng(7)
    ok = True
    for n in range(2, 9):
        ok &= dicke_numbers(w_state(n), ASSERT) == (n / 2, n / 2 - 1)
        for _ in range(5):
            ok &= dicke_numbers(eta_state(random_zsa_profile(n, rng)), ASSERT) == (n / 2 - 1, n / 2 - 1)
    gate(7, "Dicke eigen-checks, n=2..8", bool(ok), "W_n -> (n/2, n/2-1), ZSA -> (n/2-1, n/2-1), variances <= 1e-12")


def test_c08_decoherence_free():
    phi0, psi1 = df_states()
    res = max(np.linalg.norm(collective_S(0, 1, s.n_sub) @ s.data) for s in (bell("psi-"), phi0, psi1))
    rho = bell("psi-").dm()
    drift = trace_distance(dyn.lindblad_collective_decay(rho, 1.0, 10.0, 2000).data, rho.data)
    traj = dyn.lindblad_trajectory(StateVector.qubits("11").dm(), 1.0, 10.0, 2000)
    pops = np.array([s[3, 3].real for s in traj.states])
    mono = bool(np.all(np.diff(pops) <= 0))
    ok = res <= ASSERT and drift <= 1e-8 and mono
    gate(8, "decoherence-free states", ok,
         f"S01 residual {res:.3e}; Psi- drift {drift:.3e} at t=10/gamma; |11> decay monotone {mono}")


def test_c09_optics():
    dev = 0.0
    for n in range(2, 7):
        st = opt.apply_mode_unitary(opt.sps(0, n), opt.multiport_dft(n), list(range(n)))
        cond, p = opt.postselect(st, [opt.Clause(tuple(range(n)), count=1)])
        dev = max(dev, abs(p - 1), abs(opt.fock_fidelity(cond, opt.photonic_w1(n)) - 1))
    tri = opt.run_scheme(opt.load_scheme(opt.shipped_scheme("tritter_w3v")))
    four = opt.run_scheme(opt.load_scheme(opt.shipped_scheme("fourport_w4v")))
    mstat = 0.0
    for n in range(2, 7):
        s = opt.mode_statistics(opt.photonic_w1(n))
        mstat = max(mstat, np.abs(s.mandel + 1 / n).max(), np.abs(s.correlation - 1 / n).max())
    ok = (dev <= ASSERT and abs(tri.probability - 1 / 9) <= ASSERT and abs(tri.fidelity - 1) <= ASSERT
          and abs(four.probability - 1 / 16) <= ASSERT and mstat <= ASSERT)
    gate(9, "optical schemes", ok,
         f"multiport deviation {dev:.3e}; tritter p={tri.probability:.15g} F={tri.fidelity:.15g}; "
         f"4-port p={four.probability:.15g} vs 1/16 (F={four.fidelity:.15g}); "
         f"Mandel/correlation deviation {mstat:.3e}")


def test_c10_raman():
    rng = np.random.default_rng(10)
    dev, idev = 0.0, 0.0
    for n in range(1, 7):
        for m in range(n + 1):
            for t in rng.uniform(0, 5, size=10):
                z = rng.normal(size=2) + 1j * rng.normal(size=2)
                a, b = z / np.linalg.norm(z)
                cf = dyn.raman_closed_form(a, b, m, n, 0.8, t)
                # oracle: scipy matrix exponential of the full truncated Hamiltonian
                h = dyn.atom_field_hamiltonian(n, 0.8, "raman", 2)
                psi0 = dyn.raman_initial(a, b, m, n)
                out = expm(-1j * t * h) @ psi0.vector
                dev = max(dev, np.abs(out - cf.vector).max())
                op = dyn.excitation_integral(n, "raman", 2)
                i0 = np.vdot(psi0.vector, op @ psi0.vector).real
                idev = max(idev, abs(np.vdot(out, op @ out).real - i0))
    wdev = max(abs(dyn.atomic_w_fidelity(n) - 1) for n in range(2, 7))
    ok = dev <= 1e-9 and idev <= STRUCT and wdev <= ASSERT
    gate(10, "Raman dynamics", ok,
         f"closed form vs expm {dev:.3e}; integral drift {idev:.3e}; atomic W fidelity deviation {wdev:.3e}")


def test_c11_ion_sequence():
    # sideband raising operator sigma+ = |S><D|, both pulse orders
    runs = {o: dyn.ion_w_sequence(o, "s_from_d") for o in ("right_to_left", "left_to_right")}
    ok_orders = [o for o, r in runs.items()
                 if r.first_pulse_fidelity >= 1 - 1e-9 and r.final_fidelity >= 1 - 1e-9]
    summary = ", ".join(f"{o}: first {r.first_pulse_fidelity:.3f}, final {r.final_fidelity:.3f}"
                        for o, r in runs.items())
    alt = dyn.ion_w_sequence("left_to_right", "d_from_s")
    gate(11, "ion W sequence", bool(ok_orders),
         f"successful reading {ok_orders[0] if ok_orders else None}; {summary}; "
         f"diagnostic with sigma+ = |D><S|, left-to-right order: first {alt.first_pulse_fidelity:.3f}, "
         f"final {alt.final_fidelity:.3f}")


def test_c12_protocols():
    q = proto.qkd_simulate(100_000, 0)
    s = proto.qss_simulate(100_000, 0)
    rng = np.random.default_rng(12)
    pdev, fdev = 0.0, 0.0
    n_trip = 0
    while n_trip < 100:
        v = np.abs(rng.normal(size=3))
        a, b, c = v / np.linalg.norm(v)
        if c > min(a, b):
            continue
        n_trip += 1
        p, out = proto.distill_w(a, b, c)
        pdev = max(pdev, abs(p - 3 * c * c))
        fdev = max(fdev, abs(fidelity(out, w_state(3)) - 1))
    phis = [proto.random_ent_state(rng) for _ in range(100)]
    tel_res = max(proto.ghz_tel_residual(p.data[1], p.data[2]) for p in phis)
    wc = proto.w_channel().state.data
    wdev = max(abs(wc[4] - 1 / sqrt(2)), abs(wc[2] - 0.5), abs(wc[1] - 0.5),
               np.abs(np.delete(wc, [1, 2, 4])).max())
    tdev = max(1 - proto.teleport(p, ch).min_fidelity
               for p in phis for ch in (proto.ghz_channel(), proto.w_channel()))
    ok = (q.within_sigma(3) and s.within_sigma(3) and s.errors == 0 and pdev <= ASSERT
          and fdev <= ASSERT and tel_res <= ASSERT and wdev <= ASSERT and tdev <= ASSERT)
    gate(12, "protocols", ok,
         f"QKD {q.success_rate:.5f} ({q.qubits_per_key_bit:.2f} qubits/bit); "
         f"QSS {s.success_rate:.5f} ({s.qubits_per_key_bit:.2f} qubits/bit, {s.errors} errors); "
         f"distill {pdev:.1e}/{fdev:.1e}; expansion {tel_res:.1e}; W channel {wdev:.1e}; "
         f"teleport {tdev:.1e}")


def test_c13_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    codes = (main(["verify", "all", "--seed", "0", "--json", str(a)]),
             main(["verify", "all", "--seed", "0", "--json", str(b)]))
    capsys.readouterr()
    same = a.read_bytes() == b.read_bytes()
    # exit codes mirror the suite status; this criterion is about byte equality
    with capsys.disabled():
        gate(13, "verify all determinism", same and codes[0] == codes[1] and a.stat().st_size > 0,
             f"byte-identical={same}, exit codes {codes}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
