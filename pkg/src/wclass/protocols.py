"""Key distribution, secret sharing, distillation and teleportation with W-class
resources.

Outcome labels: sigma_z gives +1 for |0> and -1 for |1>; sigma_x gives +1 for
|+> and -1 for |->. Randomness comes from a Philox counter stream keyed by the
seed, one 4-word block per round, so any contiguous range of rounds can be
regenerated on its own.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import sqrt
from typing import Optional, Sequence

import numpy as np

from .corelin import StateVector, fidelity, is_unitary, kron
from .states import bell, ghz_state, w_state

H = np.array([[1, 1], [1, -1]]) / sqrt(2)
I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
PAULIS = {"I": I2.astype(complex), "X": X, "Y": Y, "Z": Z}

BASES = ("z", "x")
E91_SUCCESS = 2 / 9
E91_QUBITS_PER_BIT = 9


# --- randomness -------------------------------------------------------------

def round_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms for rounds [start, start+count); row r depends only on (seed, r)."""
    bitgen = np.random.Philox(key=seed).advance(start)
    return np.random.Generator(bitgen).random((count, 4))


# --- Born rule for three-party W measurements --------------------------------

def outcome_table(psi: StateVector, bases: Sequence[str]) -> np.ndarray:
    """Joint outcome probabilities, indexed by bits b_k (0 -> +1, 1 -> -1)."""
    rot = kron(*[H if b == "x" else I2 for b in bases])
    amps = rot @ psi.data
    return np.abs(amps) ** 2


def _tables(psi: StateVector):
    n = psi.n_sub
    patterns = list(itertools.product(BASES, repeat=n))
    cdf = {}
    for pat in patterns:
        p = outcome_table(psi, pat)
        cdf[pat] = np.cumsum(p / p.sum())
    return patterns, cdf


def _sample(seed: int, rounds: int, start: int = 0, psi: Optional[StateVector] = None):
    psi = psi or w_state(3)
    n = psi.n_sub
    u = round_uniforms(seed, start, rounds)
    basis_bits = (u[:, :n] < 0.5).astype(int)     # 0 -> z, 1 -> x
    outcomes = np.zeros((rounds, n), dtype=int)
    patterns, cdf = _tables(psi)
    codes = basis_bits @ (1 << np.arange(n - 1, -1, -1))
    for code in np.unique(codes):
        pat = tuple("x" if (code >> (n - 1 - k)) & 1 else "z" for k in range(n))
        sel = codes == code
        idx = np.searchsorted(cdf[pat], u[sel, 3], side="right")
        idx = np.minimum(idx, 2**n - 1)
        bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
        outcomes[sel] = 1 - 2 * bits
    return basis_bits, outcomes


@dataclass
class ProtocolTranscript:
    protocol: str
    seed: int
    bases: np.ndarray        # rounds x 3, 0 = z, 1 = x
    outcomes: np.ndarray     # rounds x 3, values +/-1
    accepted: np.ndarray     # bool per round
    key_bits: np.ndarray     # per round, -1 where no key
    exact_rate: float
    errors: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return int(self.accepted.size)

    @property
    def n_accepted(self) -> int:
        return int(self.accepted.sum())

    @property
    def qubits_consumed(self) -> int:
        return 3 * self.rounds

    @property
    def success_rate(self) -> float:
        return self.n_accepted / self.rounds

    @property
    def stderr(self) -> float:
        p = self.success_rate
        return sqrt(p * (1 - p) / self.rounds)

    @property
    def qubits_per_key_bit(self) -> float:
        return self.qubits_consumed / self.n_accepted if self.n_accepted else float("inf")

    def within_sigma(self, k: float = 3.0) -> bool:
        p = self.exact_rate
        return abs(self.success_rate - p) <= k * sqrt(p * (1 - p) / self.rounds)

    def summary(self) -> dict:
        out = {
            "protocol": self.protocol,
            "rounds": self.rounds,
            "accepted": self.n_accepted,
            "success_rate": _sig(self.success_rate),
            "stderr": _sig(self.stderr),
            "qubits_per_key_bit": _sig(self.qubits_per_key_bit),
            "seed": self.seed,
            "exact_success_rate": _sig(self.exact_rate),
            "errors": self.errors,
        }
        out.update({k: _sig(v) if isinstance(v, float) else v for k, v in self.extra.items()})
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2) + "\n"


def _sig(x: float) -> float:
    return float(f"{x:.15g}")


def _check_rounds(rounds: int):
    if rounds < 1:
        raise ValueError("rounds must be >= 1")


def qkd_exact_rate() -> float:
    """Probability per round of one z-measurer reading +1 and two x-measurers."""
    w = w_state(3)
    total = 0.0
    for pat in itertools.product(BASES, repeat=3):
        if pat.count("z") != 1:
            continue
        k = pat.index("z")
        p = outcome_table(w, pat)
        zbit = np.array([(i >> (2 - k)) & 1 for i in range(8)])
        total += p[zbit == 0].sum() / 8
    return float(total)


def qkd_simulate(rounds: int, seed: int = 0, start: int = 0) -> ProtocolTranscript:
    """Three parties measure a shared W in random x/z bases.

    A round is kept when exactly one party chose z and obtained +1 (|0>); the
    other two then hold Psi+ and their equal x outcomes form the key bit.
    """
    _check_rounds(rounds)
    bases, outcomes = _sample(seed, rounds, start)
    n_z = (bases == 0).sum(axis=1)
    zpos = np.argmax(bases == 0, axis=1)
    zout = outcomes[np.arange(rounds), zpos]
    accepted = (n_z == 1) & (zout == 1)
    key = np.full(rounds, -1)
    mism = 0
    for r in np.flatnonzero(accepted):
        xs = outcomes[r, bases[r] == 1]
        if xs[0] != xs[1]:
            mism += 1
        key[r] = int(xs[0] == -1)
    return ProtocolTranscript(
        "qkd", seed, bases, outcomes, accepted, key, qkd_exact_rate(), mism,
        extra={"e91_success_rate": E91_SUCCESS, "e91_qubits_per_key_bit": E91_QUBITS_PER_BIT},
    )


def qss_reconstruct(bob: int, claire: int) -> int:
    """Alice's z outcome from Bob's and Claire's: opposite -> +1, equal -> -1."""
    return 1 if bob != claire else -1


def qss_simulate(rounds: int, seed: int = 0, start: int = 0) -> ProtocolTranscript:
    """Kept when all three measured z; Bob and Claire jointly recover Alice's outcome."""
    _check_rounds(rounds)
    bases, outcomes = _sample(seed, rounds, start)
    accepted = (bases == 0).all(axis=1)
    key = np.full(rounds, -1)
    errors = 0
    for r in np.flatnonzero(accepted):
        a, b, c = outcomes[r]
        if qss_reconstruct(b, c) != a:
            errors += 1
        key[r] = int(a == -1)
    return ProtocolTranscript(
        "qss", seed, bases, outcomes, accepted, key, 1 / 8, errors,
        extra={"single_party_information": single_party_information()},
    )


def qss_exhaustive_errors() -> int:
    """Reconstruction failures over every z-basis outcome of W with nonzero probability."""
    p = outcome_table(w_state(3), ("z", "z", "z"))
    bad = 0
    for i in range(8):
        if p[i] <= 0:
            continue
        a, b, c = (1 - 2 * ((i >> (2 - k)) & 1) for k in range(3))
        bad += qss_reconstruct(b, c) != a
    return bad


def single_party_information() -> float:
    """Mutual information (bits) between Alice's z outcome and Bob's alone."""
    p = outcome_table(w_state(3), ("z", "z", "z")).reshape(2, 2, 2).sum(axis=2)
    pa, pb = p.sum(axis=1), p.sum(axis=0)
    mi = 0.0
    for i in range(2):
        for j in range(2):
            if p[i, j] > 0:
                mi += p[i, j] * np.log2(p[i, j] / (pa[i] * pb[j]))
    return float(mi)


# --- distillation -----------------------------------------------------------

def distill_unitary(v: float) -> np.ndarray:
    if not 0 <= v <= 1:
        raise ValueError("v must lie in [0, 1]")
    s = sqrt(1 - v * v)
    return np.array([[1, 0, 0, 0], [0, v, 0, s], [0, 0, -1, 0], [0, s, 0, -v]], dtype=complex)


NORM_TOL = 1e-9  # admits coefficients typed to ~10 digits


def _check_distill(a, b, c):
    norm2 = a * a + b * b + c * c
    if abs(norm2 - 1) > NORM_TOL:
        raise ValueError("a^2 + b^2 + c^2 must be 1")
    a, b, c = (x / sqrt(norm2) for x in (a, b, c))
    if c <= 0:
        raise ValueError("c must be positive")
    if c > a or c > b:
        raise ValueError("need c <= min(a, b) so that c/a and c/b are at most 1")
    return a, b, c


def _apply_two(u: np.ndarray, state: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    t = state.reshape((2,) * n)
    t = np.moveaxis(t, (q1, q2), (0, 1))
    shape = t.shape
    t = (u @ t.reshape(4, -1)).reshape(shape)
    return np.moveaxis(t, (0, 1), (q1, q2)).reshape(-1)


def _distill_run(a, b, c, ancilla_first=True, swap_targets=False, keep=0):
    # register: ancilla (index 0), qubits 1..3
    psi = np.zeros(16, dtype=complex)
    psi[0b0100], psi[0b0010], psi[0b0001] = a, b, c
    v1, v2 = c / a, c / b
    t1, t2 = (2, 1) if swap_targets else (1, 2)
    for v, tq in ((v1, t1), (v2, t2)):
        u = distill_unitary(min(v, 1.0))
        psi = _apply_two(u, psi, 0, tq, 4) if ancilla_first else _apply_two(u, psi, tq, 0, 4)
    branch = psi.reshape(2, 8)[keep]
    prob = float(np.vdot(branch, branch).real)
    out = StateVector.normalized(branch, (2, 2, 2)) if prob > 0 else None
    return prob, out


def distill_w(a: float, b: float, c: float) -> tuple[float, StateVector]:
    """Append an ancilla, apply U1 (v = c/a) on (ancilla, q1) and U2 (v = c/b) on
    (ancilla, q2), keep the ancilla-|0> branch."""
    return _distill_run(*_check_distill(a, b, c))


def distill_failure(a: float, b: float, c: float) -> tuple[float, Optional[StateVector]]:
    return _distill_run(*_check_distill(a, b, c), keep=1)


def distill_wiring_search(a: float, b: float, c: float) -> list[dict]:
    """All 8 wirings: basis order x target assignment x kept ancilla outcome."""
    a, b, c = _check_distill(a, b, c)
    w = w_state(3)
    rows = []
    for ancilla_first, swap, keep in itertools.product((True, False), (False, True), (0, 1)):
        prob, out = _distill_run(a, b, c, ancilla_first, swap, keep)
        rows.append({
            "ancilla_first": ancilla_first, "swap_targets": swap, "keep": keep,
            "probability": prob,
            "fidelity": fidelity(out, w) if out is not None else 0.0,
        })
    return rows


# --- teleportation of alpha|01> + beta|10> -----------------------------------

def _ent_state(alpha: complex, beta: complex) -> StateVector:
    return StateVector.normalized([0, alpha, beta, 0], (2, 2))


def _in_span(phi: StateVector, tol: float = 1e-12) -> None:
    if phi.dims != (2, 2) or abs(phi.data[0]) > tol or abs(phi.data[3]) > tol:
        raise ValueError("state must lie in span{|01>, |10>}")


BELL_NAMES = ("phi+", "phi-", "psi+", "psi-")


SIGMA_X_QUBIT = 1  # position within (1, 2, A); the Bell pair sits on the other two


def measurement_basis(sigma_x_qubit: int = SIGMA_X_QUBIT) -> list[tuple[str, np.ndarray]]:
    """Eight vectors on (1, 2, A): a Bell pair times a sigma_x eigenvector.

    A Bell pair on (1, 2) cannot work: it only sees the Psi+/- part of a state
    in span{|01>, |10>}. Placing sigma_x on qubit 1 or on qubit 2 both succeed.
    """
    if sigma_x_qubit not in (0, 1, 2):
        raise ValueError("sigma_x_qubit must be 0, 1 or 2")
    pair = [q for q in range(3) if q != sigma_x_qubit]
    axes = [0, 0, 0]
    axes[pair[0]], axes[pair[1]], axes[sigma_x_qubit] = 0, 1, 2
    out = []
    for name in BELL_NAMES:
        for lab, v in (("+", H[:, 0]), ("-", H[:, 1])):
            t = np.kron(bell(name).data, v).reshape(2, 2, 2)
            out.append((f"{name}/x{lab}", np.transpose(t, axes).reshape(8)))
    return out


@dataclass
class Branch:
    label: str
    phi_x: np.ndarray          # 3-qubit measurement vector on (1, 2, A)
    b_op: np.ndarray
    c_op: np.ndarray
    words: str


def _branch_map(phi_x: np.ndarray, channel: np.ndarray) -> np.ndarray:
    """Linear map (on the |01>, |10> span) from phi_12 to sqrt8 <Phi_x|_{12A} (phi x channel)."""
    cols = []
    for basis in (np.array([0, 1, 0, 0]), np.array([0, 0, 1, 0])):
        full = np.kron(basis, channel).reshape(8, 4)   # (1,2,A) x (B,C)
        cols.append(sqrt(8) * phi_x.conj() @ full)
    return np.stack(cols, axis=1)   # 4 x 2


def bell_like_decomposition(phi: Optional[StateVector] = None, tol: float = 1e-12,
                            sigma_x_qubit: int = SIGMA_X_QUBIT) -> list[Branch]:
    """Pauli retrieval operators for each of the eight outcomes on a GHZ channel.

    Solved by brute force: for each branch find a Pauli pair B, C times a unit phase
    with (B x C) restricted to span{|01>,|10>} equal to the branch map.
    """
    if phi is not None:
        _in_span(phi)
    ghz = ghz_state(3).data
    span = np.array([[0, 0], [1, 0], [0, 1], [0, 0]], dtype=complex)
    branches = []
    for label, vec in measurement_basis(sigma_x_qubit):
        m = _branch_map(vec, ghz)
        found = None
        for (nb, pb), (nc, pc) in itertools.product(PAULIS.items(), repeat=2):
            cand = np.kron(pb, pc) @ span
            k = np.vdot(cand.reshape(-1), m.reshape(-1)) / 2
            if abs(abs(k) - 1) < 1e-9 and np.abs(k * cand - m).max() <= tol:
                found = (k * pb, pc, nb + nc)
                break
        if found is None:
            raise RuntimeError(f"no Pauli retrieval for branch {label} "
                               f"with sigma_x on qubit {sigma_x_qubit}")
        branches.append(Branch(label, vec, *found))
    return branches


def ghz_tel_residual(alpha: complex, beta: complex, branches: Optional[list[Branch]] = None) -> float:
    """Max deviation between phi x GHZ and (1/sqrt8) sum_x Phi_x (B_x x C_x) phi."""
    branches = branches or bell_like_decomposition()
    phi = _ent_state(alpha, beta).data
    lhs = np.kron(phi, ghz_state(3).data)
    rhs = np.zeros(32, dtype=complex)
    for br in branches:
        rhs += np.kron(br.phi_x, np.kron(br.b_op, br.c_op) @ phi) / sqrt(8)
    return float(np.abs(lhs - rhs).max())


def v_transform() -> np.ndarray:
    """|Psi+><00| + |11><01| + |Psi-><10| + |00><11| on qubits B, C."""
    e = np.eye(4)
    psi_p, psi_m = bell("psi+").data, bell("psi-").data
    return (np.outer(psi_p, e[0]) + np.outer(e[3], e[1])
            + np.outer(psi_m, e[2]) + np.outer(e[0], e[3]))


@dataclass(frozen=True, eq=False)
class ChannelState:
    state: StateVector
    label: str


def ghz_channel() -> ChannelState:
    return ChannelState(ghz_state(3), "GHZ")


def w_channel() -> ChannelState:
    v = v_transform()
    if not is_unitary(v, 1e-12):
        raise RuntimeError("V is not unitary")
    out = np.kron(I2, v) @ ghz_state(3).data
    return ChannelState(StateVector(out, (2, 2, 2)), "W-class")


@dataclass
class TeleportResult:
    fidelities: list[float]
    probabilities: list[float]
    classical_bits: int

    @property
    def min_fidelity(self) -> float:
        return min(self.fidelities)


RECOVERY_FORMS = ("inverse", "conjugated")


def teleport(phi: StateVector, channel: ChannelState, recover: bool = True,
             recovery: str = "inverse") -> TeleportResult:
    """Measure (1, 2, A) in the Bell x sigma_x basis and undo each branch on (B, C).

    GHZ channel: the branch state is (B_x x C_x) phi. W-class channel: it is
    V (B_x x C_x) phi, so the recovery (V (B_x x C_x))^dag acts jointly on B, C.
    ``recovery="conjugated"`` applies (V (B_x x C_x) V^dag)^dag instead, which
    leaves a residual V and is kept only for comparison.
    """
    if recovery not in RECOVERY_FORMS:
        raise ValueError(f"recovery must be one of {RECOVERY_FORMS}")
    _in_span(phi)
    branches = bell_like_decomposition()
    if channel.label == "GHZ":
        pre = np.eye(4)
    elif channel.label == "W-class":
        pre = v_transform()
    else:
        raise ValueError(f"unknown channel {channel.label!r}")
    full = np.kron(phi.data, channel.state.data).reshape(8, 4)
    fids, probs = [], []
    for br in branches:
        out = br.phi_x.conj() @ full
        p = float(np.vdot(out, out).real)
        probs.append(p)
        if recover:
            r = pre @ np.kron(br.b_op, br.c_op)
            if recovery == "conjugated":
                r = r @ pre.conj().T
            out = r.conj().T @ out
        fids.append(fidelity(StateVector.normalized(out, (2, 2)), phi))
    return TeleportResult(fids, probs, 3)


def random_ent_state(rng: np.random.Generator) -> StateVector:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z /= np.linalg.norm(z)
    return _ent_state(z[0], z[1])


def dense_coding_gram(channel: ChannelState, local_ops: Sequence[tuple[np.ndarray, np.ndarray]],
                      holders: tuple[int, int] = (1, 2)) -> np.ndarray:
    """Gram matrix of channel states after each local operator pair on ``holders``.

    Eight mutually orthogonal results (identity Gram matrix) mean three bits
    can be encoded by acting on two qubits.
    """
    vecs = []
    for op1, op2 in local_ops:
        ops = [I2, I2, I2]
        ops[holders[0]], ops[holders[1]] = op1, op2
        vecs.append(kron(*ops) @ channel.state.data)
    m = np.stack(vecs, axis=1)
    return m.conj().T @ m
