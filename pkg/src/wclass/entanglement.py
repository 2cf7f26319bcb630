"""Entanglement criteria and measures for W-class states."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Iterable, Union

import numpy as np

from .corelin import (
    DensityMatrix,
    StateVector,
    entropy_of,
    kron,
    partial_trace,
    partial_transpose,
    reduced,
)
from .states import ghz_prime, w_state

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class BipartitionSpec:
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    def __post_init__(self):
        a, b = set(self.side_a), set(self.side_b)
        if not a or not b:
            raise ValueError("both sides of a bipartition must be non-empty")
        if a & b:
            raise ValueError("bipartition sides overlap")
        if a | b != set(range(len(a) + len(b))):
            raise ValueError("bipartition does not cover the register")
        object.__setattr__(self, "side_a", tuple(sorted(a)))
        object.__setattr__(self, "side_b", tuple(sorted(b)))

    @classmethod
    def of(cls, side_a: Iterable[int], n: int) -> "BipartitionSpec":
        side_a = tuple(sorted(set(side_a)))
        return cls(side_a, tuple(k for k in range(n) if k not in side_a))

    def dims(self, dims) -> tuple[int, int]:
        return (int(np.prod([dims[k] for k in self.side_a])),
                int(np.prod([dims[k] for k in self.side_b])))


def reduced_w(n: int, s: int) -> DensityMatrix:
    """State of any s qubits of W_n: (s/n)|W_s><W_s| + (1 - s/n)|0..0><0..0|."""
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    d = 2**s
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1 - s / n
    if s == 1:
        rho[1, 1] = 1 / n
    else:
        w = w_state(s).data
        rho += (s / n) * np.outer(w, w.conj())
    return DensityMatrix(rho, (2,) * s)


def ppt_spectrum(rho: DensityMatrix, part: BipartitionSpec) -> np.ndarray:
    pt = partial_transpose(rho, part.side_a)
    return np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))


def ppt_verdict(rho: DensityMatrix, part: BipartitionSpec, tol: float = 1e-10) -> str:
    """'NPT-entangled', 'separable' (only for 2x2 and 2x3 splits) or 'inconclusive'."""
    if ppt_spectrum(rho, part)[0] < -tol:
        return "NPT-entangled"
    if sorted(part.dims(rho.dims)) in ([2, 2], [2, 3]):
        return "separable"
    return "inconclusive"


def ppt_closed_form_w(n: int) -> np.ndarray:
    """Partial-transpose spectrum of the two-qubit reduced W_n, ascending."""
    if n < 3:
        raise ValueError("closed form needs n >= 3")
    x = 4 / (n - 2) ** 2
    root = sqrt(1 + x)
    half = (n - 2) / (2 * n)
    # 1 - sqrt(1 + x) written as -x / (1 + sqrt(1 + x)) to avoid cancellation at large n
    return np.sort(np.array([1 / n, 1 / n, -half * x / (1 + root), half * (1 + root)]))


def negativity(rho: DensityMatrix, part: BipartitionSpec) -> float:
    lam = ppt_spectrum(rho, part)
    return float(np.sum(np.abs(lam) - lam) / 2)


def ent_entropy(psi: StateVector, part: BipartitionSpec) -> float:
    """Entropy (bits) of the reduced state on side A of a pure state."""
    return entropy_of(np.linalg.eigvalsh(reduced(psi, part.side_a).data))


def _schmidt_rank_one(psi: np.ndarray, dims, side_a, tol: float) -> bool:
    n = len(dims)
    side_b = [k for k in range(n) if k not in side_a]
    da = int(np.prod([dims[k] for k in side_a]))
    m = psi.reshape(dims).transpose(list(side_a) + side_b).reshape(da, -1)
    sv = np.linalg.svd(m, compute_uv=False)
    return bool(sv.size < 2 or sv[1] <= tol * sv[0])


def is_fully_product(psi: np.ndarray, dims, tol: float = 1e-10) -> bool:
    """Schmidt rank one across every bipartition."""
    n = len(dims)
    for size in range(1, n // 2 + 1):
        for side_a in itertools.combinations(range(n), size):
            if not _schmidt_rank_one(psi, dims, side_a, tol):
                return False
    return True


def _all_branches_product(psi: np.ndarray, n: int, measured, tol: float) -> bool:
    rest = [k for k in range(n) if k not in measured]
    t = psi.reshape((2,) * n).transpose(list(measured) + rest).reshape(2 ** len(measured), -1)
    for row in t:
        p = np.vdot(row, row).real
        if p <= tol:
            continue
        if len(rest) > 1 and not is_fully_product(row / sqrt(p), (2,) * len(rest), tol):
            return False
    return True


def persistency(psi: StateVector, tol: float = 1e-10) -> int:
    """Fewest computational-basis single-qubit measurements that leave every
    outcome branch fully product, whichever qubits are chosen."""
    n = psi.n_sub
    if any(d != 2 for d in psi.dims):
        raise ValueError("qubit register required")
    if n > 5:
        raise ValueError("exhaustive persistency search limited to n <= 5")
    if is_fully_product(psi.data, psi.dims, tol):
        return 0
    for m in range(1, n + 1):
        if all(_all_branches_product(psi.data, n, measured, tol)
               for measured in itertools.combinations(range(n), m)):
            return m
    return n


@dataclass(frozen=True, eq=False)
class WitnessOperator:
    matrix: np.ndarray
    label: str


def witness_w1() -> WitnessOperator:
    w = w_state(3).data
    return WitnessOperator(2 / 3 * np.eye(8) - np.outer(w, w.conj()), "W1")


def witness_w2() -> WitnessOperator:
    g = ghz_prime().data
    return WitnessOperator(0.5 * np.eye(8) - np.outer(g, g.conj()), "W2")


def witness_value(w: WitnessOperator, rho: Union[DensityMatrix, StateVector]) -> float:
    if isinstance(rho, StateVector):
        rho = rho.dm()
    if rho.data.shape != w.matrix.shape:
        raise ValueError("witness and state dimensions differ")
    return float(np.real(np.trace(w.matrix @ rho.data)))


def pauli_word(word: str) -> np.ndarray:
    return kron(*[PAULI[c] for c in word])


@dataclass
class WitnessExpansion:
    terms: list[tuple[Fraction, str]]
    n_leading: int
    combined: dict[str, Fraction]
    deviation: float

    def leading_coefficient(self, word: str) -> Fraction:
        """Coefficient of ``word`` among the terms written before the cubes."""
        return sum((c for c, w in self.terms[: self.n_leading] if w == word), Fraction(0))


def witness_w1_pauli_expansion() -> WitnessExpansion:
    """Spell out the Pauli-measurement form of W1 and compare with the projector form.

    ``terms`` keeps the grouping of the measurement recipe: the constant and
    sigma_z correlators first, then every word from expanding the four cubes
    (1 + Z +/- X)^3 and (1 + Z +/- Y)^3.
    """
    k = Fraction(1, 24)
    terms: list[tuple[Fraction, str]] = [(17 * k, "III"), (7 * k, "ZZZ")]
    terms += [(3 * k, w) for w in ("ZII", "IZI", "IIZ")]
    terms += [(5 * k, w) for w in ("ZZI", "ZIZ", "IZZ")]
    n_leading = len(terms)
    for letter, sign in (("X", 1), ("X", -1), ("Y", 1), ("Y", -1)):
        factor = [("I", 1), ("Z", 1), (letter, sign)]
        for combo in itertools.product(factor, repeat=3):
            word = "".join(c for c, _ in combo)
            s = int(np.prod([sg for _, sg in combo]))
            terms.append((-k * s, word))
    combined: dict[str, Fraction] = {}
    for c, w in terms:
        combined[w] = combined.get(w, Fraction(0)) + c
    combined = {w: c for w, c in sorted(combined.items()) if c != 0}
    matrix = sum(float(c) * pauli_word(w) for c, w in terms)
    deviation = float(np.abs(matrix - witness_w1().matrix).max())
    return WitnessExpansion(terms, n_leading, combined, deviation)


def w1_on_reduced_w() -> dict[str, float]:
    """W1 evaluated on the two-qubit reduced W state under explicit embeddings.

    The reduced state lives on two qubits and the witness on three, so a third
    qubit has to be supplied. Reports |0> and maximally mixed choices next to
    the reference value 1/9.
    """
    rho2 = reduced_w(3, 2).data
    w1 = witness_w1()
    ket0 = np.diag([1.0, 0.0])
    out = {"reference": 1 / 9}
    for name, third in (("embed_ket0", ket0), ("embed_mixed", np.eye(2) / 2)):
        out[name] = float(np.real(np.trace(w1.matrix @ np.kron(rho2, third))))
    out["embed_ket0_exact"] = 2 / 9
    return out


def reduced_w_matches_trace(n: int, s: int, subset=None) -> float:
    """Max elementwise gap between reduced_w and the partial trace of |W_n><W_n|."""
    subset = tuple(range(s)) if subset is None else tuple(subset)
    direct = partial_trace(w_state(n).dm(), subset).data
    return float(np.abs(direct - reduced_w(n, s).data).max())
