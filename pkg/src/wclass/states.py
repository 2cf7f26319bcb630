"""Named multiqubit states and collective operators.

Qubit convention: |0> is the lower level, |1> the upper (excited) level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, sqrt
from typing import Optional

import numpy as np

from .corelin import StateVector, kron

SQRT2 = sqrt(2.0)

ZSA_TOL = 1e-10


def _single_excitation_index(n: int, k: int) -> int:
    # excitation at position k (0-based, leftmost = 0)
    return 1 << (n - 1 - k)


def w_state(n: int) -> StateVector:
    if n < 2:
        raise ValueError("W state needs n >= 2")
    data = np.zeros(2**n, dtype=complex)
    for k in range(n):
        data[_single_excitation_index(n, k)] = 1 / sqrt(n)
    return StateVector(data, (2,) * n)


def ghz_state(n: int) -> StateVector:
    if n < 2:
        raise ValueError("GHZ state needs n >= 2")
    data = np.zeros(2**n, dtype=complex)
    data[0] = data[-1] = 1 / SQRT2
    return StateVector(data, (2,) * n)


def bell(name: str) -> StateVector:
    """Two-qubit Bell states: 'phi+', 'phi-', 'psi+', 'psi-'."""
    table = {
        "phi+": [1, 0, 0, 1],
        "phi-": [1, 0, 0, -1],
        "psi+": [0, 1, 1, 0],
        "psi-": [0, 1, -1, 0],
    }
    return StateVector(np.array(table[name], dtype=complex) / SQRT2, (2, 2))


@dataclass(frozen=True, eq=False)
class AmplitudeProfile:
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=complex).reshape(-1)
        if abs(np.sum(np.abs(q) ** 2) - 1.0) > 1e-12:
            raise ValueError("amplitude profile is not normalized")
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.q.size


def eta_state(q) -> StateVector:
    prof = q if isinstance(q, AmplitudeProfile) else AmplitudeProfile(q)
    n = prof.n
    data = np.zeros(2**n, dtype=complex)
    for k in range(n):
        data[_single_excitation_index(n, k)] = prof.q[k]
    return StateVector(data, (2,) * n)


def is_zsa(q, tol: float = ZSA_TOL) -> bool:
    prof = q if isinstance(q, AmplitudeProfile) else AmplitudeProfile(q)
    return bool(abs(np.sum(prof.q)) <= tol)


def random_zsa_profile(n: int, rng: np.random.Generator) -> AmplitudeProfile:
    """Random complex zero-sum amplitude profile on n >= 2 sites."""
    if n < 2:
        raise ValueError("ZSA profile needs n >= 2")
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    z -= z.mean()
    return AmplitudeProfile(z / np.linalg.norm(z))


def w_class_state(a: complex, b: complex, c: complex, d: complex) -> StateVector:
    """a|000> + b|100> + c|010> + d|001>, the general three-qubit W-class form."""
    data = np.zeros(8, dtype=complex)
    data[[0, 4, 2, 1]] = [a, b, c, d]
    return StateVector(data, (2, 2, 2))


def dicke_symmetric(m: int, n: int) -> StateVector:
    if n < 1 or not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    data = np.zeros(2**n, dtype=complex)
    amp = 1 / sqrt(comb(n, m))
    for ones in itertools.combinations(range(n), m):
        data[sum(1 << (n - 1 - k) for k in ones)] = amp
    return StateVector(data, (2,) * n)


def dicke_basis(n: int) -> np.ndarray:
    """Columns are |m;n> for m = 0..n, as 2**n-dimensional vectors."""
    return np.stack([dicke_symmetric(m, n).data for m in range(n + 1)], axis=1)


_KET = np.eye(2)


def collective_S(x: int, y: int, n: int) -> np.ndarray:
    """sum over sites of |x><y| acting on that site."""
    if x not in (0, 1) or y not in (0, 1):
        raise ValueError("x and y must be 0 or 1")
    single = np.outer(_KET[x], _KET[y])
    eye = np.eye(2)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for a in range(n):
        out += kron(*[single if k == a else eye for k in range(n)])
    return out


def angular_ops(n: int):
    """(J1, J2, J3, J^2) built from the collective operators."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s10, s01 = collective_S(1, 0, n), collective_S(0, 1, n)
    s00, s11 = collective_S(0, 0, n), collective_S(1, 1, n)
    j1 = (s10 + s01) / 2
    j2 = 1j * (s10 - s01) / 2
    j3 = (s00 - s11) / 2
    jsq = j1 @ j1 + j2 @ j2 + j3 @ j3
    return j1, j2, j3, jsq


def df_states() -> tuple[StateVector, StateVector]:
    """The two four-qubit decoherence-free states (singlet pair and its partner)."""
    psi_m = bell("psi-").data
    psi_p = bell("psi+").data
    phi0 = np.kron(psi_m, psi_m)
    e = np.eye(16)
    psi1 = (e[0b0011] + e[0b1100] - np.kron(psi_p, psi_p)) / sqrt(3)
    return StateVector(phi0, (2,) * 4), StateVector(psi1, (2,) * 4)


def ghz_prime() -> StateVector:
    """GHZ with each |x> replaced by ((-1)^x |0> + i|1>)/sqrt(2)."""
    e0 = np.array([1, 1j]) / SQRT2
    e1 = np.array([-1, 1j]) / SQRT2
    data = (kron(e0, e0, e0) + kron(e1, e1, e1)) / SQRT2
    return StateVector(data, (2, 2, 2))


def expectation(op: np.ndarray, psi: StateVector) -> complex:
    return complex(np.vdot(psi.data, op @ psi.data))


def variance(op: np.ndarray, psi: StateVector) -> float:
    # ||(op - <op>) psi||^2, which avoids the cancellation in <op^2> - <op>^2
    v = op @ psi.data
    mean = np.vdot(psi.data, v)
    return float(np.linalg.norm(v - mean * psi.data) ** 2)


def _snap_half(x: float, tol: float = 1e-6) -> float:
    r = round(2 * x) / 2
    return r if abs(x - r) <= tol else x


def dicke_numbers(psi: StateVector, tol: float = 1e-12) -> Optional[tuple[float, float]]:
    """(j, l) if psi is a joint eigenvector of J^2 and J3, otherwise None.

    j is recovered from the J^2 eigenvalue j(j+1); values within 1e-6 of a
    half-integer are snapped to it.
    """
    if any(d != 2 for d in psi.dims):
        raise ValueError("qubit register required")
    _, _, j3, jsq = angular_ops(psi.n_sub)
    if variance(jsq, psi) > tol or variance(j3, psi) > tol:
        return None
    jj = expectation(jsq, psi).real
    j = (-1 + sqrt(1 + 4 * max(jj, 0.0))) / 2
    return _snap_half(j), _snap_half(expectation(j3, psi).real)
