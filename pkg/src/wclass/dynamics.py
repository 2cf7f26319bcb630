"""Generation dynamics: collective atom-field coupling, trapped-ion pulses and
collective decay."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import acos, pi, sqrt
from typing import Optional

import numpy as np

from .corelin import (
    DensityMatrix,
    StateVector,
    embed,
    evolve,
    fidelity,
    is_unitary,
    reduced,
)
from .states import collective_S, dicke_basis, w_state

# --- collective atom-field model --------------------------------------------
#
# Register order is (mode a, mode b, symmetric atomic sector |m;n>), each field
# mode truncated at n_max photons.


@dataclass(frozen=True, eq=False)
class AtomFieldState:
    amps: np.ndarray          # shape (n_max+1, n_max+1, n+1), index (n_a, n_b, m)
    n: int

    @property
    def n_max(self) -> int:
        return self.amps.shape[0] - 1

    @property
    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def atomic_qubits(self, na: int, nb: int) -> StateVector:
        """Atomic component for field |na, nb>, expanded onto n qubits and normalized."""
        c = self.amps[na, nb]
        return StateVector.normalized(dicke_basis(self.n) @ c, (2,) * self.n)


def _dims(n: int, n_max: int) -> tuple[int, int, int]:
    return n_max + 1, n_max + 1, n + 1


def dicke_raising(n: int) -> np.ndarray:
    """S10 restricted to the symmetric sector: |m;n> -> sqrt((m+1)(n-m)) |m+1;n>."""
    s = np.zeros((n + 1, n + 1))
    for m in range(n):
        s[m + 1, m] = sqrt((m + 1) * (n - m))
    return s


def _annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1)


def atom_field_hamiltonian(n: int, coupling: float, kind: str = "raman", n_max: int = 2) -> np.ndarray:
    """H = i(S10 B - S01 B^dag) with B = f a^dag b (raman) or B = g a (one_photon)."""
    da, db, dm = _dims(n, n_max)
    a = np.kron(_annihilation(n_max), np.eye(db))
    b = np.kron(np.eye(da), _annihilation(n_max))
    if kind == "raman":
        B = coupling * a.conj().T @ b
    elif kind == "one_photon":
        B = coupling * a
    else:
        raise ValueError(f"unknown interaction {kind!r}")
    s10 = dicke_raising(n)
    x = np.kron(B, s10)
    return 1j * (x - x.conj().T)


def excitation_integral(n: int, kind: str = "raman", n_max: int = 2) -> np.ndarray:
    """Conserved excitation count: n_mode - (S00 - S11)/2.

    The photon mode is a for one-photon absorption and b (the absorbed mode)
    for Raman scattering.
    """
    da, db, dm = _dims(n, n_max)
    num = np.diag(np.arange(n_max + 1, dtype=float))
    mode = np.kron(num, np.eye(db)) if kind == "one_photon" else np.kron(np.eye(da), num)
    jz2 = np.diag([n - 2.0 * m for m in range(n + 1)])   # S00 - S11 in the sector
    return np.kron(mode, np.eye(dm)) - 0.5 * np.kron(np.eye(da * db), jz2)


def _raman_theta(m: int, n: int, f: float, t: float) -> float:
    if m < 0 or m >= n:
        return 0.0
    return t * f * sqrt((m + 1) * (n - m))


def _check_raman_args(alpha, beta, m, n):
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-12:
        raise ValueError("|alpha|^2 + |beta|^2 must be 1")


def raman_initial(alpha: complex, beta: complex, m: int, n: int, n_max: int = 2) -> AtomFieldState:
    _check_raman_args(alpha, beta, m, n)
    amps = np.zeros(_dims(n, n_max), dtype=complex)
    amps[0, 1, m] = alpha
    amps[1, 0, m] = beta
    return AtomFieldState(amps, n)


def raman_closed_form(alpha: complex, beta: complex, m: int, n: int, f: float, t: float,
                      n_max: int = 2) -> AtomFieldState:
    """Analytic evolution of (alpha|01> + beta|10>)_ab |m;n> under Raman coupling."""
    _check_raman_args(alpha, beta, m, n)
    th = _raman_theta(m, n, f, t)
    thp = _raman_theta(m - 1, n, f, t)
    amps = np.zeros(_dims(n, n_max), dtype=complex)
    amps[0, 1, m] += alpha * np.cos(th)
    if m < n:
        amps[1, 0, m + 1] += alpha * np.sin(th)
    if m > 0:
        amps[0, 1, m - 1] += -beta * np.sin(thp)
    amps[1, 0, m] += beta * np.cos(thp)
    return AtomFieldState(amps, n)


def _raman_subspace(m: int, n: int, n_max: int) -> list[int]:
    dims = _dims(n, n_max)
    idx = [(0, 1, m), (1, 0, m)]
    if m < n:
        idx.append((1, 0, m + 1))
    if m > 0:
        idx.append((0, 1, m - 1))
    return [int(np.ravel_multi_index(i, dims)) for i in idx]


def raman_numeric(alpha: complex, beta: complex, m: int, n: int, f: float, t: float,
                  n_max: int = 2, tol: float = 1e-12) -> AtomFieldState:
    """exp(-iHt) on the invariant subspace spanned by the states the Raman term connects."""
    _check_raman_args(alpha, beta, m, n)
    h = atom_field_hamiltonian(n, f, "raman", n_max)
    sub = _raman_subspace(m, n, n_max)
    p = np.zeros(h.shape[0], dtype=bool)
    p[sub] = True
    if np.abs(h[np.ix_(~p, p)]).max(initial=0.0) > tol:
        raise RuntimeError("Raman subspace is not invariant under H")
    u = evolve(h[np.ix_(sub, sub)], t)
    psi0 = raman_initial(alpha, beta, m, n, n_max).vector
    out = np.zeros_like(psi0)
    out[sub] = u @ psi0[sub]
    return AtomFieldState(out.reshape(_dims(n, n_max)), n)


def evolve_full(state: AtomFieldState, coupling: float, t: float, kind: str = "raman") -> AtomFieldState:
    h = atom_field_hamiltonian(state.n, coupling, kind, state.n_max)
    return AtomFieldState((evolve(h, t) @ state.vector).reshape(state.amps.shape), state.n)


def integral_expectation(state: AtomFieldState, kind: str = "raman") -> float:
    op = excitation_integral(state.n, kind, state.n_max)
    v = state.vector
    return float(np.real(np.vdot(v, op @ v)))


def atomic_w_pulse(n: int, f: float = 1.0) -> AtomFieldState:
    """Field |01>, atoms |0;n>, evolved for the pulse area theta_0 = pi/2."""
    t = pi / (2 * f * sqrt(n))
    return raman_closed_form(1.0, 0.0, 0, n, f, t)


# --- trapped ions -----------------------------------------------------------
#
# Register: ions 1..3 (index 0 = S, 1 = D) and one phonon mode truncated at 2.

ION_DIMS = (2, 2, 2, 3)
S, D = 0, 1

# "s_from_d": sigma+ = |S><D|, the blue sideband leaves |S,0> dark.
# "d_from_s": sigma+ = |D><S|, the blue sideband takes |S,0> to |D,1>.
CONVENTIONS = ("s_from_d", "d_from_s")


def _sigma_plus(convention: str) -> np.ndarray:
    sp = np.zeros((2, 2))
    if convention == "s_from_d":
        sp[S, D] = 1
    elif convention == "d_from_s":
        sp[D, S] = 1
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return sp


def _check_ion(ion: int):
    if ion not in (1, 2, 3):
        raise ValueError(f"ion index must be 1, 2 or 3, got {ion}")


def ion_R(theta: float, phi: float, ion: int, convention: str = "s_from_d") -> np.ndarray:
    """exp[i theta/2 (e^{i phi} s+ + e^{-i phi} s-)] on one ion."""
    _check_ion(ion)
    sp = _sigma_plus(convention)
    g = np.exp(1j * phi) * sp + np.exp(-1j * phi) * sp.T
    return embed(evolve(g, -theta / 2), [ion - 1], ION_DIMS)


def ion_Rplus(theta: float, phi: float, ion: int, convention: str = "s_from_d") -> np.ndarray:
    """exp[i theta/2 (e^{i phi} s+ b^dag + e^{-i phi} s- b)] on one ion and the phonon mode."""
    _check_ion(ion)
    sp = _sigma_plus(convention)
    bdag = _annihilation(ION_DIMS[3] - 1).T
    x = np.exp(1j * phi) * np.kron(sp, bdag)
    return embed(evolve(x + x.conj().T, -theta / 2), [ion - 1, 3], ION_DIMS)


# pulse sequence, leftmost first: (kind, ion, theta, phi)
W_PULSES = (
    ("R+", 2, 2 * acos(1 / sqrt(3)), 0.0),
    ("R", 3, pi, pi),
    ("R+", 3, pi / 2, pi),
    ("R", 1, pi, 0.0),
    ("R+", 1, pi, pi),
)


def ion_basis(label: str, phonon: int = 0) -> StateVector:
    """|XYZ>|k>_b from a string of S/D letters."""
    idx = tuple({"S": S, "D": D}[c] for c in label) + (phonon,)
    return StateVector.basis(idx, ION_DIMS)


def expected_first_intermediate() -> StateVector:
    return StateVector(ion_basis("SSS", 0).data / sqrt(3)
                       + 1j * sqrt(2 / 3) * ion_basis("SDS", 1).data, ION_DIMS)


def ion_w_target() -> StateVector:
    d = sum(StateVector.basis(tuple({"S": S, "D": D}[c] for c in lab), (2, 2, 2)).data
            for lab in ("DDS", "DSD", "SDD"))
    return StateVector(d / sqrt(3), (2, 2, 2))


def gauge_fidelity(rho: np.ndarray, target: StateVector, sweeps: int = 60) -> tuple[float, np.ndarray]:
    """max over per-ion z-phases of <target_phi| rho |target_phi>.

    The phases multiply the D level of each ion; the global phase drops out of
    the expectation. Each coordinate update is closed form because the
    objective is A + |B| cos(phi_i + arg B) in that coordinate.
    """
    n = len(target.dims)
    bits = np.array([[(i >> (n - 1 - k)) & 1 for k in range(n)] for i in range(2**n)])

    def value(ph):
        tp = target.data * np.exp(-1j * bits @ ph)
        return float(np.real(np.vdot(tp, rho @ tp)))

    ph = np.zeros(n)
    for _ in range(sweeps):
        for k in range(n):
            vals = []
            for trial in (0.0, pi / 2, pi):
                p = ph.copy()
                p[k] = trial
                vals.append(value(p))
            a = 0.5 * (vals[0] + vals[2])
            re_b, im_b = 0.5 * (vals[0] - vals[2]), a - vals[1]
            ph[k] = -np.arctan2(im_b, re_b)
    return value(ph), ph


@dataclass
class IonSequenceResult:
    order: str
    convention: str
    final: StateVector
    intermediates: list[StateVector]
    first_pulse_fidelity: float
    final_fidelity: float
    raw_fidelity: float
    phases: np.ndarray
    ion_purity: float
    max_leakage: float

    @property
    def reading(self) -> str:
        return f"{self.order}/{self.convention}"


def _pulse_unitary(kind: str, ion: int, theta: float, phi: float, convention: str) -> np.ndarray:
    return ion_Rplus(theta, phi, ion, convention) if kind == "R+" else ion_R(theta, phi, ion, convention)


def ion_w_sequence(order: str = "right_to_left", convention: str = "s_from_d") -> IonSequenceResult:
    """Apply the five W-generating pulses to |SSS>|0>_b.

    ``order="right_to_left"`` treats the sequence as an operator product
    (rightmost pulse first); ``order="left_to_right"`` applies the leftmost pulse first.
    """
    if order == "left_to_right":
        pulses = list(W_PULSES)
    elif order == "right_to_left":
        pulses = list(reversed(W_PULSES))
    else:
        raise ValueError(f"unknown order {order!r}")
    psi = ion_basis("SSS", 0)
    inter = []
    leak = 0.0
    for p in pulses:
        u = _pulse_unitary(*p, convention)
        if not is_unitary(u):
            raise RuntimeError("pulse unitary failed the unitarity check")
        psi = psi.apply(u)
        inter.append(psi)
        leak = max(leak, float(np.sum(np.abs(psi.data.reshape(8, 3)[:, 2]) ** 2)))
    rho_ions = reduced(psi, [0, 1, 2])
    target = ion_w_target()
    fid, ph = gauge_fidelity(rho_ions.data, target)
    raw = float(np.real(np.vdot(target.data, rho_ions.data @ target.data)))
    return IonSequenceResult(
        order=order, convention=convention, final=psi, intermediates=inter,
        first_pulse_fidelity=fidelity(inter[0], expected_first_intermediate()),
        final_fidelity=fid, raw_fidelity=raw, phases=ph,
        ion_purity=rho_ions.purity(), max_leakage=leak,
    )


def ion_w_readings(tol: float = 1e-9) -> dict:
    """Run every (order, convention) pair.

    ``chosen`` is the first pulse-order reading that reproduces both checks
    with sigma+ = |S><D|, or None. ``alternative`` is the same search with
    sigma+ = |D><S|, kept as a diagnostic.
    """
    runs = {f"{o}/{c}": ion_w_sequence(o, c)
            for o in ("right_to_left", "left_to_right") for c in CONVENTIONS}

    def first_ok(conv: str) -> Optional[str]:
        for o in ("right_to_left", "left_to_right"):
            r = runs[f"{o}/{conv}"]
            if r.first_pulse_fidelity >= 1 - tol and r.final_fidelity >= 1 - tol:
                return r.reading
        return None

    return {"runs": runs, "chosen": first_ok("s_from_d"), "alternative": first_ok("d_from_s")}


def two_level_map(alpha: complex, beta: complex, theta: float, phi: float) -> np.ndarray:
    """Displayed qubit map for R and R+: (a, b) -> rotated (a, b)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([alpha * c + 1j * beta * np.exp(1j * phi) * s,
                     beta * c + 1j * alpha * np.exp(-1j * phi) * s])


# --- collective decay -------------------------------------------------------

def _lindblad_rhs(rho: np.ndarray, r: np.ndarray, rdr: np.ndarray, gamma: float) -> np.ndarray:
    # -gamma [R^dag R rho - R rho R^dag + h.c.]
    return -gamma * (rdr @ rho + rho @ rdr - 2 * r @ rho @ r.conj().T)


@dataclass
class LindbladTrajectory:
    times: np.ndarray
    states: list[np.ndarray]
    min_eigenvalue: float
    max_trace_drift: float
    meta: dict = field(default_factory=dict)


def lindblad_trajectory(rho0: DensityMatrix, gamma: float, t: float, steps: int,
                        r: Optional[np.ndarray] = None, max_drift: float = 1e-6) -> LindbladTrajectory:
    """Fixed-step RK4 for collective decay with jump operator R (default S01)."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    n = rho0.n_sub
    r = collective_S(0, 1, n) if r is None else np.asarray(r, dtype=complex)
    rdr = r.conj().T @ r
    dt = t / steps
    rho = rho0.data.copy()
    states = [rho.copy()]
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    drift = 0.0
    for _ in range(steps):
        k1 = _lindblad_rhs(rho, r, rdr, gamma)
        k2 = _lindblad_rhs(rho + 0.5 * dt * k1, r, rdr, gamma)
        k3 = _lindblad_rhs(rho + 0.5 * dt * k2, r, rdr, gamma)
        k4 = _lindblad_rhs(rho + dt * k3, r, rdr, gamma)
        rho = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if not np.all(np.isfinite(rho)):
            raise ValueError("step size too large: integration diverged")
        drift = max(drift, abs(np.trace(rho).real - 1))
        if drift > max_drift:
            raise ValueError(f"step size too large: trace drift {drift:.3g}")
        min_eig = min(min_eig, float(np.linalg.eigvalsh(rho)[0]))
        states.append(rho.copy())
    return LindbladTrajectory(np.linspace(0, t, steps + 1), states, min_eig, drift)


def lindblad_collective_decay(rho0: DensityMatrix, gamma: float, t: float, steps: int,
                              r: Optional[np.ndarray] = None) -> DensityMatrix:
    traj = lindblad_trajectory(rho0, gamma, t, steps, r)
    return DensityMatrix(traj.states[-1], rho0.dims, check=False)


def liouvillian(r: np.ndarray, gamma: float) -> np.ndarray:
    """Superoperator for row-major vec(rho); vec(A rho B) = kron(A, B^T) vec(rho)."""
    r = np.asarray(r, dtype=complex)
    d = r.shape[0]
    eye = np.eye(d)
    rdr = r.conj().T @ r
    return -gamma * (np.kron(rdr, eye) + np.kron(eye, rdr.T) - 2 * np.kron(r, r.conj()))


def df_check(psi: StateVector, r: Optional[np.ndarray] = None) -> float:
    """||R psi - (sum_k q_k)|0..0>||, q_k the single-excitation amplitudes of psi."""
    n = psi.n_sub
    r = collective_S(0, 1, n) if r is None else np.asarray(r)
    q_sum = sum(psi.data[1 << (n - 1 - k)] for k in range(n))
    vac = np.zeros(2**n, dtype=complex)
    vac[0] = q_sum
    return float(np.linalg.norm(r @ psi.data - vac))


def collective_decay_amplitude(psi: StateVector, r: Optional[np.ndarray] = None) -> float:
    """||R psi||; zero exactly for decoherence-free states."""
    r = collective_S(0, 1, psi.n_sub) if r is None else np.asarray(r)
    return float(np.linalg.norm(r @ psi.data))


def atomic_w_fidelity(n: int, f: float = 1.0) -> float:
    st = atomic_w_pulse(n, f)
    field_weight = float(np.sum(np.abs(st.amps[1, 0]) ** 2))
    return field_weight * fidelity(st.atomic_qubits(1, 0), w_state(n))


