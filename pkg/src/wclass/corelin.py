"""Dense linear algebra over ordered tensor products.

Subsystems are ordered row-major: the leftmost subsystem is the slowest
index of the flattened amplitude array. Every other module relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    structural: float = 1e-10
    assertion: float = 1e-12


TOL = Tolerances()


def _prod(dims: Sequence[int]) -> int:
    return int(np.prod(dims)) if len(dims) else 1


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized ket over subsystems with dimensions ``dims``."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex).reshape(-1)
        dims = tuple(int(d) for d in self.dims)
        if data.size != _prod(dims):
            raise ValueError(f"amplitude length {data.size} does not match dims {dims}")
        norm = np.linalg.norm(data)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm={norm:.16g})")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, data, dims) -> "StateVector":
        data = np.asarray(data, dtype=complex).reshape(-1)
        norm = np.linalg.norm(data)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(data / norm, tuple(dims))

    @classmethod
    def basis(cls, index: Union[int, Sequence[int]], dims) -> "StateVector":
        dims = tuple(dims)
        if not isinstance(index, (int, np.integer)):
            index = int(np.ravel_multi_index(tuple(index), dims))
        data = np.zeros(_prod(dims), dtype=complex)
        data[index] = 1.0
        return cls(data, dims)

    @classmethod
    def qubits(cls, bits: str) -> "StateVector":
        """Computational basis ket from a bit string such as ``"010"``."""
        return cls.basis(int(bits, 2), (2,) * len(bits))

    @property
    def n_sub(self) -> int:
        return len(self.dims)

    def dm(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.data, self.data.conj()), self.dims)

    def apply(self, op: np.ndarray) -> "StateVector":
        return StateVector(np.asarray(op) @ self.data, self.dims)

    def inner(self, other: "StateVector") -> complex:
        _check_dims(self.dims, other.dims)
        return complex(np.vdot(self.data, other.data))

    def __repr__(self):
        return f"StateVector(dims={self.dims}, nnz={int(np.count_nonzero(np.abs(self.data) > 1e-15))})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix with subsystem dims."""

    data: np.ndarray
    dims: tuple[int, ...]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        d = _prod(dims)
        if data.shape != (d, d):
            raise ValueError(f"matrix shape {data.shape} does not match dims {dims}")
        if self.check:
            if np.abs(data - data.conj().T).max() > 1e-12:
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(data).real
            if abs(tr - 1.0) > 1e-12:
                raise ValueError(f"density matrix trace is {tr:.16g}")
            if np.linalg.eigvalsh(data)[0] < -1e-10:
                raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @property
    def n_sub(self) -> int:
        return len(self.dims)

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))


@dataclass(frozen=True, eq=False)
class HermitianSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _check_dims(a, b):
    if tuple(a) != tuple(b):
        raise ValueError(f"dimension mismatch: {tuple(a)} vs {tuple(b)}")


def tensor(a, b):
    """Kronecker product; works for two kets, two density matrices or two plain matrices."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.data, b.data), a.dims + b.dims)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.data, b.data), a.dims + b.dims, check=False)
    if isinstance(a, (StateVector, DensityMatrix)) or isinstance(b, (StateVector, DensityMatrix)):
        raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")
    return np.kron(np.asarray(a), np.asarray(b))


def kron(*ops) -> np.ndarray:
    return reduce(np.kron, [np.asarray(o) for o in ops])


def tensor_all(items: Iterable):
    return reduce(tensor, items)


def embed(op: np.ndarray, targets: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Lift an operator on ``targets`` (in that order) to the full register."""
    dims = tuple(dims)
    targets = list(targets)
    n = len(dims)
    if len(set(targets)) != len(targets) or any(t < 0 or t >= n for t in targets):
        raise ValueError(f"invalid targets {targets} for {n} subsystems")
    rest = [k for k in range(n) if k not in targets]
    dt = _prod([dims[t] for t in targets])
    dr = _prod([dims[k] for k in rest])
    op = np.asarray(op, dtype=complex)
    if op.shape != (dt, dt):
        raise ValueError(f"operator shape {op.shape} does not match targets dims")
    full = np.kron(op, np.eye(dr))
    # full acts on order targets+rest; permute back to natural order
    order = targets + rest
    shape = [dims[k] for k in order]
    full = full.reshape(shape + shape)
    inv = np.argsort(order)
    full = full.transpose(list(inv) + [n + i for i in inv])
    d = _prod(dims)
    return full.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set is empty")
    n = rho.n_sub
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep {keep} out of range for {n} subsystems")
    dims = rho.dims
    traced = [k for k in range(n) if k not in keep]
    t = rho.data.reshape(dims + dims)
    # trace out from the highest index down so axis numbers stay valid
    cur = n
    for k in sorted(traced, reverse=True):
        t = np.trace(t, axis1=k, axis2=k + cur)
        cur -= 1
    dk = _prod([dims[k] for k in keep])
    return DensityMatrix(t.reshape(dk, dk), tuple(dims[k] for k in keep), check=False)


def reduced(psi: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state of a pure state without forming the full density matrix."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set is empty")
    dims = psi.dims
    traced = [k for k in range(psi.n_sub) if k not in keep]
    t = psi.data.reshape(dims).transpose(keep + traced)
    dk = _prod([dims[k] for k in keep])
    m = t.reshape(dk, -1)
    return DensityMatrix(m @ m.conj().T, tuple(dims[k] for k in keep), check=False)


def partial_transpose(rho: Union[DensityMatrix, np.ndarray], subsystems, dims=None) -> np.ndarray:
    """Transpose the indices of the given subsystem(s); returns a plain matrix."""
    if isinstance(rho, DensityMatrix):
        data, dims = rho.data, rho.dims
    else:
        data = np.asarray(rho)
        if dims is None:
            raise ValueError("dims required for a plain matrix")
    dims = tuple(dims)
    if isinstance(subsystems, (int, np.integer)):
        subsystems = [subsystems]
    n = len(dims)
    subsystems = set(int(s) for s in subsystems)
    if any(s < 0 or s >= n for s in subsystems):
        raise ValueError(f"subsystem out of range for {n} subsystems")
    t = data.reshape(dims + dims)
    axes = list(range(2 * n))
    for s in subsystems:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    d = data.shape[0]
    return t.transpose(axes).reshape(d, d)


def hermitian_eig(m: np.ndarray, tol: float = 1e-10) -> HermitianSpectrum:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("square matrix required")
    if np.abs(m - m.conj().T).max() > tol:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return HermitianSpectrum(w, v)


def evolve(h: np.ndarray, t: float, tol: float = 1e-10) -> np.ndarray:
    """exp(-i h t) for Hermitian h."""
    spec = hermitian_eig(h, tol)
    v = spec.eigenvectors
    return (v * np.exp(-1j * spec.eigenvalues * t)) @ v.conj().T


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return bool(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() <= tol)


def fidelity(a: StateVector, b: StateVector) -> float:
    _check_dims(a.dims, b.dims)
    return float(min(1.0, abs(np.vdot(a.data, b.data)) ** 2))


def entropy_of(eigenvalues: np.ndarray) -> float:
    lam = np.asarray(eigenvalues, dtype=float)
    lam = lam[lam > 1e-15]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def binary_entropy(p: float) -> float:
    return entropy_of(np.array([p, 1.0 - p]))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return entropy_of(np.linalg.eigvalsh(rho.data))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.asarray(a) - np.asarray(b)
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())


def random_state(dims, rng: np.random.Generator) -> StateVector:
    d = _prod(dims)
    return StateVector.normalized(rng.normal(size=d) + 1j * rng.normal(size=d), dims)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(dims, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    d = _prod(dims)
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, tuple(dims))
