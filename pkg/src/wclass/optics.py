"""Multimode bosonic Fock-space simulation of linear-optical W-state schemes.

Polarization is carried by two modes per spatial port, interleaved as
(port0-H, port0-V, port1-H, port1-V, ...). Linear elements are unitaries on a
subset of modes acting on creation operators, a_j^dag -> sum_k u[k, j] a_k^dag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import factorial, sqrt
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

N_MAX = 6
_AMP_CUT = 1e-15

Occupation = tuple[int, ...]


def hv(port: int) -> tuple[int, int]:
    """(H, V) mode indices of a spatial port."""
    return 2 * port, 2 * port + 1


@dataclass(frozen=True, eq=False)
class FockVector:
    terms: dict[Occupation, complex]
    n_modes: int
    n_max: int = N_MAX

    def __post_init__(self):
        clean: dict[Occupation, complex] = {}
        for occ, amp in self.terms.items():
            occ = tuple(int(x) for x in occ)
            if len(occ) != self.n_modes:
                raise ValueError(f"occupation {occ} does not have {self.n_modes} modes")
            if min(occ) < 0:
                raise ValueError(f"negative occupation {occ}")
            if sum(occ) > self.n_max:
                raise ValueError(f"term {occ} exceeds truncation n_max={self.n_max}")
            if abs(amp) > _AMP_CUT:
                clean[occ] = clean.get(occ, 0) + complex(amp)
        norm = sqrt(sum(abs(a) ** 2 for a in clean.values()))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"Fock state is not normalized (norm={norm:.16g})")
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def normalized(cls, terms: dict, n_modes: int, n_max: int = N_MAX) -> "FockVector":
        norm = sqrt(sum(abs(a) ** 2 for a in terms.values()))
        if norm == 0:
            raise ValueError("cannot normalize an empty state")
        return cls({k: v / norm for k, v in terms.items()}, n_modes, n_max)

    @classmethod
    def fock(cls, occupation: Sequence[int], n_max: int = N_MAX) -> "FockVector":
        return cls({tuple(occupation): 1.0}, len(occupation), n_max)

    def amplitude(self, occ: Sequence[int]) -> complex:
        return self.terms.get(tuple(occ), 0j)

    def inner(self, other: "FockVector") -> complex:
        if other.n_modes != self.n_modes:
            raise ValueError("mode count mismatch")
        return sum((a.conjugate() * other.terms.get(k, 0) for k, a in self.terms.items()), 0j)

    def photon_distribution(self) -> dict[int, float]:
        dist: dict[int, float] = {}
        for occ, amp in self.terms.items():
            dist[sum(occ)] = dist.get(sum(occ), 0.0) + abs(amp) ** 2
        return dict(sorted(dist.items()))

    def to_text(self) -> str:
        """Canonical text form; amplitudes use repr so the round trip is exact."""
        return json.dumps({
            "n_modes": self.n_modes,
            "n_max": self.n_max,
            "terms": [[list(k), [repr(v.real), repr(v.imag)]] for k, v in self.terms.items()],
        }, separators=(",", ":"))

    @classmethod
    def from_text(cls, text: str) -> "FockVector":
        d = json.loads(text)
        terms = {tuple(k): complex(float(re), float(im)) for k, (re, im) in d["terms"]}
        return cls(terms, d["n_modes"], d["n_max"])


def fock_fidelity(a: FockVector, b: FockVector) -> float:
    return float(min(1.0, abs(a.inner(b)) ** 2))


def tensor_fock(a: FockVector, b: FockVector) -> FockVector:
    terms = {ka + kb: va * vb for ka, va in a.terms.items() for kb, vb in b.terms.items()}
    return FockVector(terms, a.n_modes + b.n_modes, max(a.n_max, b.n_max))


# --- states -----------------------------------------------------------------

def _unit(n_modes: int, *modes: int) -> Occupation:
    occ = [0] * n_modes
    for m in modes:
        occ[m] += 1
    return tuple(occ)


def photonic_eta1(q, n_max: int = N_MAX) -> FockVector:
    q = np.asarray(q, dtype=complex)
    n = q.size
    return FockVector({_unit(n, k): q[k] for k in range(n)}, n, n_max)


def photonic_etaV(q, n_max: int = N_MAX) -> FockVector:
    """One photon per port, V at port k with amplitude q[k], H elsewhere."""
    q = np.asarray(q, dtype=complex)
    n = q.size
    terms = {}
    for k in range(n):
        modes = [hv(p)[1] if p == k else hv(p)[0] for p in range(n)]
        terms[_unit(2 * n, *modes)] = q[k]
    return FockVector(terms, 2 * n, n_max)


def photonic_w1(n: int, n_max: int = N_MAX) -> FockVector:
    if n < 2:
        raise ValueError("photonic W needs n >= 2")
    return photonic_eta1(np.full(n, 1 / sqrt(n)), n_max)


def photonic_wV(n: int, n_max: int = N_MAX) -> FockVector:
    if n < 2:
        raise ValueError("photonic W needs n >= 2")
    return photonic_etaV(np.full(n, 1 / sqrt(n)), n_max)


# --- linear elements --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModeUnitary:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=complex))
        if m.shape[0] != m.shape[1]:
            raise ValueError("mode unitary must be square")
        if np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() > 1e-10:
            raise ValueError("mode transformation is not unitary")
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def beamsplitter(theta: float = np.pi / 4, phi: float = 0.0) -> ModeUnitary:
    c, s = np.cos(theta), np.sin(theta)
    return ModeUnitary([[c, -np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, c]])


def pbs() -> ModeUnitary:
    """Transmits H, reflects V; modes (1H, 1V, 2H, 2V)."""
    return ModeUnitary([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])


def hwp(angle: float) -> ModeUnitary:
    """Half-wave plate, fast axis at ``angle`` (radians) from H; modes (H, V)."""
    c, s = np.cos(2 * angle), np.sin(2 * angle)
    return ModeUnitary([[c, s], [s, -c]])


def qwp(angle: float) -> ModeUnitary:
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return ModeUnitary(rot @ np.diag([1, 1j]) @ rot.T)


def bs_v(t_v: float) -> ModeUnitary:
    """Couples a V mode to an auxiliary mode with amplitude transmittance t_v."""
    if not 0 <= t_v <= 1:
        raise ValueError("t_V must lie in [0, 1]")
    r = sqrt(1 - t_v**2)
    return ModeUnitary([[t_v, -r], [r, t_v]])


def phase(phi: float) -> ModeUnitary:
    return ModeUnitary([[np.exp(1j * phi)]])


def multiport_dft(n: int) -> ModeUnitary:
    if n < 2:
        raise ValueError("multiport needs n >= 2")
    j = np.arange(n)
    return ModeUnitary(np.exp(2j * np.pi * np.outer(j, j) / n) / sqrt(n))


def _expand(u: np.ndarray, occ_t: Occupation) -> dict[Occupation, complex]:
    """Output Fock amplitudes on the target modes for input occupation occ_t."""
    k = u.shape[0]
    poly: dict[Occupation, complex] = {(0,) * k: 1.0 + 0j}
    for j, nj in enumerate(occ_t):
        col = u[:, j]
        for _ in range(nj):
            nxt: dict[Occupation, complex] = {}
            for mono, c in poly.items():
                for out in range(k):
                    if col[out] == 0:
                        continue
                    m = list(mono)
                    m[out] += 1
                    key = tuple(m)
                    nxt[key] = nxt.get(key, 0) + c * col[out]
            poly = nxt
    norm_in = sqrt(np.prod([factorial(x) for x in occ_t]))
    return {mono: c * sqrt(np.prod([factorial(x) for x in mono])) / norm_in
            for mono, c in poly.items()}


def apply_mode_unitary(state: FockVector, u: ModeUnitary, modes: Sequence[int]) -> FockVector:
    modes = list(modes)
    if len(modes) != u.size:
        raise ValueError(f"unitary acts on {u.size} modes, got targets {modes}")
    if len(set(modes)) != len(modes) or any(m < 0 or m >= state.n_modes for m in modes):
        raise ValueError(f"invalid target modes {modes}")
    cache: dict[Occupation, dict] = {}
    out: dict[Occupation, complex] = {}
    for occ, amp in state.terms.items():
        occ_t = tuple(occ[m] for m in modes)
        if occ_t not in cache:
            cache[occ_t] = _expand(u.matrix, occ_t)
        base = list(occ)
        for mono, c in cache[occ_t].items():
            for m, x in zip(modes, mono):
                base[m] = x
            key = tuple(base)
            out[key] = out.get(key, 0) + amp * c
    if any(sum(k) > state.n_max for k, v in out.items() if abs(v) > _AMP_CUT):
        raise OverflowError("photon number exceeded truncation under a unitary")
    return FockVector(out, state.n_modes, state.n_max)


# --- sources ----------------------------------------------------------------

def _place(local: dict[Occupation, complex], modes: Sequence[int], n_modes: int) -> dict:
    out = {}
    for occ, amp in local.items():
        full = [0] * n_modes
        for m, x in zip(modes, occ):
            full[m] = x
        out[tuple(full)] = amp
    return out


def sps(mode: int, n_modes: int, n_max: int = N_MAX) -> FockVector:
    return FockVector({_unit(n_modes, mode): 1.0}, n_modes, n_max)


def two_crystal(a: complex, b: complex, c: complex, modes: Sequence[int] = (0, 1),
                n_modes: int = 2, n_max: int = N_MAX) -> FockVector:
    """a|4H> + b|4V> + c|2H2V> in the (H, V) modes of one port."""
    if abs(abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 - 1) > 1e-12:
        raise ValueError("two-crystal coefficients must be normalized")
    local = {(4, 0): a, (0, 4): b, (2, 2): c}
    return FockVector(_place(local, modes, n_modes), n_modes, n_max)


def psi4(modes: Sequence[int] = (0, 1, 2, 3), n_modes: int = 4, n_max: int = N_MAX) -> FockVector:
    """Four-photon SPDC state sqrt(2/3)|GHZ> - sqrt(1/3)|EPR>|EPR>.

    ``modes`` are (A_H, A_V, B_H, B_V). |GHZ> = (|2H>_A|2H>_B + |2V>_A|2V>_B)/sqrt2
    and |EPR>|EPR> is (A_H^dag B_V^dag + A_V^dag B_H^dag)^2 |0> brought to unit
    norm; the sum is renormalized at the end.
    """
    ghz = {(2, 0, 2, 0): 1 / sqrt(2), (0, 2, 0, 2): 1 / sqrt(2)}
    # (A_H^dag B_V^dag + A_V^dag B_H^dag)^2, one (A pol, B pol) choice per factor
    epr2: dict[Occupation, complex] = {}
    for (p1, q1), (p2, q2) in ((x, y) for x in ((0, 1), (1, 0)) for y in ((0, 1), (1, 0))):
        occ = [0, 0, 0, 0]
        occ[p1] += 1
        occ[2 + q1] += 1
        occ[p2] += 1
        occ[2 + q2] += 1
        key = tuple(occ)
        epr2[key] = epr2.get(key, 0) + sqrt(np.prod([factorial(x) for x in occ]))
    n = sqrt(sum(abs(v) ** 2 for v in epr2.values()))
    local: dict[Occupation, complex] = {k: sqrt(2 / 3) * v for k, v in ghz.items()}
    for k, v in epr2.items():
        local[k] = local.get(k, 0) - sqrt(1 / 3) * v / n
    norm = sqrt(sum(abs(v) ** 2 for v in local.values()))
    local = {k: v / norm for k, v in local.items()}
    return FockVector(_place(local, modes, n_modes), n_modes, n_max)


def source(kind: str, n_modes: int, n_max: int = N_MAX, **params) -> FockVector:
    """Build a source state over ``n_modes`` modes. Kinds: sps, fock, two_crystal, psi4, vacuum."""
    if kind == "sps":
        return sps(params["mode"], n_modes, n_max)
    if kind == "fock":
        occ = list(params["occupation"])
        if len(occ) != n_modes:
            raise ValueError("fock source occupation length differs from mode count")
        return FockVector({tuple(occ): 1.0}, n_modes, n_max)
    if kind == "vacuum":
        return FockVector({(0,) * n_modes: 1.0}, n_modes, n_max)
    if kind == "two_crystal":
        return two_crystal(params["a"], params["b"], params["c"],
                           params.get("modes", (0, 1)), n_modes, n_max)
    if kind == "psi4":
        return psi4(params.get("modes", (0, 1, 2, 3)), n_modes, n_max)
    raise ValueError(f"unknown source kind {kind!r}")


# --- post-selection ---------------------------------------------------------

@dataclass(frozen=True)
class Clause:
    """Photon-count condition on the summed occupation of some modes."""

    modes: tuple[int, ...]
    count: Optional[int] = None
    at_least: Optional[int] = None

    def __post_init__(self):
        if (self.count is None) == (self.at_least is None):
            raise ValueError("a clause needs exactly one of count / at_least")

    def holds(self, occ: Occupation) -> bool:
        s = sum(occ[m] for m in self.modes)
        return s == self.count if self.count is not None else s >= self.at_least


def one_per_port(ports: Sequence[int]) -> list[Clause]:
    return [Clause(hv(p), count=1) for p in ports]


def postselect(state: FockVector, pattern: Sequence[Clause]) -> tuple[Optional[FockVector], float]:
    """Condition on every clause holding. Returns (None, 0.0) when nothing matches."""
    if not pattern:
        raise ValueError("empty post-selection pattern")
    for cl in pattern:
        if any(m < 0 or m >= state.n_modes for m in cl.modes):
            raise ValueError(f"clause references undeclared mode: {cl.modes}")
    kept = {k: v for k, v in state.terms.items() if all(cl.holds(k) for cl in pattern)}
    prob = float(sum(abs(v) ** 2 for v in kept.values()))
    if prob <= 1e-30:
        return None, 0.0
    return FockVector.normalized(kept, state.n_modes, state.n_max), prob


def reduced_fidelity(state: FockVector, target: FockVector, keep: Sequence[int]) -> float:
    """<target| rho_keep |target>, tracing the modes not in ``keep``."""
    keep = list(keep)
    if target.n_modes != len(keep):
        raise ValueError("target mode count differs from kept modes")
    rest = [m for m in range(state.n_modes) if m not in keep]
    overlaps: dict[Occupation, complex] = {}
    for occ, amp in state.terms.items():
        kk = tuple(occ[m] for m in keep)
        t = target.terms.get(kk)
        if t is None:
            continue
        rk = tuple(occ[m] for m in rest)
        overlaps[rk] = overlaps.get(rk, 0) + t.conjugate() * amp
    return float(min(1.0, sum(abs(v) ** 2 for v in overlaps.values())))


# --- photon statistics ------------------------------------------------------

@dataclass
class ModeStats:
    mean_a: np.ndarray
    correlation: np.ndarray      # <a_k^dag a_m>
    coincidence: np.ndarray      # <n_k n_m>
    mandel: np.ndarray           # per mode, nan for empty modes


def mode_statistics(state: FockVector) -> ModeStats:
    n = state.n_modes
    mean_a = np.zeros(n, dtype=complex)
    corr = np.zeros((n, n), dtype=complex)
    coinc = np.zeros((n, n))
    for occ, amp in state.terms.items():
        for k in range(n):
            if occ[k] == 0:
                continue
            lower = list(occ)
            lower[k] -= 1
            partner = state.terms.get(tuple(lower))
            if partner is not None:
                mean_a[k] += partner.conjugate() * amp * sqrt(occ[k])
            for j in range(n):
                moved = list(lower)
                moved[j] += 1
                partner = state.terms.get(tuple(moved))
                if partner is not None:
                    corr[j, k] += partner.conjugate() * amp * sqrt(occ[k]) * sqrt(moved[j])
        w = abs(amp) ** 2
        o = np.asarray(occ, dtype=float)
        coinc += w * np.outer(o, o)
    mean_n = np.real(np.diag(corr))
    var = np.diag(coinc) - mean_n**2
    with np.errstate(invalid="ignore", divide="ignore"):
        mandel = np.where(mean_n > 0, (var - mean_n) / np.where(mean_n > 0, mean_n, 1), np.nan)
    return ModeStats(mean_a, corr, coinc, mandel)


def anticorrelation_report(n: int) -> dict[str, Any]:
    """Coincidence rates of photonic W_n(1) against the product of mean counts.

    The moment <n_k n_m> = 1/n holds only for k == m; for distinct
    modes the coincidence is 0. Both comparisons are returned.
    """
    st = mode_statistics(photonic_w1(n))
    product = float(np.real(st.correlation[0, 0]) * np.real(st.correlation[1, 1]))
    one_over_n = 1 / n
    distinct = float(st.coincidence[0, 1])
    return {
        "n": n,
        "moment_one_over_n": one_over_n,
        "product_of_means": product,
        "moment_one_over_n_below_product": one_over_n < product,
        "distinct_mode_coincidence": distinct,
        "distinct_less_than_product": distinct < product,
        "same_mode_second_moment": float(st.coincidence[0, 0]),
    }


# --- schemes ----------------------------------------------------------------

class SchemeError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def element_unitary(kind: str, params: dict) -> ModeUnitary:
    def angle(key: str) -> float:
        if key in params:
            return float(params[key])
        if key + "_deg" in params:
            return np.deg2rad(float(params[key + "_deg"]))
        raise KeyError(key)

    if kind == "beamsplitter":
        return beamsplitter(angle("theta") if ("theta" in params or "theta_deg" in params) else np.pi / 4,
                            float(params.get("phi", 0.0)))
    if kind == "pbs":
        return pbs()
    if kind == "hwp":
        return hwp(angle("angle"))
    if kind == "qwp":
        return qwp(angle("angle"))
    if kind == "bs_v":
        return bs_v(float(params["t_v"]))
    if kind == "phase":
        return phase(angle("phi"))
    if kind == "dft":
        return multiport_dft(int(params["n"]))
    if kind == "unitary":
        re = np.asarray(params["real"], dtype=float)
        im = np.asarray(params.get("imag", np.zeros_like(re)), dtype=float)
        return ModeUnitary(re + 1j * im)
    raise KeyError(kind)


@dataclass
class OpticalScheme:
    modes: list[str]
    sources: list[dict]
    elements: list[dict]
    postselect: list[Clause]
    target: Optional[dict] = None
    keep: Optional[list[int]] = None
    n_max: int = N_MAX
    name: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def n_modes(self) -> int:
        return len(self.modes)


def _mode_index(ref, names: list[str], where: str) -> int:
    if isinstance(ref, str):
        if ref not in names:
            raise SchemeError(where, f"undeclared mode {ref!r}")
        return names.index(ref)
    if isinstance(ref, int) and 0 <= ref < len(names):
        return ref
    raise SchemeError(where, f"invalid mode reference {ref!r}")


def parse_scheme(d: dict, n_max: Optional[int] = None) -> OpticalScheme:
    if not isinstance(d, dict):
        raise SchemeError("<root>", "scheme must be a JSON object")
    if "modes" not in d:
        raise SchemeError("modes", "missing")
    modes = d["modes"]
    if isinstance(modes, int):
        modes = [str(k) for k in range(modes)]
    if not isinstance(modes, list) or not modes or len(set(map(str, modes))) != len(modes):
        raise SchemeError("modes", "must be a positive count or a list of unique names")
    names = [str(m) for m in modes]

    src = d.get("source")
    if src is None:
        raise SchemeError("source", "missing")
    sources = src if isinstance(src, list) else [src]
    parsed_sources = []
    for i, s in enumerate(sources):
        where = f"source[{i}]"
        if not isinstance(s, dict) or "kind" not in s:
            raise SchemeError(where, "needs a 'kind'")
        s = dict(s)
        for key in ("mode",):
            if key in s:
                s[key] = _mode_index(s[key], names, f"{where}.{key}")
        if "modes" in s:
            s["modes"] = [_mode_index(m, names, f"{where}.modes") for m in s["modes"]]
        if "occupation" in s and isinstance(s["occupation"], dict):
            occ = [0] * len(names)
            for m, c in s["occupation"].items():
                occ[_mode_index(m, names, f"{where}.occupation")] = int(c)
            s["occupation"] = occ
        parsed_sources.append(s)

    elements = []
    for i, e in enumerate(d.get("elements", [])):
        where = f"elements[{i}]"
        if not isinstance(e, dict) or "type" not in e:
            raise SchemeError(where, "needs a 'type'")
        targets = [_mode_index(m, names, f"{where}.targets") for m in e.get("targets", [])]
        try:
            u = element_unitary(e["type"], e.get("params", {}))
        except KeyError as exc:
            raise SchemeError(where, f"unknown type or missing parameter {exc}") from None
        except ValueError as exc:
            raise SchemeError(where, str(exc)) from None
        if len(targets) != u.size:
            raise SchemeError(f"{where}.targets", f"expected {u.size} modes, got {len(targets)}")
        elements.append({"type": e["type"], "params": e.get("params", {}), "targets": targets, "u": u})

    ps = d.get("postselect")
    if not ps:
        raise SchemeError("postselect", "missing or empty")
    clauses = []
    for i, c in enumerate(ps):
        where = f"postselect[{i}]"
        if not isinstance(c, dict) or "modes" not in c:
            raise SchemeError(where, "needs 'modes'")
        ms = tuple(_mode_index(m, names, f"{where}.modes") for m in c["modes"])
        try:
            clauses.append(Clause(ms, count=c.get("count"), at_least=c.get("at_least")))
        except ValueError as exc:
            raise SchemeError(where, str(exc)) from None

    keep = None
    target = d.get("target_state")
    if target is not None:
        if not isinstance(target, dict) or "kind" not in target:
            raise SchemeError("target_state", "needs a 'kind'")
        keep = [_mode_index(m, names, "target_state.modes")
                for m in target.get("modes", names)]

    return OpticalScheme(
        modes=names, sources=parsed_sources, elements=elements, postselect=clauses,
        target=target, keep=keep, n_max=int(n_max or d.get("n_max", N_MAX)),
        name=str(d.get("name", "")), raw=d,
    )


def load_scheme(path: Union[str, Path], n_max: Optional[int] = None) -> OpticalScheme:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemeError(f"line {exc.lineno}", exc.msg) from None
    return parse_scheme(d, n_max)


def scheme_text(d: dict) -> str:
    return json.dumps(d, sort_keys=True, indent=2) + "\n"


def _build_sources(scheme: OpticalScheme) -> FockVector:
    state = FockVector({(0,) * scheme.n_modes: 1.0}, scheme.n_modes, scheme.n_max)
    for s in scheme.sources:
        params = {k: v for k, v in s.items() if k != "kind"}
        part = source(s["kind"], scheme.n_modes, scheme.n_max, **params)
        # sources occupy disjoint modes, so the product is a sum of occupations
        terms: dict[Occupation, complex] = {}
        for ka, va in state.terms.items():
            for kb, vb in part.terms.items():
                key = tuple(x + y for x, y in zip(ka, kb))
                terms[key] = terms.get(key, 0) + va * vb
        if any(sum(k) > scheme.n_max for k in terms):
            raise OverflowError("sources exceed the photon truncation")
        state = FockVector(terms, scheme.n_modes, scheme.n_max)
    return state


def target_state(spec: dict, n_max: int = N_MAX) -> FockVector:
    kind = spec["kind"]
    if kind == "photonic_w1":
        return photonic_w1(int(spec["n"]), n_max)
    if kind == "photonic_wV":
        return photonic_wV(int(spec["n"]), n_max)
    if kind == "photonic_eta1":
        return photonic_eta1(np.asarray(spec["q"]), n_max)
    if kind == "terms":
        terms = {tuple(k): complex(*v) if isinstance(v, list) else complex(v)
                 for k, v in spec["terms"]}
        return FockVector.normalized(terms, len(next(iter(terms))), n_max)
    raise SchemeError("target_state.kind", f"unknown kind {kind!r}")


@dataclass
class SchemeReport:
    probability: float
    fidelity: Optional[float]
    conditional_state: Optional[FockVector]
    name: str = ""

    def to_dict(self) -> dict:
        cond = None
        if self.conditional_state is not None:
            cond = [{"occupation": list(k), "amplitude": [sig15(v.real), sig15(v.imag)]}
                    for k, v in self.conditional_state.terms.items()]
        return {
            "name": self.name,
            "probability": sig15(self.probability),
            "fidelity": None if self.fidelity is None else sig15(self.fidelity),
            "conditional_state": cond,
        }


def sig15(x: float) -> float:
    return float(f"{float(x):.15g}")


def run_scheme(scheme: OpticalScheme) -> SchemeReport:
    state = _build_sources(scheme)
    for e in scheme.elements:
        state = apply_mode_unitary(state, e["u"], e["targets"])
    cond, prob = postselect(state, scheme.postselect)
    fid = None
    if scheme.target is not None:
        if cond is None:
            fid = 0.0
        else:
            tgt = target_state(scheme.target, scheme.n_max)
            fid = reduced_fidelity(cond, tgt, scheme.keep)
    return SchemeReport(prob, fid, cond, scheme.name)


SCHEME_DIR = Path(__file__).parent / "schemes"


def shipped_scheme(name: str) -> Path:
    path = SCHEME_DIR / f"{name}.scheme"
    if not path.exists():
        raise FileNotFoundError(path)
    return path


def fock_to_qubits(state: FockVector, ports: Sequence[int]) -> np.ndarray:
    """Map one-photon-per-port polarization terms to a qubit vector (H->0, V->1)."""
    n = len(ports)
    out = np.zeros(2**n, dtype=complex)
    for occ, amp in state.terms.items():
        idx = 0
        for p in ports:
            h, v = occ[hv(p)[0]], occ[hv(p)[1]]
            if h + v != 1:
                raise ValueError(f"term {occ} is not one photon per port")
            idx = 2 * idx + v
        out[idx] += amp
    return out


TRIGGER_SETTINGS = {"H": 0.0, "V": 45.0, "+45": 22.5, "-45": -22.5}


def trigger_search(scheme: OpticalScheme, element_index: Optional[int] = None) -> dict:
    """Rerun a heralded scheme for each analyzer setting of its trigger half-wave plate.

    The plate (last ``hwp`` element unless ``element_index`` is given) is set so
    that the post-selected H count on the trigger projects onto H, V or +/-45.
    """
    idx = element_index
    if idx is None:
        hwps = [i for i, e in enumerate(scheme.elements) if e["type"] == "hwp"]
        if not hwps:
            raise SchemeError("elements", "no trigger half-wave plate found")
        idx = hwps[-1]
    results = {}
    for label, deg in TRIGGER_SETTINGS.items():
        elements = list(scheme.elements)
        e = dict(elements[idx])
        e["params"] = {"angle_deg": deg}
        e["u"] = hwp(np.deg2rad(deg))
        elements[idx] = e
        variant = OpticalScheme(scheme.modes, scheme.sources, elements, scheme.postselect,
                                scheme.target, scheme.keep, scheme.n_max, scheme.name)
        rep = run_scheme(variant)
        results[label] = {"probability": rep.probability, "fidelity": rep.fidelity}
    best = max(results, key=lambda k: (results[k]["fidelity"] or 0.0))
    return {"settings": results, "best": best}
