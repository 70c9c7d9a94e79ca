"""Circuit-to-Hamiltonian compilation with unary or one-hot clocks.

Layout of the compiled register: the ``W = len(x)`` input qubits, then the
``m`` ancillae (together the workspace), then the ``L = K`` clock qubits.
Clock projectors ``|mu(t)><mu(t')|`` are stored exactly on the whole clock
register as sparse blocks; the nominal locality of each term family is kept
as metadata.

Every non-clock term only touches legal clock codewords, so the Hamiltonian
splits into a legal block of dimension ``2^(W+m) (K+1)`` and a diagonal
illegal block equal to ``Delta * H_clock``.  Spectral questions are answered
on the small legal block plus that known diagonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from glhbench.config import DEFAULT, Config
from glhbench.errors import InputError, SizeError, ValidationError
from glhbench.guiding_states import FixedWeightState, SubsetState, geometric_bounds
from glhbench.operator_core import (
    HermitianTerm,
    LocalHamiltonian,
    SparseState,
    Spectrum,
    apply,
)

ENCODINGS = ("unary", "one_hot")
SW_FACTOR = 112


# ------------------------------------------------------------------ circuits


@dataclass(frozen=True, eq=False)
class Gate:
    qubits: tuple
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        q = tuple(int(i) for i in self.qubits)
        U = np.asarray(self.matrix, dtype=complex)
        if not 1 <= len(q) <= 2 or len(set(q)) != len(q):
            raise ValidationError(f"gates act on one or two distinct qubits, got {q}")
        if U.shape != (2 ** len(q),) * 2:
            raise ValidationError(f"gate matrix shape {U.shape} does not fit qubits {q}")
        if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) > DEFAULT.unitary_tol:
            raise ValidationError(f"gate on {q} is not unitary")
        object.__setattr__(self, "qubits", q)
        object.__setattr__(self, "matrix", U)

    def dagger(self) -> "Gate":
        return Gate(self.qubits, self.matrix.conj().T, self.label + "^dag" if self.label else "")


def identity_gate(q: int = 0) -> Gate:
    return Gate((q,), np.eye(2), "I")


@dataclass(frozen=True, eq=False)
class GateCircuit:
    """Input bits ``x``, ``m`` ancillae in ``|0>`` and an ordered gate list.

    ``idle_prefix`` counts leading identity gates added by :func:`pre_idle`.
    """

    x: str
    m: int
    gates: tuple
    idle_prefix: int = 0

    def __post_init__(self):
        if any(c not in "01" for c in self.x):
            raise InputError(f"input must be a bit string, got {self.x!r}")
        if self.m < 0:
            raise InputError("ancilla count must be nonnegative")
        gates = tuple(self.gates)
        if not gates:
            raise ValidationError("circuit needs at least one gate")
        for g in gates:
            if not isinstance(g, Gate):
                raise ValidationError(f"expected Gate, got {type(g).__name__}")
            if max(g.qubits) >= self.n_work:
                raise ValidationError(f"gate qubits {g.qubits} outside the {self.n_work}-qubit workspace")
        if self.n_work < 1:
            raise ValidationError("workspace is empty")
        object.__setattr__(self, "gates", gates)

    @property
    def W(self) -> int:
        return len(self.x)

    @property
    def n_work(self) -> int:
        return len(self.x) + self.m

    @property
    def K(self) -> int:
        return len(self.gates)

    @property
    def T(self) -> int:
        return self.K - self.idle_prefix

    @property
    def start_bits(self) -> str:
        return self.x + "0" * self.m

    def snapshots(self) -> list[np.ndarray]:
        """``[phi_0, ..., phi_K]`` with ``phi_t = U_t phi_{t-1}``."""
        phi = np.zeros(2 ** self.n_work, dtype=complex)
        phi[int(self.start_bits, 2)] = 1.0
        out = [phi]
        for g in self.gates:
            phi = apply_gate(phi, self.n_work, g.qubits, g.matrix)
            out.append(phi)
        return out

    def acceptance_probability(self) -> float:
        """Probability that qubit 0 reads 1 after the circuit."""
        phi = self.snapshots()[-1]
        half = 2 ** (self.n_work - 1)
        return float(np.sum(np.abs(phi[half:]) ** 2))


def apply_gate(state: np.ndarray, n: int, qubits: Sequence[int], U: np.ndarray) -> np.ndarray:
    """Apply ``U`` to ``qubits`` of an ``n``-qubit state by tensor reshaping."""
    k = len(qubits)
    psi = state.reshape((2,) * n)
    psi = np.moveaxis(psi, list(qubits), list(range(k)))
    shape = psi.shape
    psi = (U @ psi.reshape(2 ** k, -1)).reshape(shape)
    psi = np.moveaxis(psi, list(range(k)), list(qubits))
    return psi.reshape(-1)


def pre_idle(c: GateCircuit, N: int) -> GateCircuit:
    """Prepend ``N`` identity gates on qubit 0."""
    if N < 0:
        raise InputError("pre-idle count must be nonnegative")
    return GateCircuit(c.x, c.m, tuple(identity_gate(0) for _ in range(N)) + c.gates, c.idle_prefix + N)


def insert_idle(c: GateCircuit, s: int, S: int) -> GateCircuit:
    """Insert ``S`` identity gates right after gate ``s`` (``s = 0`` is pre-idling)."""
    if not 0 <= s <= c.K:
        raise InputError(f"s={s} outside [0, {c.K}]")
    if S < 0:
        raise InputError("idle length must be nonnegative")
    gates = c.gates[:s] + tuple(identity_gate(0) for _ in range(S)) + c.gates[s:]
    prefix = c.idle_prefix + S if s <= c.idle_prefix else c.idle_prefix
    return GateCircuit(c.x, c.m, gates, prefix)


# ------------------------------------------------------------------- clocks


@dataclass(frozen=True)
class ClockEncoding:
    kind: str
    K: int

    def __post_init__(self):
        if self.kind not in ENCODINGS:
            raise InputError(f"unknown clock encoding {self.kind!r}; choose from {ENCODINGS}")
        if self.K < 1:
            raise InputError("clock needs K >= 1")

    @property
    def L(self) -> int:
        return self.K

    def encode(self, t: int) -> str:
        if not 0 <= t <= self.K:
            raise InputError(f"time {t} outside [0, {self.K}]")
        if self.kind == "unary":
            return "1" * t + "0" * (self.K - t)
        return "0" * self.K if t == 0 else "0" * (t - 1) + "1" + "0" * (self.K - t)

    def code(self, t: int) -> int:
        return int(self.encode(t), 2)

    def penalty(self, s: str) -> int:
        """Value of ``H_clock`` on a clock basis string."""
        if self.kind == "unary":
            return sum(1 for a, b in zip(s, s[1:]) if a == "0" and b == "1")
        w = s.count("1")
        return w * (w - 1) // 2

    def max_penalty(self) -> int:
        return self.K // 2 if self.kind == "unary" else self.K * (self.K - 1) // 2

    def nominal_locality(self) -> dict:
        """Clock qubits touched per term family in the usual local realization."""
        if self.kind == "unary":
            return {"in": 1, "prop": 3, "out": 1, "clock": 2}
        return {"in": 1, "prop": 2, "out": 1, "clock": 2}


def _clock_op(enc: ClockEncoding, t: int, s: int) -> sp.csr_matrix:
    D = 2 ** enc.L
    return sp.csr_matrix(([1.0], ([enc.code(t)], [enc.code(s)])), shape=(D, D), dtype=complex)


# ------------------------------------------------------------------- FK


@dataclass(frozen=True, eq=False)
class FKInstance:
    circuit: GateCircuit
    encoding: ClockEncoding
    delta: float
    H_in: LocalHamiltonian
    H_clock: LocalHamiltonian
    H_prop: LocalHamiltonian
    H_out: LocalHamiltonian
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.circuit.n_work + self.encoding.L

    @property
    def K(self) -> int:
        return self.circuit.K

    @property
    def N(self) -> int:
        return self.circuit.idle_prefix

    @property
    def T(self) -> int:
        return self.circuit.T

    def penalty(self) -> LocalHamiltonian:
        """``H_in + H_clock + H_prop`` without the ``Delta`` factor."""
        return self.H_in + self.H_clock + self.H_prop

    def hamiltonian(self) -> LocalHamiltonian:
        return self.penalty().scaled(self.delta) + self.H_out


def build_fk(c: GateCircuit, enc: str | ClockEncoding, delta: float, cfg: Config = DEFAULT) -> FKInstance:
    """Compile ``c`` into ``Delta (H_in + H_clock + H_prop) + H_out``."""
    if delta <= 0:
        raise InputError("Delta must be positive")
    if isinstance(enc, str):
        enc = ClockEncoding(enc, c.K)
    if enc.K != c.K:
        raise InputError(f"encoding built for K={enc.K}, circuit has K={c.K}")
    nw, L = c.n_work, enc.L
    n = nw + L
    if n > cfg.qubit_cap + 8:
        raise SizeError(f"compiled register of {n} qubits exceeds the cap")
    clock = tuple(range(nw, n))
    P0 = _clock_op(enc, 0, 0)
    proj = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]

    in_terms = []
    for j, b in enumerate(c.x):
        in_terms.append(HermitianTerm((j,) + clock, sp.kron(proj[1 - int(b)], P0)))
    for j in range(c.W, nw):
        in_terms.append(HermitianTerm((j,) + clock, sp.kron(proj[1], P0)))

    clk_terms = []
    if enc.kind == "unary":
        pat = np.diag([0.0, 1.0, 0.0, 0.0])  # |01><01|
        for t in range(L - 1):
            clk_terms.append(HermitianTerm((clock[t], clock[t + 1]), pat))
    else:
        pat = np.diag([0.0, 0.0, 0.0, 1.0])  # |11><11|
        for a in range(L):
            for b in range(a + 1, L):
                clk_terms.append(HermitianTerm((clock[a], clock[b]), pat))

    prop_terms = []
    for t, g in enumerate(c.gates, start=1):
        Ig = sp.identity(2 ** len(g.qubits), dtype=complex, format="csr")
        U = sp.csr_matrix(g.matrix)
        diag = _clock_op(enc, t, t) + _clock_op(enc, t - 1, t - 1)
        hop = sp.kron(U, _clock_op(enc, t, t - 1))
        mat = sp.kron(Ig, diag) - hop - hop.conj().T
        prop_terms.append(HermitianTerm(g.qubits + clock, mat))

    out_terms = [HermitianTerm((0,) + clock, sp.kron(proj[0], _clock_op(enc, c.K, c.K)))]

    def ham(terms):
        return LocalHamiltonian.from_terms(n, terms, k=max((t.size for t in terms), default=1))

    meta = {
        "W": c.W,
        "m": c.m,
        "K": c.K,
        "N": c.idle_prefix,
        "T": c.T,
        "encoding": enc.kind,
        "delta": float(delta),
        "nominal_locality": enc.nominal_locality(),
        "max_gate_qubits": max(len(g.qubits) for g in c.gates),
    }
    return FKInstance(c, enc, float(delta), ham(in_terms), ham(clk_terms), ham(prop_terms), ham(out_terms), meta)


# ----------------------------------------------------------- legal block


def legal_indices(inst: FKInstance) -> np.ndarray:
    """Full-space index of ``|w>|mu(t)>``, ordered with ``t`` outer and ``w`` inner."""
    nw, L = inst.circuit.n_work, inst.encoding.L
    w = np.arange(2 ** nw)
    return np.concatenate([w * 2 ** L + inst.encoding.code(t) for t in range(inst.K + 1)])


def legal_blocks(inst: FKInstance) -> tuple[np.ndarray, np.ndarray]:
    """``(H_in + H_prop, H_out)`` restricted to legal clock states, built from the circuit."""
    c = inst.circuit
    nw, K = c.n_work, c.K
    d = 2 ** nw
    P = np.zeros((d * (K + 1), d * (K + 1)), dtype=complex)
    V = np.zeros_like(P)
    w = np.arange(d)
    bits = (w[:, None] >> (nw - 1 - np.arange(nw))[None, :]) & 1
    start = np.array([int(b) for b in c.start_bits])
    P[:d, :d] += np.diag((bits != start).sum(axis=1).astype(float))
    for t, g in enumerate(c.gates, start=1):
        U = np.eye(d, dtype=complex)
        for col in range(d):
            U[:, col] = apply_gate(np.eye(d, dtype=complex)[col], nw, g.qubits, g.matrix)
        a, b = slice((t - 1) * d, t * d), slice(t * d, (t + 1) * d)
        P[a, a] += np.eye(d)
        P[b, b] += np.eye(d)
        P[b, a] -= U
        P[a, b] -= U.conj().T
    last = slice(K * d, (K + 1) * d)
    V[last, last] = np.diag((bits[:, 0] == 0).astype(float))
    return P, V


def illegal_floor(inst: FKInstance) -> float:
    """Smallest eigenvalue outside the legal block (``Delta`` times the least penalty)."""
    enc = inst.encoding
    legal = 2 ** enc.L == enc.K + 1 or (enc.kind == "one_hot" and enc.K == 1)
    return np.inf if legal else inst.delta * 1.0


def fk_spectrum(inst: FKInstance, cfg: Config = DEFAULT) -> Spectrum:
    """Exact spectrum of the legal block with the illegal floor attached."""
    P, V = legal_blocks(inst)
    w, v = np.linalg.eigh(inst.delta * P + V)
    return Spectrum(w, v, 2 ** inst.n, basis=legal_indices(inst),
                    complement_floor=illegal_floor(inst), degeneracy_tol=cfg.degeneracy_tol)


def fk_ground_state(inst: FKInstance) -> tuple[float, SparseState]:
    spec = fk_spectrum(inst)
    return spec.ground_energy, SparseState(inst.n, spec.basis, spec.eigenvectors[:, 0])


def fk_norm(inst: FKInstance) -> float:
    """Exact ``||H||``: legal eigenvalues against ``Delta * max H_clock``."""
    P, V = legal_blocks(inst)
    w = np.linalg.eigvalsh(inst.delta * P + V)
    legal_max = float(max(abs(w[0]), abs(w[-1])))
    illegal = 0.0 if np.isinf(illegal_floor(inst)) else inst.delta * inst.encoding.max_penalty()
    return max(legal_max, illegal)


# ----------------------------------------------------------- history states


def history_state(c: GateCircuit, enc: str | ClockEncoding, sparse: bool = False, cap: int = DEFAULT.state_cap):
    """``(K+1)^{-1/2} sum_t |phi_t>|mu(t)>`` as a dense vector or :class:`SparseState`."""
    if isinstance(enc, str):
        enc = ClockEncoding(enc, c.K)
    n = c.n_work + enc.L
    idx, amp = [], []
    norm = 1 / np.sqrt(c.K + 1)
    w = np.arange(2 ** c.n_work)
    for t, phi in enumerate(c.snapshots()):
        nz = np.abs(phi) > 0
        idx.append(w[nz] * 2 ** enc.L + enc.code(t))
        amp.append(norm * phi[nz])
    state = SparseState(n, np.concatenate(idx), np.concatenate(amp))
    if sparse:
        return state
    if n > cap:
        raise SizeError(f"{n} qubits exceed the dense state cap; use sparse=True")
    return state.to_dense()


@dataclass(frozen=True)
class RSetDescription:
    sigma: str
    nu: int
    encoding: ClockEncoding

    def __post_init__(self):
        if any(ch not in "01" for ch in self.sigma):
            raise InputError("sigma must be a bit string")
        if self.nu < 1:
            raise InputError("nu must be at least 1")
        if self.nu > self.encoding.K:
            raise InputError(f"nu={self.nu} exceeds K={self.encoding.K}")

    def strings(self) -> tuple:
        return tuple(self.sigma + self.encoding.encode(t) for t in range(1, self.nu + 1))


def r_state(r: RSetDescription) -> SubsetState:
    """Uniform subset state over ``{sigma} x {mu(1), ..., mu(nu)}``."""
    strings = r.strings()
    return SubsetState(len(strings[0]), strings, cap=max(DEFAULT.subset_cap, len(strings)))


def r_state_family(r: RSetDescription):
    """The R-set state in its structured family.

    One-hot clocks give fixed-weight data.  Unary clocks spread the support
    over weights ``|sigma| + 1 .. |sigma| + nu``, but the state is not uniform
    on those whole sectors, so it stays a subset state.
    """
    if r.encoding.kind == "one_hot":
        n = len(r.sigma) + r.encoding.L
        return FixedWeightState(n, r.sigma.count("1") + 1, r.strings())
    return r_state(r)


def subset_sparse(sub: SubsetState) -> SparseState:
    return SparseState(sub.n, np.array([int(s, 2) for s in sub.strings]), sub.alpha())


def window_state(c: GateCircuit, s: int, S: int, enc: str | ClockEncoding, cap: int = DEFAULT.state_cap):
    """``phi_s (x) uniform(|mu(s)>, ..., |mu(S)>)`` for a circuit already idled after gate ``s``."""
    if isinstance(enc, str):
        enc = ClockEncoding(enc, c.K)
    if not 0 <= s <= S <= c.K:
        raise InputError(f"window [{s}, {S}] outside [0, {c.K}]")
    phi = c.snapshots()[s]
    w = np.arange(2 ** c.n_work)
    nz = np.abs(phi) > 0
    idx, amp = [], []
    for t in range(s, S + 1):
        idx.append(w[nz] * 2 ** enc.L + enc.code(t))
        amp.append(phi[nz] / np.sqrt(S - s + 1))
    return SparseState(c.n_work + enc.L, np.concatenate(idx), np.concatenate(amp))


def r_fidelity_closed_form(N: int, T: int) -> float:
    return N / (N + T + 1)


# ------------------------------------------------------------- thresholds


@dataclass(frozen=True)
class Thresholds:
    a: float
    b: float
    a_rescaled: float | None
    b_rescaled: float | None
    factor: float | None
    sw_regime: bool
    valid: bool
    c_sw: float


def yes_no_thresholds(
    K: int, delta: float, eps: float = 0.0, c_sw: float = DEFAULT.sw_slack, factor: float | None = None
) -> Thresholds:
    """``a = c_sw/Delta + eps/(K+1)`` and ``b = -c_sw/Delta + (1-eps)/(K+1)``.

    ``factor`` is the norm used by a unit rescaling; when given the rescaled
    pair is reported as well.  Crossed thresholds are flagged, not raised.
    """
    if K < 1 or delta <= 0:
        raise InputError("need K >= 1 and Delta > 0")
    a = c_sw / delta + eps / (K + 1)
    b = -c_sw / delta + (1 - eps) / (K + 1)
    return Thresholds(
        a=a, b=b,
        a_rescaled=None if factor is None else a / factor,
        b_rescaled=None if factor is None else b / factor,
        factor=factor,
        sw_regime=bool(delta > SW_FACTOR * K ** 3),
        valid=bool(b > a),
        c_sw=c_sw,
    )


# ------------------------------------------------------------- verification


def nullity_residual(inst: FKInstance, eta) -> float:
    """``||(H_in + H_clock + H_prop) eta||`` by matrix-free products on the full register."""
    vec = eta.to_dense() if isinstance(eta, SparseState) else eta
    return float(np.linalg.norm(apply(inst.penalty(), vec)))


def output_energy(inst: FKInstance, eta) -> float:
    vec = eta.to_dense() if isinstance(eta, SparseState) else eta
    return float(np.real(np.vdot(vec, apply(inst.H_out, vec))))


def _legal_vector(inst: FKInstance, eta: SparseState) -> np.ndarray:
    pos = {int(i): k for k, i in enumerate(legal_indices(inst))}
    out = np.zeros(len(pos), dtype=complex)
    for i, a in zip(eta.indices, eta.amplitudes):
        out[pos[int(i)]] = a
    return out


@dataclass(frozen=True)
class HardnessReport:
    K: int
    N: int
    T: int
    delta: float
    encoding: str
    nullity_residual: float
    output_identity_error: float
    acceptance: float
    ground_energy: float
    gap: float
    g_eta_distance: float
    sw_constant: float
    r_fidelity_g: float | None
    r_fidelity_eta: float | None
    r_lower_bound: float | None
    thresholds: Thresholds
    norm: float
    checks: dict

    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "thresholds"}
        d["thresholds"] = self.thresholds.__dict__
        return d


def verify_hardness_instance(
    c: GateCircuit,
    enc: str,
    delta: float,
    N: int,
    eps: float = 0.0,
    c_sw: float = DEFAULT.sw_slack,
    tol: float = 1e-10,
) -> HardnessReport:
    """Run the nullity, output-energy, closeness, fidelity, gap and threshold checks."""
    ci = pre_idle(c, N)
    inst = build_fk(ci, enc, delta)
    P, V = legal_blocks(inst)
    eta_s = history_state(ci, inst.encoding, sparse=True)
    eta = _legal_vector(inst, eta_s)
    null = float(np.linalg.norm(P @ eta))
    p_acc = ci.acceptance_probability()
    e_out = float(np.real(np.vdot(eta, V @ eta)))
    out_err = abs(e_out * (ci.K + 1) + p_acc - 1.0)

    spec = fk_spectrum(inst)
    g = spec.eigenvectors[:, 0]
    ov = np.vdot(g, eta)
    g = g * (ov / abs(ov)) if abs(ov) > 0 else g
    dist = float(np.linalg.norm(g - eta))
    norm = fk_norm(inst)
    thr = yes_no_thresholds(ci.K, delta, eps, c_sw, factor=norm)

    checks = {
        "nullity": null <= tol,
        "output_identity": out_err <= tol,
        "gap_positive": spec.gap > 0,
        "thresholds_valid": thr.valid,
        "sw_regime": thr.sw_regime,
    }
    mid = 0.5 * (thr.a + thr.b)
    if p_acc >= 1 - eps - 1e-12:
        checks["threshold_side"] = spec.ground_energy <= thr.a
    elif p_acc <= eps + 1e-12:
        checks["threshold_side"] = spec.ground_energy >= thr.b
    checks["midpoint_side"] = (spec.ground_energy < mid) == (p_acc > 0.5)

    f_g = f_eta = lower = None
    if N >= 1:
        r = RSetDescription(ci.start_bits, N, inst.encoding)
        R = _legal_vector(inst, subset_sparse(r_state(r)))
        f_g = float(abs(np.vdot(R, g)) ** 2)
        f_eta = float(abs(np.vdot(R, eta)) ** 2)
        lower = geometric_bounds(dist, min(1.0, f_eta))[0]
        checks["r_fidelity_law"] = abs(f_eta - r_fidelity_closed_form(N, ci.T)) <= 1e-12
        checks["geometric_lower_bound"] = f_g >= lower - 1e-12

    return HardnessReport(
        K=ci.K, N=N, T=ci.T, delta=float(delta), encoding=inst.encoding.kind,
        nullity_residual=null, output_identity_error=out_err, acceptance=p_acc,
        ground_energy=spec.ground_energy, gap=spec.gap, g_eta_distance=dist,
        sw_constant=dist * delta, r_fidelity_g=f_g, r_fidelity_eta=f_eta, r_lower_bound=lower,
        thresholds=thr, norm=norm, checks=checks,
    )


# ----------------------------------------------------------------- corpora

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
_S = np.diag([1, 1j])
_T = np.diag([1, np.exp(1j * np.pi / 4)])
_CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_circuit(W: int, m: int, K: int, rng: np.random.Generator, x: str | None = None) -> GateCircuit:
    """Gates drawn from H, S, T, X, CNOT, CZ and Haar two-qubit unitaries."""
    nw = W + m
    x = "".join(rng.choice(["0", "1"], size=W)) if x is None else x
    gates = []
    for _ in range(K):
        kind = rng.integers(7) if nw > 1 else rng.integers(4)
        if kind < 4:
            U = [_H, _S, _T, _X][kind]
            gates.append(Gate((int(rng.integers(nw)),), U))
        else:
            q = tuple(int(v) for v in rng.choice(nw, size=2, replace=False))
            U = [_CNOT, _CZ, None][kind - 4]
            gates.append(Gate(q, random_unitary(4, rng) if U is None else U))
    return GateCircuit(x, m, tuple(gates))


def deterministic_circuit(W: int, m: int, T: int, accept: bool, rng: np.random.Generator,
                          x: str | None = None) -> GateCircuit:
    """Circuit whose output qubit 0 is 1 with probability exactly 1 (accept) or 0.

    Body gates are classical or diagonal, or a random unitary immediately
    undone; the last gate fixes qubit 0 to the requested answer.
    """
    if T < 1:
        raise InputError("need at least one gate")
    nw = W + m
    x = "".join(rng.choice(["0", "1"], size=W)) if x is None else x
    gates: list = []
    while len(gates) < T - 1:
        kind = rng.integers(5) if nw > 1 else rng.integers(3)
        if kind == 0:
            gates.append(Gate((int(rng.integers(nw)),), _X))
        elif kind == 1:
            gates.append(Gate((int(rng.integers(nw)),), [_Z, _S, _T][rng.integers(3)]))
        elif kind == 2 and len(gates) < T - 2:
            U = Gate((int(rng.integers(nw)),), random_unitary(2, rng))
            gates += [U, U.dagger()]
        elif kind == 3:
            q = tuple(int(v) for v in rng.choice(nw, size=2, replace=False))
            gates.append(Gate(q, [_CNOT, _CZ, _SWAP][rng.integers(3)]))
        else:
            gates.append(Gate((int(rng.integers(nw)),), _Z))
    body = GateCircuit(x, m, tuple(gates) or (identity_gate(0),))
    phi = body.snapshots()[-1] if gates else body.snapshots()[0]
    half = 2 ** (nw - 1)
    one = float(np.sum(np.abs(phi[half:]) ** 2)) > 0.5
    last = Gate((0,), _X) if one != accept else Gate((0,), _Z)
    return GateCircuit(x, m, tuple(gates) + (last,))


# -------------------------------------------------------------------- JSON


def circuit_to_json(c: GateCircuit) -> dict:
    return {
        "W": c.W,
        "m": c.m,
        "x": c.x,
        "gates": [
            {"qubits": list(g.qubits), "matrix": [[float(v.real), float(v.imag)] for v in g.matrix.ravel()]}
            for g in c.gates
        ],
    }


def circuit_from_json(obj: dict) -> GateCircuit:
    try:
        x = str(obj["x"])
        if int(obj.get("W", len(x))) != len(x):
            raise InputError(f"W={obj['W']} does not match |x|={len(x)}")
        gates = []
        for g in obj["gates"]:
            q = tuple(g["qubits"])
            flat = np.array([complex(re, im) for re, im in g["matrix"]], dtype=complex)
            gates.append(Gate(q, flat.reshape(2 ** len(q), 2 ** len(q))))
        return GateCircuit(x, int(obj.get("m", 0)), tuple(gates))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed circuit JSON: {exc}") from exc


def load_circuit(path: str) -> GateCircuit:
    with open(path) as fh:
        return circuit_from_json(json.load(fh))
