"""Explicit circuits for subset, encoded-subset and history states.

Subset states are built in two stages: a Grover-Rudolph rotation tree makes
the uniform superposition over ``bin(0), ..., bin(|C|-1)``, and a cycle
decomposition of the permutation ``bin(j) -> C_j`` moves that support onto
``C`` with one borrowed ancilla (qubit ``n``).  Every circuit is checked by
the statevector simulator in this module.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from glhbench.config import DEFAULT
from glhbench.errors import InputError, SizeError, UnsupportedError, ValidationError
from glhbench.guiding_states import EncodedSubsetState, SubsetState
from glhbench.feynman_kitaev import ClockEncoding, GateCircuit

KINDS = ("ry", "x", "mcx", "cblock", "unitary")
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True, eq=False)
class SynthGate:
    """One gate; ``controls``/``pattern`` give the control condition.

    ``ry``: rotation by ``theta`` on ``targets[0]``; ``x``: bit flip;
    ``mcx``: X on ``targets[0]`` when ``controls`` read ``pattern``;
    ``cblock``: ``unitary`` on ``targets`` when the single control reads 1;
    ``unitary``: uncontrolled block on ``targets``.
    """

    kind: str
    targets: tuple
    controls: tuple = ()
    pattern: str = ""
    theta: float = 0.0
    unitary: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        t = tuple(int(q) for q in self.targets)
        c = tuple(int(q) for q in self.controls)
        if len(set(t + c)) != len(t) + len(c):
            raise ValidationError("gate operands must be distinct")
        if len(c) != len(self.pattern) or any(b not in "01" for b in self.pattern):
            raise ValidationError("control pattern must be a bit string matching the controls")
        if self.kind == "cblock" and len(c) != 1:
            raise ValidationError("controlled blocks take exactly one control")
        if self.kind in ("x", "unitary") and c:
            raise ValidationError(f"{self.kind} gates are uncontrolled")
        if self.kind in ("cblock", "unitary"):
            U = np.asarray(self.unitary, dtype=complex)
            if U.shape != (2 ** len(t),) * 2:
                raise ValidationError("block unitary does not match its targets")
            if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) > DEFAULT.unitary_tol:
                raise ValidationError("block is not unitary")
            object.__setattr__(self, "unitary", U)
        elif len(t) != 1:
            raise ValidationError(f"{self.kind} acts on one target")
        object.__setattr__(self, "targets", t)
        object.__setattr__(self, "controls", c)

    def matrix(self) -> np.ndarray:
        if self.kind == "ry":
            return ry(self.theta)
        if self.kind in ("x", "mcx"):
            return _X
        return self.unitary

    @property
    def primitive_count(self) -> int:
        """Unit-cost gates; an X-string block counts its flips."""
        if self.kind == "cblock" and self.label.startswith("flip"):
            return len(self.targets)
        return 1

    def toffoli_estimate(self) -> int:
        """Two-qubit-level estimate: ``2k-3`` Toffolis for ``k >= 2`` controls."""
        k = len(self.controls)
        if k >= 2:
            return 2 * k - 3
        return 1

    def to_text(self) -> str:
        spec = f"[{self.pattern}@{','.join(map(str, self.controls))}]"
        if self.kind == "ry":
            if self.controls:
                return f"CRY {spec} -> {self.targets[0]} {self.theta:.12g}"
            return f"RY {self.targets[0]} {self.theta:.12g}"
        if self.kind == "x":
            return f"X {self.targets[0]}"
        if self.kind == "mcx":
            return f"CX {spec} -> {self.targets[0]}"
        tg = ",".join(map(str, self.targets))
        name = self.label or "U"
        if self.kind == "cblock":
            return f"CBLOCK {self.controls[0]} {name}@{tg}"
        return f"U {name}@{tg}"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "targets": list(self.targets), "controls": list(self.controls),
               "pattern": self.pattern}
        if self.kind == "ry":
            out["theta"] = float(self.theta)
        if self.unitary is not None:
            out["unitary"] = [[float(v.real), float(v.imag)] for v in self.unitary.ravel()]
        if self.label:
            out["label"] = self.label
        return out


def flip_block(control: int, flips: Sequence[int]) -> SynthGate:
    """X on every qubit in ``flips`` conditioned on ``control``."""
    flips = tuple(flips)
    U = np.array([[1.0]], dtype=complex)
    for _ in flips:
        U = np.kron(U, _X)
    return SynthGate("cblock", flips, (control,), "1", unitary=U, label="flip")


@dataclass(frozen=True, eq=False)
class SynthCircuit:
    n_qubits: int
    gates: tuple
    n_work: int
    ancillas: tuple = ()

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            if max(g.targets + g.controls) >= self.n_qubits:
                raise ValidationError(f"gate operand out of range in {g.to_text()}")
        object.__setattr__(self, "gates", gates)

    def counts(self) -> dict:
        c = Counter(g.kind for g in self.gates)
        return {k: c.get(k, 0) for k in KINDS}

    def primitive_count(self) -> int:
        return sum(g.primitive_count for g in self.gates)

    def toffoli_estimate(self) -> int:
        return sum(g.toffoli_estimate() if g.kind == "mcx" else g.primitive_count for g in self.gates)

    def to_text(self) -> str:
        return "\n".join(g.to_text() for g in self.gates)

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_work": self.n_work,
            "ancillas": list(self.ancillas),
            "gates": [g.to_json() for g in self.gates],
            "counts": self.counts(),
            "primitive_count": self.primitive_count(),
        }

    def __add__(self, other: "SynthCircuit") -> "SynthCircuit":
        n = max(self.n_qubits, other.n_qubits)
        return SynthCircuit(n, self.gates + other.gates, max(self.n_work, other.n_work),
                            tuple(sorted(set(self.ancillas) | set(other.ancillas))))


# --------------------------------------------------------------- simulator


def _apply(psi: np.ndarray, n: int, g: SynthGate) -> np.ndarray:
    T = psi.reshape((2,) * n)
    index = [slice(None)] * n
    for q, b in zip(g.controls, g.pattern):
        index[q] = int(b)
    index = tuple(index)
    sub = T[index]
    remaining = [q for q in range(n) if q not in g.controls]
    axes = [remaining.index(q) for q in g.targets]
    k = len(axes)
    moved = np.moveaxis(sub, axes, list(range(k)))
    shape = moved.shape
    out = (g.matrix() @ moved.reshape(2 ** k, -1)).reshape(shape)
    T[index] = np.moveaxis(out, list(range(k)), axes)
    return T.reshape(-1)


def simulate(sc: SynthCircuit, inp: str | None = None, cap: int = DEFAULT.state_cap) -> np.ndarray:
    """Exact statevector of ``sc`` applied to the basis state ``inp`` (default all zeros)."""
    n = sc.n_qubits
    if n > cap:
        raise SizeError(f"{n} qubits exceed the simulation cap {cap}")
    inp = "0" * n if inp is None else inp
    if len(inp) != n or any(b not in "01" for b in inp):
        raise InputError(f"input must be {n} bits")
    psi = np.zeros(2 ** n, dtype=complex)
    psi[int(inp, 2)] = 1.0
    for g in sc.gates:
        psi = _apply(psi.copy(), n, g)
    return psi


def ancilla_reduced(psi: np.ndarray, n: int, q: int) -> np.ndarray:
    """Reduced density matrix of qubit ``q``."""
    T = np.moveaxis(psi.reshape((2,) * n), q, 0).reshape(2, -1)
    return T @ T.conj().T


def work_register(psi: np.ndarray, n: int, ancillas: Sequence[int]) -> np.ndarray:
    """Workspace amplitudes with every ancilla projected on ``|0>``."""
    T = psi.reshape((2,) * n)
    index = tuple(0 if q in ancillas else slice(None) for q in range(n))
    return T[index].reshape(-1)


# ----------------------------------------------------------- Grover-Rudolph


def grover_rudolph_uniform(count: int, n: int, offset: int = 0) -> SynthCircuit:
    """Rotations preparing ``count^{-1/2} sum_{j<count} |bin_n(j)>`` on qubits ``offset..offset+n-1``."""
    if not 1 <= count <= 2 ** n:
        raise InputError(f"count={count} outside [1, 2^{n}]")
    k = int(np.ceil(np.log2(count))) if count > 1 else 0
    first = offset + n - k
    gates: list = []

    def node(prefix: str, total: int):
        depth = len(prefix)
        rem = k - depth
        ctrls = tuple(range(first, first + depth))
        if rem == 0:
            return
        if total == 2 ** rem:
            for q in range(first + depth, first + k):
                gates.append(SynthGate("ry", (q,), ctrls, prefix, theta=np.pi / 2))
            return
        left = min(total, 2 ** (rem - 1))
        right = total - left
        theta = 2 * np.arccos(np.sqrt(left / total))
        if right:
            gates.append(SynthGate("ry", (first + depth,), ctrls, prefix, theta=theta))
        node(prefix + "0", left)
        if right:
            node(prefix + "1", right)

    node("", count)
    return SynthCircuit(offset + n, tuple(gates), offset + n)


# ------------------------------------------------------------ permutations


@dataclass(frozen=True)
class PermutationPlan:
    cycles: tuple

    def mapping(self) -> dict:
        out = {}
        for cyc in self.cycles:
            for i, s in enumerate(cyc):
                out[s] = cyc[(i + 1) % len(cyc)]
        return out

    def apply(self, s: str) -> str:
        return self.mapping().get(s, s)


def plan_permutation(B: Sequence[str], C: Sequence[str]) -> PermutationPlan:
    """Disjoint cycles of a permutation sending ``sorted(B)[j]`` to ``C[j]``.

    Chains that leave ``B`` are closed back to their starting element, so the
    permutation is the identity outside ``B`` and ``C``.
    """
    B, C = list(B), list(C)
    if len(B) != len(C):
        raise InputError(f"|B|={len(B)} differs from |C|={len(C)}")
    if len(set(B)) != len(B) or len(set(C)) != len(C):
        raise InputError("duplicate strings")
    B = sorted(B)
    pi = {b: c for b, c in zip(B, C) if b != c}
    Cset = set(C)
    cycles, seen = [], set()
    # open chains start at elements of B that nothing maps to
    for b in B:
        if b in pi and b not in Cset and b not in seen:
            cyc = [b]
            seen.add(b)
            cur = pi[b]
            while cur in pi:
                cyc.append(cur)
                seen.add(cur)
                cur = pi[cur]
            cyc.append(cur)
            seen.add(cur)
            cycles.append(tuple(cyc))
    for b in B:
        if b in pi and b not in seen:
            cyc = [b]
            seen.add(b)
            cur = pi[b]
            while cur != b:
                cyc.append(cur)
                seen.add(cur)
                cur = pi[cur]
            cycles.append(tuple(cyc))
    return PermutationPlan(tuple(cycles))


def cycle_to_gates(cycle: Sequence[str], ancilla: int, offset: int = 0) -> list:
    """Gates realizing ``x_0 -> x_1 -> ... -> x_{l-1} -> x_0`` with one ancilla.

    Step ``i`` flags ``x_i`` on the ancilla and flips ``x_i xor x_{i+1}``
    under that flag; the next flag unsets it.  A final flag on ``x_0`` resets
    the ancilla for the element that wrapped around.
    """
    cycle = list(cycle)
    if len(cycle) < 2 or len(set(cycle)) != len(cycle):
        raise InputError("a cycle needs at least two distinct elements")
    n = len(cycle[0])
    work = tuple(range(offset, offset + n))
    gates = []
    for i, xi in enumerate(cycle):
        nxt = cycle[(i + 1) % len(cycle)]
        gates.append(SynthGate("mcx", (ancilla,), work, xi))
        flips = [offset + r for r in range(n) if xi[r] != nxt[r]]
        gates.append(flip_block(ancilla, flips))
    gates.append(SynthGate("mcx", (ancilla,), work, cycle[0]))
    return gates


def permutation_circuit(plan: PermutationPlan, n: int) -> SynthCircuit:
    gates = []
    for cyc in plan.cycles:
        gates += cycle_to_gates(cyc, ancilla=n)
    return SynthCircuit(n + 1, tuple(gates), n, (n,))


# --------------------------------------------------------------- synthesis

GATE_CONSTANT = 6


def synth_subset_state(C: SubsetState) -> SynthCircuit:
    """Grover-Rudolph tree on ``bin(0..|C|-1)`` followed by the permutation onto ``C``."""
    if C.amplitudes is not None and not np.allclose(C.amplitudes, C.alpha()[0]):
        raise UnsupportedError("only uniform subset states are synthesized")
    n, count = C.n, len(C.strings)
    gr = grover_rudolph_uniform(count, n)
    B = [format(j, f"0{n}b") for j in range(count)]
    perm = permutation_circuit(plan_permutation(B, C.strings), n)
    return SynthCircuit(n + 1, gr.gates + perm.gates, n, (n,))


def complete_unitary(V: np.ndarray) -> np.ndarray:
    """Unitary whose columns ``0`` and ``2^{m-1}`` are the columns of ``V``.

    Remaining columns come from modified Gram-Schmidt on the standard basis.
    """
    V = np.asarray(V, dtype=complex)
    d = V.shape[0]
    half = d // 2
    cols = [V[:, 0], V[:, 1]]
    for e in np.eye(d, dtype=complex):
        v = e.copy()
        for c in cols:
            v -= np.vdot(c, v) * c
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            cols.append(v / nrm)
        if len(cols) == d:
            break
    U = np.empty((d, d), dtype=complex)
    U[:, 0], U[:, half] = cols[0], cols[1]
    rest = iter(cols[2:])
    for j in range(d):
        if j not in (0, half):
            U[:, j] = next(rest)
    return U


def synth_scess(g: EncodedSubsetState) -> SynthCircuit:
    """Prepare the subset over padded strings ``x_j 0^{m_j-1}``, then each block unitary."""
    widths = g.widths
    padded = tuple("".join(b + "0" * (w - 1) for b, w in zip(x, widths)) for x in g.subset.strings)
    M = sum(widths)
    base = synth_subset_state(SubsetState(M, padded, g.subset.amplitudes))
    gates = list(base.gates)
    off = 0
    for V, w in zip(g.isometries, widths):
        if not (w == 1 and np.allclose(V, np.eye(2))):
            gates.append(SynthGate("unitary", tuple(range(off, off + w)), unitary=complete_unitary(V),
                                   label=f"V{off}"))
        off += w
    return SynthCircuit(M + 1, tuple(gates), M, (M,))


def unary_clock_angles(K: int) -> np.ndarray:
    """``theta_j`` with ``cos(theta_j / 2) = (K + 2 - j)^{-1/2}`` for ``j = 1..K``."""
    j = np.arange(1, K + 1)
    return 2 * np.arccos(np.sqrt(1.0 / (K + 2 - j)))


def unary_clock_circuit(K: int, offset: int = 0) -> SynthCircuit:
    """Uniform superposition of ``1^t 0^{K-t}`` on qubits ``offset..offset+K-1``."""
    th = unary_clock_angles(K)
    gates = [SynthGate("ry", (offset,), theta=th[0])]
    for j in range(1, K):
        gates.append(SynthGate("ry", (offset + j,), (offset + j - 1,), "1", theta=th[j]))
    return SynthCircuit(offset + K, tuple(gates), offset + K)


def synth_history(c: GateCircuit, enc: str | ClockEncoding = "unary") -> SynthCircuit:
    """Clock superposition, input bits, then each ``U_t`` controlled on clock qubit ``t``."""
    kind = enc.kind if isinstance(enc, ClockEncoding) else enc
    if kind != "unary":
        raise UnsupportedError("history-state circuits are built for the unary clock only")
    nw, K = c.n_work, c.K
    gates = list(unary_clock_circuit(K, offset=nw).gates)
    gates += [SynthGate("x", (j,)) for j, b in enumerate(c.x) if b == "1"]
    for t, g in enumerate(c.gates, start=1):
        gates.append(SynthGate("cblock", g.qubits, (nw + t - 1,), "1", unitary=g.matrix, label=f"U{t}"))
    return SynthCircuit(nw + K, tuple(gates), nw + K)


def literal_circuit(bits_strings: Sequence[str], suffix: Sequence[SynthGate]) -> SynthCircuit:
    """Uniform subset preparation followed by an explicit gate suffix."""
    n = len(bits_strings[0])
    base = synth_subset_state(SubsetState(n, tuple(bits_strings)))
    return SynthCircuit(n + 1, base.gates + tuple(suffix), n, (n,))


def hadamard(q: int) -> SynthGate:
    return SynthGate("unitary", (q,), unitary=np.array([[1, 1], [1, -1]]) / np.sqrt(2), label="H")


def cnot(control: int, target: int) -> SynthGate:
    return SynthGate("mcx", (target,), (control,), "1")


# ------------------------------------------------------------ verification


@dataclass(frozen=True)
class PrepReport:
    infidelity: float
    ancilla_purity: float
    ancilla_zero_prob: float
    primitive_count: int
    toffoli_estimate: int
    counts: dict
    constant: float


def verify_prep(sc: SynthCircuit, target: np.ndarray) -> PrepReport:
    psi = simulate(sc)
    purity, p0 = 1.0, 1.0
    work = psi
    if sc.ancillas:
        for q in sc.ancillas:
            rho = ancilla_reduced(psi, sc.n_qubits, q)
            purity = min(purity, float(np.real(np.trace(rho @ rho))))
            p0 = min(p0, float(np.real(rho[0, 0])))
        work = work_register(psi, sc.n_qubits, sc.ancillas)
    fid = float(abs(np.vdot(target, work)) ** 2)
    return PrepReport(
        infidelity=max(0.0, 1 - fid),
        ancilla_purity=purity,
        ancilla_zero_prob=p0,
        primitive_count=sc.primitive_count(),
        toffoli_estimate=sc.toffoli_estimate(),
        counts=sc.counts(),
        constant=float(GATE_CONSTANT),
    )


def circuit_to_json(sc: SynthCircuit) -> str:
    return json.dumps(sc.to_json(), sort_keys=True)
