"""Fermionic Gaussian states through Majorana covariance matrices.

Majorana operators follow ``c_{2j} = Z_0...Z_{j-1} X_j`` and
``c_{2j+1} = Z_0...Z_{j-1} Y_j`` (modes are qubits, 0-indexed), i.e.
``c_{2j} = a_j + a_j^dag`` and ``c_{2j+1} = -i(a_j - a_j^dag)`` with ``|0>``
the empty mode.  They square to one and anticommute, so ``{c_k, c_l} = 2 delta_kl``.
The covariance is ``M_kl = -i <c_k c_l>`` for ``k != l``; the vacuum has
``M_{2j,2j+1} = <Z_j> = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from glhbench.config import DEFAULT
from glhbench.errors import InputError, SizeError, ValidationError
from glhbench.operator_core import (
    PAULI,
    LocalHamiltonian,
    PauliString,
    fix_phase,
    pauli_decompose,
)


@dataclass(frozen=True)
class MajoranaMonomial:
    """``coefficient * c_{i_1} c_{i_2} ...`` with strictly increasing indices."""

    indices: tuple
    coefficient: complex = 1.0

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValidationError(f"Majorana indices must strictly increase: {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def degree(self) -> int:
        return len(self.indices)


def _check_antisym(A: np.ndarray, tol: float = DEFAULT.antisym_tol) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("expected a square matrix")
    if A.size and np.max(np.abs(A + A.T)) > tol:
        raise ValidationError("matrix is not antisymmetric")
    return A


def _check_orthogonal(R: np.ndarray, tol: float = DEFAULT.antisym_tol) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValidationError("rotation must be square")
    if np.max(np.abs(R.T @ R - np.eye(R.shape[0]))) > tol:
        raise ValidationError("rotation is not orthogonal")
    return R


def vacuum_covariance(n: int) -> np.ndarray:
    """Covariance of ``|0^n>``: ``n`` copies of ``[[0, 1], [-1, 0]]``."""
    if n < 1:
        raise InputError("need at least one mode")
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def is_pure(M: np.ndarray, tol: float = DEFAULT.purity_tol) -> bool:
    M = np.asarray(M, dtype=float)
    return bool(np.max(np.abs(M.T @ M - np.eye(M.shape[0]))) <= tol)


def evolve(M: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Covariance after a Gaussian unitary ``V`` with ``V^dag c V = R c``."""
    M = _check_antisym(M)
    R = _check_orthogonal(R)
    if R.shape != M.shape:
        raise InputError(f"rotation {R.shape} does not match covariance {M.shape}")
    out = R @ M @ R.T
    return (out - out.T) / 2


def random_orthogonal(dim: int, rng: np.random.Generator, special: bool = True) -> np.ndarray:
    """Haar-random orthogonal matrix via QR with sign correction."""
    Q, Rr = np.linalg.qr(rng.normal(size=(dim, dim)))
    Q = Q * np.sign(np.diag(Rr))
    if special and np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def givens_rotation(dim: int, p: int, q: int, theta: float) -> np.ndarray:
    R = np.eye(dim)
    c, s = np.cos(theta), np.sin(theta)
    R[p, p] = R[q, q] = c
    R[p, q], R[q, p] = -s, s
    return R


def matchgate_gate_count(n: int) -> int:
    """Givens rotations needed for a generic ``SO(2n)`` element, ``n(2n-1)``."""
    return n * (2 * n - 1)


# -------------------------------------------------------------- Pfaffian


def pfaffian(A: np.ndarray) -> float:
    """Pfaffian by Parlett-Reid elimination with partial pivoting."""
    A = _check_antisym(A).copy()
    n = A.shape[0]
    if n % 2:
        raise InputError("Pfaffian needs an even dimension")
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1:, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0.0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2:] / A[k, k + 1]
            col = A[k + 2:, k + 1].copy()
            A[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


# ---------------------------------------------------------- Jordan-Wigner

_PAULI_MUL = {}
for _a in "IXYZ":
    for _b in "IXYZ":
        prod = PAULI[_a] @ PAULI[_b]
        for _c in "IXYZ":
            ph = np.trace(PAULI[_c].conj().T @ prod) / 2
            if abs(ph) > 0.5:
                _PAULI_MUL[(_a, _b)] = (complex(np.round(ph)), _c)


def _mono_mul(a: tuple, b: tuple) -> tuple[int, tuple]:
    """Canonical form of ``c_a c_b``: sign and sorted index tuple with pairs cancelled."""
    seq = list(a) + list(b)
    sign = 1
    # insertion sort counting transpositions of distinct operators
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
    out = []
    for s in seq:
        if out and out[-1] == s:
            out.pop()
        else:
            out.append(s)
    return sign, tuple(out)


def _site_majorana(j: int, letter: str) -> tuple[complex, tuple]:
    """Single-site Pauli on qubit ``j`` as ``coeff * c_S``."""
    if letter == "I":
        return 1.0, ()
    if letter == "Z":
        return -1j, (2 * j, 2 * j + 1)
    # string Z_0...Z_{j-1} = prod_i (-i c_{2i} c_{2i+1}) = (-i)^j c_0 c_1 ... c_{2j-1}
    coeff = (-1j) ** j
    tail = 2 * j if letter == "X" else 2 * j + 1
    return coeff, tuple(range(2 * j)) + (tail,)


def jordan_wigner(p: PauliString) -> MajoranaMonomial:
    """Exact Majorana form of a Pauli string (always a single monomial)."""
    coeff = complex(p.coefficient)
    idx: tuple = ()
    for j, letter in enumerate(p.letters):
        c, mono = _site_majorana(j, letter)
        sign, idx = _mono_mul(idx, mono)
        coeff *= c * sign
    return MajoranaMonomial(idx, coeff)


def majorana_to_pauli(indices: Sequence[int], n: int) -> PauliString:
    """Pauli string equal to ``c_{i_1} c_{i_2} ...`` on ``n`` qubits."""
    phase = 1 + 0j
    letters = ["I"] * n
    for i in indices:
        j, odd = divmod(int(i), 2)
        if j >= n:
            raise InputError(f"Majorana index {i} outside {n} modes")
        factor = ["Z"] * j + ["Y" if odd else "X"] + ["I"] * (n - j - 1)
        for q in range(n):
            ph, letters[q] = _PAULI_MUL[(letters[q], factor[q])]
            phase *= ph
    return PauliString(phase, "".join(letters))


def majorana_matrices(n: int) -> list[np.ndarray]:
    """Dense ``c_0 ... c_{2n-1}`` built from Kronecker products."""
    out = []
    for j in range(n):
        for letter in "XY":
            m = np.array([[1.0 + 0j]])
            for q in range(n):
                m = np.kron(m, PAULI["Z"] if q < j else PAULI[letter] if q == j else PAULI["I"])
            out.append(m)
    return out


# ------------------------------------------------------------ expectations


def expectation_monomial(M: np.ndarray, mono: MajoranaMonomial) -> complex:
    """Wick contraction ``<c_S> = i^m Pf(M_S)`` for ``|S| = 2m``; odd monomials give 0."""
    S = list(mono.indices)
    if len(S) % 2:
        return 0j
    if not S:
        return complex(mono.coefficient)
    sub = M[np.ix_(S, S)]
    return complex(mono.coefficient * (1j ** (len(S) // 2)) * pfaffian(sub))


def expectation_pauli(M: np.ndarray, p: PauliString) -> complex:
    M = _check_antisym(M)
    if 2 * p.n != M.shape[0]:
        raise InputError(f"Pauli string on {p.n} qubits vs {M.shape[0] // 2} modes")
    return expectation_monomial(M, jordan_wigner(p))


def gaussian_energy(M: np.ndarray, H: LocalHamiltonian) -> float:
    """``<phi|H|phi>`` summed term by term over Pauli expansions."""
    M = _check_antisym(M)
    if 2 * H.n != M.shape[0]:
        raise InputError(f"Hamiltonian on {H.n} qubits vs {M.shape[0] // 2} modes")
    total = 0j
    for t in H.terms:
        for p in pauli_decompose(t):
            total += expectation_pauli(M, p.embed(H.n, t.support))
    return float(total.real)


# --------------------------------------------------- quadratic Hamiltonians


@dataclass(frozen=True)
class GroundCovariance:
    covariance: np.ndarray
    energies: np.ndarray       # excitation energies 2|eps_k|, ascending
    ground_energy: float
    zero_modes: int
    rotation: np.ndarray


def quadratic_energy(M: np.ndarray, h: np.ndarray) -> float:
    """``<(i/2) sum h_jk c_j c_k> = tr(h M) / 2``."""
    return float(0.5 * np.trace(h @ M))


def ground_covariance(h: np.ndarray, tol: float = 1e-10) -> GroundCovariance:
    """Ground covariance of ``H = (i/2) sum_jk h_jk c_j c_k`` via real Schur form.

    ``h = O (+)_k [[0, e_k], [-e_k, 0]] O^T`` with ``e_k >= 0`` gives
    ``H = -sum_k e_k Z'_k`` in rotated modes, so the ground state fills every
    rotated mode's vacuum and costs ``2 e_k`` to excite mode ``k``.
    """
    h = _check_antisym(h)
    dim = h.shape[0]
    if dim % 2:
        raise InputError("coefficient matrix must have even dimension")
    T, Z = linalg.schur(h, output="real")
    order, eps, zeros = [], [], []
    i = 0
    while i < dim:
        if i + 1 < dim and abs(T[i + 1, i]) > tol:
            t = T[i, i + 1]
            order += [i, i + 1] if t >= 0 else [i + 1, i]
            eps.append(abs(t))
            i += 2
        else:
            zeros.append(i)
            i += 1
    for a, b in zip(zeros[::2], zeros[1::2]):
        order += [a, b]
        eps.append(0.0)
    O = Z[:, order]
    M = O @ vacuum_covariance(dim // 2) @ O.T
    M = (M - M.T) / 2
    eps = np.asarray(eps)
    energies = np.sort(2 * eps)
    return GroundCovariance(
        covariance=M,
        energies=energies,
        ground_energy=float(-eps.sum()),
        zero_modes=int(np.sum(eps <= tol)),
        rotation=O,
    )


def quadratic_to_local(h: np.ndarray, tol: float = 1e-15) -> LocalHamiltonian:
    """``(i/2) sum h_jk c_j c_k`` as Pauli terms on ``n`` qubits."""
    h = _check_antisym(h)
    n = h.shape[0] // 2
    paulis = []
    for j in range(2 * n):
        for k in range(j + 1, 2 * n):
            if abs(h[j, k]) <= tol:
                continue
            p = majorana_to_pauli((j, k), n)
            # (i/2)(h_jk c_j c_k + h_kj c_k c_j) = i h_jk c_j c_k
            paulis.append(PauliString(complex(1j * h[j, k] * p.coefficient).real, p.letters))
    if not paulis:
        paulis = [PauliString(0.0, "I" * n)]
    return LocalHamiltonian.from_paulis(n, paulis)


def quadratic_dense(h: np.ndarray) -> np.ndarray:
    cs = majorana_matrices(h.shape[0] // 2)
    out = np.zeros_like(cs[0])
    for j in range(len(cs)):
        for k in range(len(cs)):
            if h[j, k]:
                out += 0.5j * h[j, k] * cs[j] @ cs[k]
    return out


def gaussian_statevector(M: np.ndarray, cap: int = 12) -> np.ndarray:
    """Dense state with covariance ``M``: ground state of ``(i/4) sum M_jk c_j c_k``."""
    M = _check_antisym(M)
    n = M.shape[0] // 2
    if n > cap:
        raise SizeError(f"{n} modes exceed the dense Gaussian cap {cap}")
    if not is_pure(M):
        raise ValidationError("covariance is not pure")
    w, v = np.linalg.eigh(quadratic_dense(M / 2))
    return fix_phase(v[:, 0])


def dense_covariance(psi: np.ndarray) -> np.ndarray:
    """``M_kl = -i <psi|c_k c_l|psi>`` off the diagonal, from a dense state."""
    n = int(round(np.log2(psi.size)))
    cs = majorana_matrices(n)
    M = np.zeros((2 * n, 2 * n))
    for k in range(2 * n):
        for l in range(2 * n):
            if k != l:
                M[k, l] = float(np.real(-1j * np.vdot(psi, cs[k] @ cs[l] @ psi)))
    return M


def covariance_to_json(M: np.ndarray) -> dict:
    return {"covariance": np.asarray(M, dtype=float).tolist()}


def covariance_from_json(obj: dict) -> np.ndarray:
    try:
        return _check_antisym(np.array(obj["covariance"], dtype=float))
    except KeyError as exc:
        raise InputError("missing 'covariance' field") from exc
