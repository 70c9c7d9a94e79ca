"""Local Hamiltonians, state vectors and exact spectral oracles.

Qubit 0 is the most significant bit: the basis state ``|z>`` for a bit string
``z`` sits at index ``int(z, 2)``.  Terms are stored as small blocks on their
support and embedded on demand, either into a dense or sparse matrix or
applied matrix-free to a vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from glhbench.config import DEFAULT, Config
from glhbench.errors import (
    DegenerateInputError,
    InputError,
    SizeError,
    ValidationError,
)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PAULI_STACK = np.stack([PAULI[c] for c in "IXYZ"])


def _is_sparse(m) -> bool:
    return sp.issparse(m)


@dataclass(frozen=True)
class PauliString:
    """``coefficient * letters[0] (x) letters[1] (x) ...`` on ``len(letters)`` qubits."""

    coefficient: complex
    letters: str

    def __post_init__(self):
        if any(c not in PAULI for c in self.letters):
            raise ValidationError(f"invalid Pauli letters {self.letters!r}")
        if not np.isfinite(complex(self.coefficient)):
            raise ValidationError("Pauli coefficient must be finite")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for c in self.letters:
            out = np.kron(out, PAULI[c])
        return complex(self.coefficient) * out

    def embed(self, n: int, support: Sequence[int]) -> "PauliString":
        """Place the letters on ``support`` inside an ``n``-qubit string."""
        letters = ["I"] * n
        for q, c in zip(support, self.letters):
            letters[q] = c
        return PauliString(self.coefficient, "".join(letters))

    def to_term(self) -> "HermitianTerm":
        """Term on the non-identity positions (qubit 0 for the identity string)."""
        coeff = complex(self.coefficient)
        if abs(coeff.imag) > DEFAULT.hermitian_tol:
            raise ValidationError("Pauli string with complex coefficient is not Hermitian")
        support = tuple(i for i, c in enumerate(self.letters) if c != "I") or (0,)
        local = PauliString(coeff.real, "".join(self.letters[q] for q in support))
        return HermitianTerm(support, local.matrix())


class HermitianTerm:
    """A Hermitian block ``matrix`` acting on the ordered qubit ``support``.

    ``matrix`` may be a dense array or a scipy sparse matrix; sparse blocks
    are used for operators on wide registers such as exact clock projectors.
    """

    __slots__ = ("support", "matrix", "_norm")

    def __init__(self, support: Iterable[int], matrix, tol: float = DEFAULT.hermitian_tol):
        support = tuple(int(q) for q in support)
        if len(set(support)) != len(support):
            raise ValidationError(f"support has repeated qubits: {support}")
        if any(q < 0 for q in support):
            raise ValidationError(f"negative qubit index in {support}")
        dim = 2 ** len(support)
        if _is_sparse(matrix):
            matrix = sp.csr_matrix(matrix, dtype=complex)
            if matrix.shape != (dim, dim):
                raise ValidationError(f"matrix shape {matrix.shape} does not match support size {len(support)}")
            diff = matrix - matrix.conj().T
            err = abs(diff).max() if diff.nnz else 0.0
        else:
            matrix = np.array(matrix, dtype=complex)
            if matrix.shape != (dim, dim):
                raise ValidationError(f"matrix shape {matrix.shape} does not match support size {len(support)}")
            if not np.all(np.isfinite(matrix)):
                raise ValidationError("matrix entries must be finite")
            err = np.max(np.abs(matrix - matrix.conj().T)) if dim else 0.0
        if err > tol:
            raise ValidationError(f"term on {support} is not Hermitian (max deviation {err:.3e})")
        self.support = support
        self.matrix = matrix
        self._norm = None

    @property
    def size(self) -> int:
        return len(self.support)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if _is_sparse(self.matrix) else self.matrix

    def norm(self) -> float:
        """Spectral norm of the block."""
        if self._norm is None:
            m = self.matrix
            if _is_sparse(m) and m.shape[0] > 512:
                if m.nnz == 0:
                    self._norm = 0.0
                else:
                    vals = spla.eigsh(m, k=1, which="LM", return_eigenvectors=False)
                    self._norm = float(np.max(np.abs(vals)))
            else:
                vals = np.linalg.eigvalsh(self.dense()) if m.shape[0] else np.zeros(0)
                self._norm = float(np.max(np.abs(vals))) if vals.size else 0.0
        return self._norm

    def scaled(self, c: float) -> "HermitianTerm":
        return HermitianTerm(self.support, self.matrix * float(c))

    def __repr__(self) -> str:
        kind = "sparse" if _is_sparse(self.matrix) else "dense"
        return f"HermitianTerm(support={self.support}, {kind} {self.matrix.shape[0]}x{self.matrix.shape[0]})"


@dataclass(frozen=True, eq=False)
class LocalHamiltonian:
    """``H = sum_j h_j`` on ``n`` qubits with every ``|supp(h_j)| <= k``."""

    n: int
    terms: tuple
    k: int
    max_terms: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.n < 1:
            raise ValidationError("need at least one qubit")
        for t in self.terms:
            if not isinstance(t, HermitianTerm):
                raise ValidationError(f"expected HermitianTerm, got {type(t).__name__}")
            if max(t.support) >= self.n:
                raise ValidationError(f"term support {t.support} outside [0, {self.n})")
            if t.size > self.k:
                raise ValidationError(f"term support {t.support} exceeds locality k={self.k}")
        if self.max_terms is not None and len(self.terms) > self.max_terms:
            raise ValidationError(f"{len(self.terms)} terms exceed the bound {self.max_terms}")

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[HermitianTerm], k: int | None = None) -> "LocalHamiltonian":
        terms = tuple(terms)
        if k is None:
            k = max((t.size for t in terms), default=1)
        return cls(n, terms, k)

    @classmethod
    def from_paulis(cls, n: int, paulis: Iterable[PauliString]) -> "LocalHamiltonian":
        terms = []
        for p in paulis:
            if p.n != n:
                raise InputError(f"Pauli string {p.letters} is not on {n} qubits")
            terms.append(p.to_term())
        return cls.from_terms(n, terms)

    def scaled(self, c: float) -> "LocalHamiltonian":
        return LocalHamiltonian(self.n, tuple(t.scaled(c) for t in self.terms), self.k)

    def __add__(self, other: "LocalHamiltonian") -> "LocalHamiltonian":
        if self.n != other.n:
            raise InputError("qubit counts differ")
        return LocalHamiltonian(self.n, self.terms + other.terms, max(self.k, other.k))

    def shifted(self, c: float) -> "LocalHamiltonian":
        """``H + c I`` with the identity carried by a term on qubit 0."""
        return LocalHamiltonian(self.n, self.terms + (HermitianTerm((0,), c * np.eye(2)),), max(self.k, 1))

    def norm_bound(self) -> float:
        return float(sum(t.norm() for t in self.terms))


@dataclass(frozen=True, eq=False)
class SparseState:
    """Normalized state stored as sorted basis indices and amplitudes."""

    n: int
    indices: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        amp = np.asarray(self.amplitudes, dtype=complex)
        order = np.argsort(idx, kind="stable")
        idx, amp = idx[order], amp[order]
        if idx.size and (np.any(np.diff(idx) == 0) or idx[0] < 0 or idx[-1] >= 2 ** self.n):
            raise ValidationError("sparse state indices must be distinct and in range")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "amplitudes", amp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_dense(self) -> np.ndarray:
        if self.n > DEFAULT.state_cap:
            raise SizeError(f"{self.n} qubits exceed the dense state cap")
        out = np.zeros(2 ** self.n, dtype=complex)
        out[self.indices] = self.amplitudes
        return out


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues and orthonormal eigenvector columns.

    When ``basis`` is given the vectors live in the invariant subspace spanned
    by those full-space basis indices and ``complement_floor`` bounds every
    eigenvalue outside it from below.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    dim: int
    basis: np.ndarray | None = None
    complement_floor: float = np.inf
    degeneracy_tol: float = DEFAULT.degeneracy_tol

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gap(self) -> float:
        return _gap_from(self.eigenvalues, self.complement_floor, self.degeneracy_tol)

    def vector(self, j: int = 0) -> np.ndarray:
        v = self.eigenvectors[:, j]
        if self.basis is None:
            return v
        out = np.zeros(self.dim, dtype=complex)
        out[self.basis] = v
        return out

    def ground_projector(self) -> np.ndarray:
        lam = self.eigenvalues
        cols = np.flatnonzero(lam - lam[0] <= self.degeneracy_tol)
        vecs = np.column_stack([self.vector(j) for j in cols])
        return vecs @ vecs.conj().T


def _gap_from(eigs: np.ndarray, floor: float, tol: float) -> float:
    lam0 = float(eigs[0])
    second = float(eigs[1]) if eigs.size > 1 else np.inf
    second = min(second, floor)
    if not np.isfinite(second):
        return 0.0
    gap = second - lam0
    return 0.0 if gap <= tol else gap


# ---------------------------------------------------------------- embedding


@lru_cache(maxsize=256)
def _embed_index(n: int, support: tuple) -> np.ndarray:
    """``idx[a, r]``: full index with local state ``a`` on ``support`` and rest ``r``."""
    k = len(support)
    rest = [q for q in range(n) if q not in support]
    local = np.arange(2 ** k)
    rem = np.arange(2 ** (n - k))
    idx = np.zeros((2 ** k, 2 ** (n - k)), dtype=np.int64)
    for j, q in enumerate(support):
        bit = (local >> (k - 1 - j)) & 1
        idx += (bit << (n - 1 - q))[:, None]
    for j, q in enumerate(rest):
        bit = (rem >> (n - k - 1 - j)) & 1
        idx += (bit << (n - 1 - q))[None, :]
    idx.setflags(write=False)
    return idx


def _check_cap(n: int, cfg: Config) -> None:
    if n > cfg.qubit_cap:
        raise SizeError(f"{n} qubits exceed the configured cap {cfg.qubit_cap}")


def assemble(H: LocalHamiltonian, sparse: bool | None = None, cfg: Config = DEFAULT):
    """Full ``2^n x 2^n`` matrix of ``H``; sparse above the dense cap unless forced."""
    _check_cap(H.n, cfg)
    if sparse is None:
        sparse = H.n > cfg.dense_cap
    if not sparse and H.n > cfg.dense_cap:
        raise SizeError(f"{H.n} qubits exceed the dense-matrix cap {cfg.dense_cap}")
    D = 2 ** H.n
    rows, cols, vals = [], [], []
    for t in H.terms:
        idx = _embed_index(H.n, t.support)
        m = sp.coo_matrix(t.matrix)
        if m.nnz == 0:
            continue
        rows.append(idx[m.row].ravel())
        cols.append(idx[m.col].ravel())
        vals.append(np.repeat(m.data, idx.shape[1]))
    if rows:
        mat = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(D, D)
        ).tocsr()
    else:
        mat = sp.csr_matrix((D, D), dtype=complex)
    mat.sum_duplicates()
    if sparse:
        return mat
    return mat.toarray()


def apply(H: LocalHamiltonian, vec: np.ndarray) -> np.ndarray:
    """Matrix-free product ``H @ vec``."""
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (2 ** H.n,):
        raise InputError(f"vector of shape {vec.shape} does not match {H.n} qubits")
    out = np.zeros_like(vec)
    for t in H.terms:
        idx = _embed_index(H.n, t.support)
        out[idx] += t.matrix @ vec[idx]
    return out


def as_linear_operator(H: LocalHamiltonian) -> spla.LinearOperator:
    D = 2 ** H.n
    return spla.LinearOperator((D, D), matvec=lambda v: apply(H, np.ravel(v)), dtype=complex)


def row(H: LocalHamiltonian, z: int) -> dict:
    """Nonzero entries ``{w: <w|H|z>}`` of column ``z``, read off the term list."""
    out: dict = {}
    for t in H.terms:
        idx = _embed_index(H.n, t.support)
        k = t.size
        a = 0
        for j, q in enumerate(t.support):
            a |= ((z >> (H.n - 1 - q)) & 1) << (k - 1 - j)
        base = z - int(idx[a, 0])
        col = t.matrix[:, a]
        if _is_sparse(col):
            col = col.tocoo()
            pairs = zip(col.row, col.data)
        else:
            nz = np.flatnonzero(col)
            pairs = zip(nz, col[nz])
        for b, v in pairs:
            w = base + int(idx[b, 0])
            out[w] = out.get(w, 0.0) + v
    return out


# ----------------------------------------------------------------- spectra


def spectrum(H: LocalHamiltonian, num: int | None = None, cfg: Config = DEFAULT) -> Spectrum:
    """Eigenpairs of ``H``: full dense spectrum, or the lowest ``num`` via Lanczos."""
    _check_cap(H.n, cfg)
    D = 2 ** H.n
    if H.n <= cfg.dense_cap and num is None:
        M = assemble(H, sparse=False, cfg=cfg)
        if np.max(np.abs(M - M.conj().T), initial=0.0) > cfg.hermitian_tol:
            raise ValidationError("assembled matrix is not Hermitian")
        w, v = np.linalg.eigh(M)
        return Spectrum(w, v, D)
    num = 2 if num is None else num
    if D <= 2 * num + 2:
        M = assemble(H, sparse=False, cfg=cfg)
        w, v = np.linalg.eigh(M)
        return Spectrum(w[:num], v[:, :num], D)
    M = assemble(H, sparse=True, cfg=cfg)
    w, v = spla.eigsh(M, k=num, which="SA", tol=1e-12)
    order = np.argsort(w)
    return Spectrum(w[order], v[:, order], D)


def ground(H: LocalHamiltonian, cfg: Config = DEFAULT) -> tuple[float, np.ndarray]:
    """Ground energy and a ground state, phase fixed so the largest entry is real positive."""
    spec = spectrum(H, num=None if H.n <= cfg.dense_cap else 2, cfg=cfg)
    g = fix_phase(spec.vector(0))
    return spec.ground_energy, g


def spectral_gap(H: LocalHamiltonian, cfg: Config = DEFAULT) -> float:
    """``lambda_1 - lambda_0``; zero when the ground space is degenerate within tolerance."""
    spec = spectrum(H, num=None if H.n <= cfg.dense_cap else 2, cfg=cfg)
    if spec.eigenvalues.size < 2:
        return 0.0
    return _gap_from(spec.eigenvalues, np.inf, cfg.degeneracy_tol)


def operator_norm(H: LocalHamiltonian, cfg: Config = DEFAULT) -> tuple[float, float]:
    """Exact spectral norm and the cheap bound ``sum_j ||h_j||``."""
    bound = H.norm_bound()
    if not H.terms:
        return 0.0, 0.0
    if H.n <= cfg.dense_cap:
        w = np.linalg.eigvalsh(assemble(H, sparse=False, cfg=cfg))
        exact = float(max(abs(w[0]), abs(w[-1])))
    else:
        _check_cap(H.n, cfg)
        M = assemble(H, sparse=True, cfg=cfg)
        lo = spla.eigsh(M, k=1, which="SA", return_eigenvectors=False, tol=1e-12)[0]
        hi = spla.eigsh(M, k=1, which="LA", return_eigenvectors=False, tol=1e-12)[0]
        exact = float(max(abs(lo), abs(hi)))
    return exact, bound


def rescale_unit(H: LocalHamiltonian, norm: float | None = None, cfg: Config = DEFAULT):
    """Return ``(H / factor, factor)`` with ``factor = ||H||`` so the result has unit norm."""
    factor = operator_norm(H, cfg)[0] if norm is None else float(norm)
    if factor <= cfg.norm_tol:
        raise DegenerateInputError("cannot rescale the zero operator")
    return H.scaled(1.0 / factor), factor


def eigen_residual(H: LocalHamiltonian, lam: float, v: np.ndarray) -> float:
    return float(np.linalg.norm(apply(H, v) - lam * v))


# ----------------------------------------------------------------- Paulis


def pauli_decompose(term: HermitianTerm, tol: float = 1e-14) -> list[PauliString]:
    """Pauli expansion of a term block, letters ordered like ``term.support``."""
    k = term.size
    if k > 8:
        raise SizeError(f"Pauli decomposition limited to 8 qubits, got {k}")
    T = term.dense().reshape((2,) * (2 * k))
    # c_P = tr(P M) / 2^k with P[b, a] = prod_j P_j[b_j, a_j]
    operands = [T, list(range(2 * k))]
    for j in range(k):
        operands += [_PAULI_STACK, [2 * k + j, k + j, j]]
    T = np.einsum(*operands, list(range(2 * k, 3 * k)), optimize=True)
    coeffs = np.asarray(T).reshape(-1) / 2 ** k
    out = []
    for flat, c in enumerate(coeffs):
        if abs(c) <= tol:
            continue
        letters = "".join("IXYZ"[d] for d in np.unravel_index(flat, (4,) * k)) if k else ""
        c = complex(c)
        out.append(PauliString(c.real if abs(c.imag) < 1e-15 else c, letters))
    return out


def pauli_sum_matrix(paulis: Sequence[PauliString], k: int) -> np.ndarray:
    out = np.zeros((2 ** k, 2 ** k), dtype=complex)
    for p in paulis:
        out += p.matrix()
    return out


# ----------------------------------------------------------------- states


def normalize(vec: np.ndarray, tol: float = DEFAULT.norm_tol) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    nrm = np.linalg.norm(vec)
    if nrm <= tol:
        raise ValidationError("cannot normalize a zero vector")
    return vec / nrm


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    j = int(np.argmax(np.abs(vec)))
    if vec[j] == 0:
        return vec
    return vec * (abs(vec[j]) / vec[j])


def basis_state(bits: str) -> np.ndarray:
    out = np.zeros(2 ** len(bits), dtype=complex)
    out[int(bits, 2) if bits else 0] = 1.0
    return out


def check_normalized(vec, tol: float = DEFAULT.norm_tol) -> None:
    nrm = vec.norm() if isinstance(vec, SparseState) else np.linalg.norm(vec)
    if abs(nrm - 1.0) > tol:
        raise ValidationError(f"state is not normalized (norm {nrm:.12f})")


def overlap(a, b) -> complex:
    """``<a|b>`` for dense arrays or :class:`SparseState` objects."""
    if isinstance(a, SparseState) and isinstance(b, SparseState):
        if a.n != b.n:
            raise InputError("dimension mismatch")
        common, ia, ib = np.intersect1d(a.indices, b.indices, return_indices=True)
        return complex(np.vdot(a.amplitudes[ia], b.amplitudes[ib]))
    if isinstance(a, SparseState):
        b = np.asarray(b)
        if b.shape != (2 ** a.n,):
            raise InputError("dimension mismatch")
        return complex(np.vdot(a.amplitudes, b[a.indices]))
    if isinstance(b, SparseState):
        return np.conj(overlap(b, a))
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def fidelity(a, b) -> float:
    """``|<a|b>|^2``."""
    return float(min(1.0, abs(overlap(a, b)) ** 2))


# ----------------------------------------------------------------- audits


def kron_embed(n: int, support: Sequence[int], block: np.ndarray) -> np.ndarray:
    """Brute-force embedding via a qubit permutation of ``block (x) I``."""
    k = len(support)
    rest = [q for q in range(n) if q not in support]
    full = np.kron(block, np.eye(2 ** (n - k)))
    order = list(support) + rest
    T = full.reshape((2,) * (2 * n))
    inv = np.argsort(order)
    T = T.transpose(list(inv) + [n + i for i in inv])
    return T.reshape(2 ** n, 2 ** n)


def locality_audit(H: LocalHamiltonian, tol: float = 1e-12) -> float:
    """Largest deviation of a term from ``Tr_rest(h)/d_rest (x) I_rest`` re-embedded."""
    worst = 0.0
    for t in H.terms:
        full = kron_embed(H.n, t.support, t.dense())
        k = t.size
        rest = [q for q in range(H.n) if q not in t.support]
        order = list(t.support) + rest
        T = full.reshape((2,) * (2 * H.n)).transpose(order + [H.n + q for q in order])
        T = T.reshape(2 ** k, 2 ** (H.n - k), 2 ** k, 2 ** (H.n - k))
        reduced = np.einsum("arbr->ab", T) / 2 ** (H.n - k)
        worst = max(worst, float(np.max(np.abs(kron_embed(H.n, t.support, reduced) - full))))
    return worst


# ----------------------------------------------------------------- random


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (A + A.conj().T) / 2


def random_local_hamiltonian(n: int, k: int, n_terms: int, rng: np.random.Generator) -> LocalHamiltonian:
    terms = []
    for _ in range(n_terms):
        support = tuple(sorted(rng.choice(n, size=min(k, n), replace=False).tolist()))
        terms.append(HermitianTerm(support, random_hermitian(2 ** len(support), rng, 1 / np.sqrt(2 ** len(support)))))
    return LocalHamiltonian.from_terms(n, terms, k=min(k, n))


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    return normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))


# ----------------------------------------------------------------- JSON


def _matrix_to_json(m) -> dict | list:
    if _is_sparse(m):
        c = sp.coo_matrix(m)
        return {
            "dim": int(m.shape[0]),
            "rows": c.row.tolist(),
            "cols": c.col.tolist(),
            "values": [[float(v.real), float(v.imag)] for v in c.data],
        }
    return [[float(v.real), float(v.imag)] for v in np.asarray(m).ravel()]


def _matrix_from_json(obj, dim: int):
    if isinstance(obj, dict):
        vals = np.array([complex(re, im) for re, im in obj["values"]], dtype=complex)
        return sp.csr_matrix((vals, (obj["rows"], obj["cols"])), shape=(obj["dim"], obj["dim"]))
    flat = np.array([complex(re, im) for re, im in obj], dtype=complex)
    if flat.size != dim * dim:
        raise InputError(f"matrix has {flat.size} entries, expected {dim * dim}")
    return flat.reshape(dim, dim)


def hamiltonian_to_json(H: LocalHamiltonian) -> dict:
    return {
        "n": H.n,
        "k": H.k,
        "terms": [{"support": list(t.support), "matrix": _matrix_to_json(t.matrix)} for t in H.terms],
    }


def hamiltonian_from_json(obj: dict) -> LocalHamiltonian:
    try:
        n, k = int(obj["n"]), int(obj["k"])
        terms = [
            HermitianTerm(t["support"], _matrix_from_json(t["matrix"], 2 ** len(t["support"])))
            for t in obj["terms"]
        ]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed Hamiltonian JSON: {exc}") from exc
    return LocalHamiltonian(n, tuple(terms), k)


def all_bitstrings(n: int) -> list[str]:
    return ["".join(b) for b in product("01", repeat=n)]
