"""Guiding-state families with query access, sequential sampling and size accounting.

Every family realizes to a normalized dense vector at desk scale, answers
amplitude queries without building that vector, and samples bit strings one
bit at a time from prefix marginals.  Bit strings are ASCII ``'0'/'1'`` with
qubit 0 first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import singledispatch
from math import comb
from typing import Sequence

import numpy as np
from scipy import stats

from glhbench.config import DEFAULT, Config
from glhbench.errors import InputError, SizeError, ValidationError
from glhbench.operator_core import fidelity, normalize

HEADER_BITS = 64
COMPLEX_BITS = 128
REAL_BITS = 64


def _check_bits(s: str, n: int | None = None) -> str:
    if not isinstance(s, str) or any(c not in "01" for c in s):
        raise InputError(f"not a bit string: {s!r}")
    if n is not None and len(s) != n:
        raise InputError(f"bit string {s!r} has length {len(s)}, expected {n}")
    return s


def _check_isometry(V: np.ndarray, cfg: Config) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2 or V.shape[1] != 2:
        raise ValidationError(f"isometry must have two columns, got shape {V.shape}")
    m = int(round(np.log2(V.shape[0])))
    if 2 ** m != V.shape[0] or m < 1:
        raise ValidationError(f"isometry output dimension {V.shape[0]} is not a power of two")
    if m > cfg.isometry_max_qubits:
        raise SizeError(f"isometry on {m} qubits exceeds m_max={cfg.isometry_max_qubits}")
    if np.max(np.abs(V.conj().T @ V - np.eye(2))) > cfg.unitary_tol:
        raise ValidationError("V^dagger V differs from the identity")
    return V


class GuidingState:
    """Marker base class for all guiding-state descriptions."""

    @property
    def n_out(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class SubsetState(GuidingState):
    """``sum_{x in C} alpha_x |x>``, uniform when ``amplitudes`` is None."""

    n: int
    strings: tuple
    amplitudes: np.ndarray | None = None
    cap: int = DEFAULT.subset_cap

    def __post_init__(self):
        strings = tuple(_check_bits(s, self.n) for s in self.strings)
        if not strings:
            raise ValidationError("subset must be nonempty")
        if len(set(strings)) != len(strings):
            raise ValidationError("subset strings must be distinct")
        if len(strings) > self.cap:
            raise SizeError(f"|C|={len(strings)} exceeds the set-size cap {self.cap}")
        object.__setattr__(self, "strings", strings)
        if self.amplitudes is not None:
            amp = np.asarray(self.amplitudes, dtype=complex)
            if amp.shape != (len(strings),):
                raise ValidationError("amplitudes must align with strings")
            if abs(np.linalg.norm(amp) - 1.0) > DEFAULT.norm_tol:
                raise ValidationError("subset amplitudes are not normalized")
            object.__setattr__(self, "amplitudes", amp)

    @property
    def n_out(self) -> int:
        return self.n

    def alpha(self) -> np.ndarray:
        if self.amplitudes is None:
            return np.full(len(self.strings), 1 / np.sqrt(len(self.strings)), dtype=complex)
        return self.amplitudes


@dataclass(frozen=True, eq=False)
class EncodedSubsetState(GuidingState):
    """Subset state with a shared isometry ``V_j`` applied to every position ``j``."""

    subset: SubsetState
    isometries: tuple

    def __post_init__(self):
        isos = tuple(_check_isometry(V, DEFAULT) for V in self.isometries)
        if len(isos) != self.subset.n:
            raise ValidationError(f"need {self.subset.n} isometries, got {len(isos)}")
        object.__setattr__(self, "isometries", isos)

    @property
    def widths(self) -> tuple:
        return tuple(int(np.log2(V.shape[0])) for V in self.isometries)

    @property
    def n_out(self) -> int:
        return sum(self.widths)


@dataclass(frozen=True, eq=False)
class AdvancedEncodedSubsetState(GuidingState):
    """Subset state whose isometries ``V_{x,j}`` depend on the element ``x``.

    ``isometries[i][j]`` belongs to ``subset.strings[i]``; output widths agree
    across elements.  The superposition is renormalized since images of
    different elements need not be orthogonal.
    """

    subset: SubsetState
    isometries: tuple

    def __post_init__(self):
        rows = tuple(tuple(_check_isometry(V, DEFAULT) for V in row) for row in self.isometries)
        if len(rows) != len(self.subset.strings):
            raise ValidationError("need one isometry list per subset element")
        widths = None
        for row in rows:
            if len(row) != self.subset.n:
                raise ValidationError("each element needs one isometry per position")
            w = tuple(V.shape[0] for V in row)
            if widths is not None and w != widths:
                raise ValidationError("isometry output sizes must agree across elements")
            widths = w
        object.__setattr__(self, "isometries", rows)

    @property
    def widths(self) -> tuple:
        return tuple(int(np.log2(V.shape[0])) for V in self.isometries[0])

    @property
    def n_out(self) -> int:
        return sum(self.widths)


@dataclass(frozen=True, eq=False)
class FixedWeightState(GuidingState):
    """Superposition inside the Hamming-weight-``k`` sector.

    ``strings=None`` means the uniform state over the whole sector.
    """

    n: int
    k: int
    strings: tuple | None = None
    amplitudes: np.ndarray | None = None

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValidationError(f"weight {self.k} outside [0, {self.n}]")
        if self.strings is not None:
            sub = SubsetState(self.n, tuple(self.strings), self.amplitudes)
            bad = [s for s in sub.strings if s.count("1") != self.k]
            if bad:
                raise ValidationError(f"strings {bad[:3]} do not have weight {self.k}")
            object.__setattr__(self, "strings", sub.strings)
            object.__setattr__(self, "amplitudes", sub.amplitudes)
        elif self.amplitudes is not None:
            raise ValidationError("amplitudes require explicit strings")

    @property
    def n_out(self) -> int:
        return self.n

    def as_subset(self) -> SubsetState | None:
        if self.strings is None:
            return None
        return SubsetState(self.n, self.strings, self.amplitudes)


@dataclass(frozen=True, eq=False)
class WindowedWeightState(GuidingState):
    """Uniform superposition over the union of the weight sectors in ``weights``."""

    n: int
    weights: tuple
    cap: int = 1 << 20

    def __post_init__(self):
        w = tuple(int(k) for k in self.weights)
        if not w or any(b <= a for a, b in zip(w, w[1:])) or w[0] < 0 or w[-1] > self.n:
            raise ValidationError(f"weights {w} must strictly increase inside [0, {self.n}]")
        if self.support_size > self.cap:
            raise SizeError(f"support size {self.support_size} exceeds {self.cap}")
        object.__setattr__(self, "weights", w)

    @property
    def support_size(self) -> int:
        return sum(comb(self.n, int(k)) for k in self.weights)

    @property
    def n_out(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class MPSState(GuidingState):
    """Trace-closed MPS; ``tensors[j]`` has shape ``(d, chi_left, chi_right)``."""

    tensors: tuple
    bond_cap: int = DEFAULT.bond_cap

    def __post_init__(self):
        ts = tuple(np.asarray(A, dtype=complex) for A in self.tensors)
        if not ts:
            raise ValidationError("MPS needs at least one site")
        d = ts[0].shape[0]
        for j, A in enumerate(ts):
            if A.ndim != 3 or A.shape[0] != d:
                raise ValidationError(f"site {j} tensor has shape {A.shape}")
            if A.shape[2] != ts[(j + 1) % len(ts)].shape[1]:
                raise ValidationError(f"bond mismatch between sites {j} and {j + 1}")
            if max(A.shape[1:]) > self.bond_cap:
                raise SizeError(f"bond dimension {max(A.shape[1:])} exceeds cap {self.bond_cap}")
            if not np.all(np.isfinite(A)):
                raise ValidationError("MPS entries must be finite")
        object.__setattr__(self, "tensors", ts)

    @property
    def n(self) -> int:
        return len(self.tensors)

    @property
    def d(self) -> int:
        return self.tensors[0].shape[0]

    @property
    def chi(self) -> int:
        return max(max(A.shape[1:]) for A in self.tensors)

    @property
    def n_out(self) -> int:
        if self.d != 2:
            raise InputError("bit-string access needs physical dimension 2")
        return self.n


@dataclass(frozen=True, eq=False)
class GaussianState(GuidingState):
    """Pure fermionic Gaussian state given by its Majorana covariance matrix."""

    covariance: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.covariance, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise ValidationError("covariance must be a square even-dimensional matrix")
        if np.max(np.abs(M + M.T)) > DEFAULT.antisym_tol:
            raise ValidationError("covariance must be antisymmetric")
        object.__setattr__(self, "covariance", M)

    @property
    def n_out(self) -> int:
        return self.covariance.shape[0] // 2


@dataclass(frozen=True, eq=False)
class DenseState(GuidingState):
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex)
        n = int(round(np.log2(v.size)))
        if v.ndim != 1 or 2 ** n != v.size:
            raise ValidationError("dense state length must be a power of two")
        object.__setattr__(self, "vector", normalize(v))

    @property
    def n_out(self) -> int:
        return int(round(np.log2(self.vector.size)))


# ------------------------------------------------------- encoded-state tables


class _EncodedTables:
    """Per-element column vectors ``V_{x,j}|x_j>`` plus Gram suffix products."""

    def __init__(self, g):
        sub = g.subset
        self.alpha = sub.alpha()
        if isinstance(g, EncodedSubsetState):
            rows = [g.isometries] * len(sub.strings)
        else:
            rows = g.isometries
        self.widths = g.widths
        self.offsets = np.concatenate([[0], np.cumsum(self.widths)]).astype(int)
        n = sub.n
        # cols[j] has shape (2^{m_j}, |C|)
        self.cols = [
            np.column_stack([rows[i][j][:, int(x[j])] for i, x in enumerate(sub.strings)])
            for j in range(n)
        ]
        c = len(sub.strings)
        self.suffix = [None] * (n + 1)
        self.suffix[n] = np.ones((c, c), dtype=complex)
        for j in range(n - 1, -1, -1):
            gram = self.cols[j].conj().T @ self.cols[j]
            self.suffix[j] = gram * self.suffix[j + 1]
        self.norm2 = float(np.real(self.alpha.conj() @ self.suffix[0] @ self.alpha))
        if self.norm2 <= DEFAULT.norm_tol:
            raise ValidationError("encoded superposition vanishes")
        self._memo: dict = {}

    def amplitude(self, z: str) -> complex:
        a = self.alpha.copy()
        for j, m in enumerate(self.widths):
            zj = int(z[self.offsets[j]: self.offsets[j] + m], 2)
            a = a * self.cols[j][zj]
        return complex(a.sum() / np.sqrt(self.norm2))

    def prefix_prob(self, y: str) -> float:
        hit = self._memo.get(y)
        if hit is not None:
            return hit
        ell = len(y)
        J = int(np.searchsorted(self.offsets, ell, side="right") - 1)
        a = self.alpha.copy()
        for j in range(min(J, len(self.widths))):
            yj = int(y[self.offsets[j]: self.offsets[j + 1]], 2)
            a = a * self.cols[j][yj]
        if J >= len(self.widths):
            p = float(abs(a.sum()) ** 2)
        else:
            r = ell - self.offsets[J]
            m = self.widths[J]
            u = int(y[self.offsets[J]:ell], 2) if r else 0
            block = self.cols[J][u << (m - r): (u + 1) << (m - r)]
            G = block.conj().T @ block
            p = float(np.real(a.conj() @ (G * self.suffix[J + 1]) @ a))
        p = max(p, 0.0) / self.norm2
        self._memo[y] = p
        return p


_TABLES: dict = {}


def _tables(g) -> _EncodedTables:
    key = id(g)
    hit = _TABLES.get(key)
    if hit is None or hit[0] is not g:
        if len(_TABLES) > 64:
            _TABLES.clear()
        hit = (g, _EncodedTables(g))
        _TABLES[key] = hit
    return hit[1]


# ------------------------------------------------------------ MPS helpers


def mps_amplitude(m: MPSState, sigma: Sequence[int] | str) -> complex:
    """Unnormalized ``Tr[A_1^{s_1} ... A_n^{s_n}]``."""
    sigma = [int(s) for s in sigma]
    if len(sigma) != m.n:
        raise InputError(f"symbol string of length {len(sigma)} for {m.n} sites")
    if any(s < 0 or s >= m.d for s in sigma):
        raise InputError(f"symbol outside the physical alphabet of size {m.d}")
    prod = np.eye(m.tensors[0].shape[1], dtype=complex)
    for A, s in zip(m.tensors, sigma):
        prod = prod @ A[s]
    return complex(np.trace(prod))


def _transfer(A: np.ndarray, s: int | None = None) -> np.ndarray:
    if s is None:
        return sum(np.kron(A[t], A[t].conj()) for t in range(A.shape[0]))
    return np.kron(A[s], A[s].conj())


class _MPSTables:
    def __init__(self, m: MPSState):
        self.m = m
        n = m.n
        chi0 = m.tensors[0].shape[1]
        self.right = [None] * (n + 1)
        self.right[n] = np.eye(chi0 * chi0, dtype=complex)
        for j in range(n - 1, -1, -1):
            self.right[j] = _transfer(m.tensors[j]) @ self.right[j + 1]
        self.norm2 = float(np.real(np.trace(self.right[0])))
        if self.norm2 <= DEFAULT.norm_tol:
            raise ValidationError("MPS has zero norm")
        self._memo: dict = {}

    def prefix_prob(self, y: str) -> float:
        hit = self._memo.get(y)
        if hit is not None:
            return hit
        left = np.eye(self.right[-1].shape[0], dtype=complex)
        for j, s in enumerate(y):
            left = left @ _transfer(self.m.tensors[j], int(s))
        p = max(float(np.real(np.trace(left @ self.right[len(y)]))), 0.0) / self.norm2
        self._memo[y] = p
        return p


_MPS_TABLES: dict = {}


def _mps_tables(m: MPSState) -> _MPSTables:
    hit = _MPS_TABLES.get(id(m))
    if hit is None or hit[0] is not m:
        if len(_MPS_TABLES) > 64:
            _MPS_TABLES.clear()
        hit = (m, _MPSTables(m))
        _MPS_TABLES[id(m)] = hit
    return hit[1]


def mps_norm(m: MPSState) -> float:
    return float(np.sqrt(_mps_tables(m).norm2))


def subset_to_mps(d: SubsetState, cfg: Config = DEFAULT) -> MPSState:
    """Diagonal MPS with bond dimension ``|C|``; amplitudes ride on the first site."""
    c = len(d.strings)
    if c > cfg.bond_cap:
        raise SizeError(f"|C|={c} exceeds the bond-dimension cap {cfg.bond_cap}")
    alpha = d.alpha()
    tensors = []
    for j in range(d.n):
        A = np.zeros((2, c, c), dtype=complex)
        for i, x in enumerate(d.strings):
            A[int(x[j]), i, i] = alpha[i] if j == 0 else 1.0
        tensors.append(A)
    return MPSState(tuple(tensors), bond_cap=cfg.bond_cap)


# ------------------------------------------------------------- realization


def _all_indices_to_bits(n: int) -> list:
    return [format(i, f"0{n}b") for i in range(2 ** n)]


@singledispatch
def realize_dense(g, cfg: Config = DEFAULT) -> np.ndarray:
    """Normalized dense vector of a guiding state."""
    raise InputError(f"unknown guiding-state type {type(g).__name__}")


def _cap(n: int, cfg: Config) -> None:
    if n > cfg.state_cap:
        raise SizeError(f"{n} qubits exceed the dense state cap {cfg.state_cap}")


@realize_dense.register
def _(g: SubsetState, cfg: Config = DEFAULT) -> np.ndarray:
    _cap(g.n, cfg)
    out = np.zeros(2 ** g.n, dtype=complex)
    out[[int(s, 2) for s in g.strings]] = g.alpha()
    return out


def _encoded_dense(g, cfg: Config) -> np.ndarray:
    _cap(g.n_out, cfg)
    t = _tables(g)
    out = np.zeros(2 ** g.n_out, dtype=complex)
    for i in range(len(g.subset.strings)):
        vec = np.array([t.alpha[i]])
        for j in range(len(t.widths)):
            vec = np.kron(vec, t.cols[j][:, i])
        out += vec
    return normalize(out)


@realize_dense.register
def _(g: EncodedSubsetState, cfg: Config = DEFAULT) -> np.ndarray:
    return _encoded_dense(g, cfg)


@realize_dense.register
def _(g: AdvancedEncodedSubsetState, cfg: Config = DEFAULT) -> np.ndarray:
    return _encoded_dense(g, cfg)


def _weights_of_indices(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    return np.array([bin(i).count("1") for i in idx]) if n <= 10 else np.vectorize(
        lambda i: bin(i).count("1"))(idx)


@realize_dense.register
def _(g: FixedWeightState, cfg: Config = DEFAULT) -> np.ndarray:
    _cap(g.n, cfg)
    sub = g.as_subset()
    if sub is not None:
        return realize_dense(sub, cfg)
    mask = _weights_of_indices(g.n) == g.k
    return normalize(mask.astype(complex))


@realize_dense.register
def _(g: WindowedWeightState, cfg: Config = DEFAULT) -> np.ndarray:
    _cap(g.n, cfg)
    mask = np.isin(_weights_of_indices(g.n), g.weights)
    return normalize(mask.astype(complex))


@realize_dense.register
def _(g: MPSState, cfg: Config = DEFAULT) -> np.ndarray:
    _cap(g.n * max(1, int(np.ceil(np.log2(g.d)))), cfg)
    # left-to-right contraction keeping the open left bond for the trace
    chi0 = g.tensors[0].shape[1]
    acc = np.eye(chi0, dtype=complex)[None]  # (configs, chi0, chi)
    for A in g.tensors:
        acc = np.einsum("cab,sbd->csad", acc, A).reshape(-1, chi0, A.shape[2])
    vec = np.einsum("caa->c", acc)
    return normalize(vec)


@realize_dense.register
def _(g: GaussianState, cfg: Config = DEFAULT) -> np.ndarray:
    from glhbench.fermionic_gaussian import gaussian_statevector

    _cap(g.n_out, cfg)
    return gaussian_statevector(g.covariance)


@realize_dense.register
def _(g: DenseState, cfg: Config = DEFAULT) -> np.ndarray:
    return g.vector


# ---------------------------------------------------------------- queries


@singledispatch
def amplitude_query(g, z: str) -> complex:
    """Normalized amplitude ``<z|g>`` computed from the description."""
    raise InputError(f"unknown guiding-state type {type(g).__name__}")


@amplitude_query.register
def _(g: SubsetState, z: str) -> complex:
    _check_bits(z, g.n)
    try:
        i = g.strings.index(z)
    except ValueError:
        return 0j
    return complex(g.alpha()[i])


@amplitude_query.register
def _(g: EncodedSubsetState, z: str) -> complex:
    return _tables(g).amplitude(_check_bits(z, g.n_out))


@amplitude_query.register
def _(g: AdvancedEncodedSubsetState, z: str) -> complex:
    return _tables(g).amplitude(_check_bits(z, g.n_out))


@amplitude_query.register
def _(g: FixedWeightState, z: str) -> complex:
    _check_bits(z, g.n)
    sub = g.as_subset()
    if sub is not None:
        return amplitude_query(sub, z)
    return complex(1 / np.sqrt(comb(g.n, g.k))) if z.count("1") == g.k else 0j


@amplitude_query.register
def _(g: WindowedWeightState, z: str) -> complex:
    _check_bits(z, g.n)
    return complex(1 / np.sqrt(g.support_size)) if z.count("1") in g.weights else 0j


@amplitude_query.register
def _(g: MPSState, z: str) -> complex:
    _check_bits(z, g.n_out)
    return mps_amplitude(g, z) / mps_norm(g)


@amplitude_query.register
def _(g: GaussianState, z: str) -> complex:
    _check_bits(z, g.n_out)
    return complex(realize_dense(g)[int(z, 2)])


@amplitude_query.register
def _(g: DenseState, z: str) -> complex:
    _check_bits(z, g.n_out)
    return complex(g.vector[int(z, 2)])


# ---------------------------------------------------------------- sampling


@singledispatch
def prefix_probability(g, y: str) -> float:
    """Probability that the first ``len(y)`` measured bits equal ``y``."""
    raise InputError(f"unknown guiding-state type {type(g).__name__}")


@prefix_probability.register
def _(g: SubsetState, y: str) -> float:
    p = np.abs(g.alpha()) ** 2
    return float(sum(pi for s, pi in zip(g.strings, p) if s.startswith(y)))


@prefix_probability.register
def _(g: EncodedSubsetState, y: str) -> float:
    return _tables(g).prefix_prob(y)


@prefix_probability.register
def _(g: AdvancedEncodedSubsetState, y: str) -> float:
    return _tables(g).prefix_prob(y)


@prefix_probability.register
def _(g: FixedWeightState, y: str) -> float:
    sub = g.as_subset()
    if sub is not None:
        return prefix_probability(sub, y)
    w = y.count("1")
    return comb(g.n - len(y), g.k - w) / comb(g.n, g.k) if g.k >= w else 0.0


@prefix_probability.register
def _(g: WindowedWeightState, y: str) -> float:
    w = y.count("1")
    hits = sum(comb(g.n - len(y), k - w) for k in g.weights if k >= w)
    return hits / g.support_size


@prefix_probability.register
def _(g: MPSState, y: str) -> float:
    return _mps_tables(g).prefix_prob(y)


def _dense_prefix(vec: np.ndarray, n: int, y: str) -> float:
    if not y:
        return float(np.sum(np.abs(vec) ** 2))
    block = 2 ** (n - len(y))
    start = int(y, 2) * block
    return float(np.sum(np.abs(vec[start: start + block]) ** 2))


@prefix_probability.register
def _(g: GaussianState, y: str) -> float:
    return _dense_prefix(realize_dense(g), g.n_out, y)


@prefix_probability.register
def _(g: DenseState, y: str) -> float:
    return _dense_prefix(g.vector, g.n_out, y)


def sample_indices(g: GuidingState, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` basis indices bit by bit from conditional prefix marginals.

    All draws advance together; conditionals are computed once per distinct
    prefix and shared.
    """
    M = g.n_out
    prefixes = np.zeros(size, dtype=np.int64)
    memo: dict = {"": prefix_probability(g, "")}
    for j in range(M):
        uniq, inv = np.unique(prefixes, return_inverse=True)
        p1 = np.empty(uniq.size)
        for i, u in enumerate(uniq):
            y = format(int(u), f"0{j}b") if j else ""
            py = memo.get(y)
            if py is None:
                py = memo[y] = prefix_probability(g, y)
            if py <= 0.0:
                raise RuntimeError(f"sampled a zero-probability prefix {y!r}")
            y1 = y + "1"
            if y1 not in memo:
                memo[y1] = prefix_probability(g, y1)
            p1[i] = min(1.0, max(0.0, memo[y1] / py))
        bits = rng.random(size) < p1[inv]
        prefixes = 2 * prefixes + bits
    return prefixes


def sample(g: GuidingState, rng: np.random.Generator, size: int | None = None):
    """One bit string (``size=None``) or a list of them, distributed as ``|<z|g>|^2``."""
    idx = sample_indices(g, rng, 1 if size is None else size)
    strs = [format(int(i), f"0{g.n_out}b") for i in idx]
    return strs[0] if size is None else strs


def chi_square_test(indices: np.ndarray, probs: np.ndarray, alpha: float = 1e-3) -> dict:
    """Goodness of fit of sampled indices against ``probs``; sparse bins pooled."""
    probs = np.asarray(probs, dtype=float)
    probs = probs / probs.sum()
    counts = np.bincount(indices, minlength=probs.size)
    N = counts.sum()
    support = probs > 1e-15
    outside = int(counts[~support].sum())
    if outside:
        return {"statistic": np.inf, "p_value": 0.0, "passed": False, "outside_support": outside}
    expected = N * probs[support]
    observed = counts[support]
    big = expected >= 5
    exp_bins = list(expected[big])
    obs_bins = list(observed[big])
    if (~big).any():
        exp_bins.append(expected[~big].sum())
        obs_bins.append(observed[~big].sum())
        if exp_bins[-1] < 5 and len(exp_bins) > 1:
            e, o = exp_bins.pop(), obs_bins.pop()
            exp_bins[-1] += e
            obs_bins[-1] += o
    if len(exp_bins) < 2:
        return {"statistic": 0.0, "p_value": 1.0, "passed": True, "outside_support": 0}
    res = stats.chisquare(obs_bins, exp_bins)
    return {
        "statistic": float(res.statistic),
        "p_value": float(res.pvalue),
        "passed": bool(res.pvalue > alpha),
        "outside_support": 0,
    }


# ----------------------------------------------------------- geometric bounds


def geometric_bounds(X: float, Y: float) -> tuple[float, float]:
    """Interval for ``|<a|c>|^2`` given ``X = ||a - b||`` and ``Y = |<b|c>|^2``."""
    if X < 0:
        raise InputError("X must be nonnegative")
    if not 0.0 <= Y <= 1.0:
        raise InputError(f"Y={Y} outside [0, 1]")
    r = np.sqrt(Y)
    hi = min(1.0, (r + X) ** 2)
    lo = (r - X) ** 2 if X <= r else 0.0
    return float(min(lo, 1.0)), float(hi)


# ------------------------------------------------------ uniform optimality


@dataclass(frozen=True)
class AmplitudeProfileReport:
    best_value: float
    uniform_value: float
    closed_form: float
    distance_from_uniform: float
    best_profile: np.ndarray
    restarts: int


def optimal_amplitude_profile(
    S: Sequence[str],
    E: Sequence[str],
    trials: int = 50,
    rng: np.random.Generator | None = None,
    step: float = 0.1,
    max_iter: int = 10_000,
    tol: float = 1e-14,
) -> AmplitudeProfileReport:
    """Maximize ``|sum_{x in S & E} alpha_x|^2`` over unit-norm profiles on ``S``.

    Projected gradient ascent from random complex starts.  The uniform
    profile on ``S`` is compared against the best profile found.
    """
    S = list(dict.fromkeys(S))
    if not S:
        raise InputError("S must be nonempty")
    rng = np.random.default_rng() if rng is None else rng
    Eset = set(E)
    mask = np.array([x in Eset for x in S], dtype=float)

    def objective(a):
        return float(abs(mask @ a) ** 2)

    best, best_a = -1.0, None
    for _ in range(trials):
        a = normalize(rng.normal(size=len(S)) + 1j * rng.normal(size=len(S)))
        val = objective(a)
        for _ in range(max_iter):
            grad = 2 * (mask @ a) * mask
            a_new = a + step * grad
            nrm = np.linalg.norm(a_new)
            if nrm == 0:
                break
            a_new /= nrm
            new_val = objective(a_new)
            if abs(new_val - val) <= tol:
                a, val = a_new, new_val
                break
            a, val = a_new, new_val
        if val > best:
            best, best_a = val, a
    uniform = np.full(len(S), 1 / np.sqrt(len(S)))
    phase = np.vdot(uniform, best_a)
    aligned = best_a * (np.conj(phase) / abs(phase)) if abs(phase) > 0 else best_a
    return AmplitudeProfileReport(
        best_value=best,
        uniform_value=objective(uniform),
        closed_form=float(mask.sum()),
        distance_from_uniform=float(np.linalg.norm(aligned - uniform)),
        best_profile=best_a,
        restarts=trials,
    )


# ------------------------------------------------------- description size


@singledispatch
def description_payload(g) -> int:
    """Payload bits of the canonical serialization (header excluded)."""
    raise InputError(f"unknown guiding-state type {type(g).__name__}")


@description_payload.register
def _(g: SubsetState) -> int:
    bits = len(g.strings) * g.n
    if g.amplitudes is not None:
        bits += len(g.strings) * COMPLEX_BITS
    return bits


def _iso_bits(isos) -> int:
    return sum(V.size for V in isos) * COMPLEX_BITS


@description_payload.register
def _(g: EncodedSubsetState) -> int:
    return description_payload(g.subset) + _iso_bits(g.isometries)


@description_payload.register
def _(g: AdvancedEncodedSubsetState) -> int:
    return description_payload(g.subset) + sum(_iso_bits(row) for row in g.isometries)


@description_payload.register
def _(g: FixedWeightState) -> int:
    sub = g.as_subset()
    return description_payload(sub) if sub is not None else 0


@description_payload.register
def _(g: WindowedWeightState) -> int:
    return len(g.weights) * max(1, int(np.ceil(np.log2(g.n + 1))))


@description_payload.register
def _(g: MPSState) -> int:
    return sum(A.size for A in g.tensors) * COMPLEX_BITS


@description_payload.register
def _(g: GaussianState) -> int:
    return g.covariance.size * REAL_BITS


@description_payload.register
def _(g: DenseState) -> int:
    return g.vector.size * COMPLEX_BITS


def description_size(g: GuidingState) -> int:
    """Total bits: fixed header plus family payload."""
    return HEADER_BITS + description_payload(g)


# ---------------------------------------------------------------- checks


def support_weights(vec: np.ndarray, tol: float = 1e-12) -> set:
    """Hamming weights of basis strings carrying amplitude above ``tol``."""
    n = int(round(np.log2(vec.size)))
    idx = np.flatnonzero(np.abs(vec) > tol)
    return {bin(int(i)).count("1") for i in idx} if n else {0}


def weight_sector_projector(n: int, weights) -> np.ndarray:
    """Diagonal of the projector onto the given weight sectors."""
    return np.isin(_weights_of_indices(n), list(weights)).astype(float)


def weight_map_check(g, q: int) -> bool:
    """True when every image string of an encoded state has Hamming weight ``q``."""
    return support_weights(realize_dense(g)) == {q}


def encoded_image_weights(g) -> set:
    """Weights present in a realized encoded state."""
    return support_weights(realize_dense(g))


# ------------------------------------------------------------------ JSON


def _cm(m) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.atleast_2d(m)]


def _from_cm(obj) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in obj], dtype=complex)


def _amps(a):
    return None if a is None else [[float(v.real), float(v.imag)] for v in a]


def _from_amps(a):
    return None if a is None else np.array([complex(re, im) for re, im in a], dtype=complex)


def state_to_json(g: GuidingState) -> dict:
    if isinstance(g, SubsetState):
        return {"family": "scss", "n": g.n, "strings": list(g.strings), "amplitudes": _amps(g.amplitudes)}
    if isinstance(g, EncodedSubsetState):
        out = state_to_json(g.subset)
        out.update(family="scess", isometries=[_cm(V) for V in g.isometries])
        return out
    if isinstance(g, AdvancedEncodedSubsetState):
        out = state_to_json(g.subset)
        out.update(family="advanced", isometries=[[_cm(V) for V in row] for row in g.isometries])
        return out
    if isinstance(g, FixedWeightState):
        return {
            "family": "fixed_weight", "n": g.n, "k": g.k,
            "strings": None if g.strings is None else list(g.strings),
            "amplitudes": _amps(g.amplitudes),
        }
    if isinstance(g, WindowedWeightState):
        return {"family": "windowed", "n": g.n, "weights": list(g.weights)}
    if isinstance(g, MPSState):
        return {"family": "mps", "tensors": [[_cm(A[s]) for s in range(A.shape[0])] for A in g.tensors]}
    if isinstance(g, GaussianState):
        return {"family": "gaussian", "covariance": g.covariance.tolist()}
    if isinstance(g, DenseState):
        return {"family": "dense", "amplitudes": _amps(g.vector)}
    raise InputError(f"unknown guiding-state type {type(g).__name__}")


def state_from_json(obj: dict) -> GuidingState:
    try:
        fam = obj["family"]
        if fam in ("scss", "scess", "advanced"):
            sub = SubsetState(int(obj["n"]), tuple(obj["strings"]), _from_amps(obj.get("amplitudes")))
            if fam == "scss":
                return sub
            if fam == "scess":
                return EncodedSubsetState(sub, tuple(_from_cm(V) for V in obj["isometries"]))
            return AdvancedEncodedSubsetState(
                sub, tuple(tuple(_from_cm(V) for V in row) for row in obj["isometries"])
            )
        if fam == "fixed_weight":
            strings = obj.get("strings")
            return FixedWeightState(
                int(obj["n"]), int(obj["k"]), None if strings is None else tuple(strings),
                _from_amps(obj.get("amplitudes")),
            )
        if fam == "windowed":
            return WindowedWeightState(int(obj["n"]), tuple(obj["weights"]))
        if fam == "mps":
            return MPSState(tuple(np.stack([_from_cm(m) for m in site]) for site in obj["tensors"]))
        if fam == "gaussian":
            return GaussianState(np.array(obj["covariance"], dtype=float))
        if fam == "dense":
            return DenseState(_from_amps(obj["amplitudes"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise InputError(f"malformed guiding-state JSON: {exc}") from exc
    raise InputError(f"unknown family {obj.get('family')!r}")


def load_state(path: str) -> GuidingState:
    with open(path) as fh:
        return state_from_json(json.load(fh))


# ------------------------------------------------------------- examples


def bell_pair_isometry(kind: str) -> np.ndarray:
    """Column of a Bell state, as a 4-dim vector."""
    s = 1 / np.sqrt(2)
    return {
        "phi+": np.array([s, 0, 0, s]),
        "phi-": np.array([s, 0, 0, -s]),
        "psi+": np.array([0, s, s, 0]),
        "psi-": np.array([0, s, -s, 0]),
    }[kind].astype(complex)


def multi_alphabet_example() -> EncodedSubsetState:
    """The three-alphabet example written as an encoded subset state.

    ``(|010>|+++>|Phi-> + |111>|+-->|Psi+>)/sqrt(2)``: the first three positions
    are plain bits, the next three use Hadamard isometries, and the last one
    maps ``|0> -> Psi+`` and ``|1> -> Phi-``.
    """
    I = np.eye(2, dtype=complex)
    Hd = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    bell = np.column_stack([bell_pair_isometry("psi+"), bell_pair_isometry("phi-")])
    sub = SubsetState(7, ("0100001", "1110110"))
    return EncodedSubsetState(sub, (I, I, I, Hd, Hd, Hd, bell))


__all__ = [
    "GuidingState", "SubsetState", "EncodedSubsetState", "AdvancedEncodedSubsetState",
    "FixedWeightState", "WindowedWeightState", "MPSState", "GaussianState", "DenseState",
    "realize_dense", "amplitude_query", "prefix_probability", "sample", "sample_indices",
    "chi_square_test", "fidelity", "geometric_bounds", "subset_to_mps", "mps_amplitude",
    "mps_norm", "optimal_amplitude_profile", "description_size", "description_payload",
    "support_weights", "weight_sector_projector", "state_to_json", "state_from_json",
    "multi_alphabet_example", "HEADER_BITS",
]
