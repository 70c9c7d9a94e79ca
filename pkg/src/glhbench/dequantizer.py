"""Classical route: a Chebyshev low-pass filter applied to the guiding state.

The operator is rescaled to unit norm and shifted to ``H'' = (H + I) / 2`` so
its spectrum sits in ``[0, 1]``.  A polynomial ``p`` close to 1 on ``[0, a]``
and close to 0 on ``[b, 1]`` is applied to ``xi`` with a Clenshaw recurrence
that touches ``H''`` only through operator-vector products, and the decision
reads off ``||p(H'') xi||``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from scipy.fft import dct
from scipy.special import erfc, erfcinv

from glhbench.config import DEFAULT, Config
from glhbench.energy_estimation import DecisionReport, as_vector
from glhbench.errors import InputError, ValidationError
from glhbench.guiding_states import amplitude_query, sample_indices
from glhbench.operator_core import (
    LocalHamiltonian,
    apply,
    assemble,
    check_normalized,
    operator_norm,
    rescale_unit,
    row,
    spectrum,
)

GRID_POINTS = 10_000


@dataclass(frozen=True)
class AffineMap:
    """``x -> scale * x + offset``."""

    scale: float = 0.5
    offset: float = 0.5

    def forward(self, x):
        return self.scale * np.asarray(x) + self.offset

    def inverse(self, y):
        return (np.asarray(y) - self.offset) / self.scale


def shift_spectrum(H: LocalHamiltonian, cfg: Config = DEFAULT) -> tuple[LocalHamiltonian, AffineMap]:
    """``(H + I) / 2`` for ``||H|| <= 1``."""
    nrm = operator_norm(H, cfg)[0]
    if nrm > 1 + 1e-12:
        raise ValidationError(f"||H|| = {nrm} exceeds 1; rescale first")
    amap = AffineMap()
    return H.scaled(amap.scale).shifted(amap.offset), amap


@dataclass(frozen=True)
class FilterSpec:
    a: float
    b: float
    sup_error: float

    def __post_init__(self):
        if not 0 <= self.a < self.b < 1:
            raise InputError(f"need 0 <= a < b < 1, got a={self.a}, b={self.b}")
        if not 0 < self.sup_error < 0.5:
            raise InputError("sup_error must lie in (0, 1/2)")

    def degree_bound(self, c_f: float = DEFAULT.filter_degree_constant) -> int:
        return math.ceil(c_f * math.log(1 / self.sup_error) / (self.b - self.a))

    def grid(self, points: int = GRID_POINTS) -> tuple[np.ndarray, np.ndarray]:
        """Points on ``[0, a]`` and on ``[b, 1]``, split by length, ``points`` in total."""
        la, lb = self.a, 1 - self.b
        na = max(1, int(round(points * la / (la + lb))))
        return np.linspace(0.0, self.a, na), np.linspace(self.b, 1.0, points - na)

    def step(self, x):
        """Smoothed step: ``erfc`` centred at ``(a+b)/2``, within ``sup_error/2`` of 0/1 outside ``(a, b)``."""
        kappa = erfcinv(self.sup_error)
        half = (self.b - self.a) / 2
        return 0.5 * erfc(kappa * (np.asarray(x) - (self.a + self.b) / 2) / half)


@dataclass(frozen=True, eq=False)
class ChebyshevFilter:
    spec: FilterSpec
    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return npcheb.chebval(2 * np.asarray(x) - 1, self.coefficients)

    def grid_error(self) -> float:
        lo, hi = self.spec.grid()
        return float(max(np.max(np.abs(self(lo) - 1)), np.max(np.abs(self(hi)))))

    def to_json(self) -> dict:
        return {
            "a": self.spec.a,
            "b": self.spec.b,
            "sup_error": self.spec.sup_error,
            "degree": self.degree,
            "coefficients": [float(c) for c in self.coefficients],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChebyshevFilter":
        return cls(FilterSpec(obj["a"], obj["b"], obj["sup_error"]), np.asarray(obj["coefficients"], dtype=float))


def chebyshev_coefficients(func, d: int) -> np.ndarray:
    """Degree-``d`` interpolant of ``func`` on ``[-1, 1]`` at first-kind nodes, via a type-II DCT."""
    N = d + 1
    nodes = np.cos(np.pi * (2 * np.arange(N) + 1) / (2 * N))
    c = dct(func(nodes), type=2) / N
    c[0] /= 2
    return c


def _interpolant(spec: FilterSpec, d: int) -> ChebyshevFilter:
    return ChebyshevFilter(spec, chebyshev_coefficients(lambda y: spec.step((y + 1) / 2), d))


def build_filter(a: float, b: float, sup_error: float, cfg: Config = DEFAULT) -> ChebyshevFilter:
    """Lowest passing interpolation degree found by doubling then bisection."""
    spec = FilterSpec(float(a), float(b), float(sup_error))
    ok = lambda f: f.grid_error() <= spec.sup_error
    d = 1
    while True:
        if d > cfg.filter_degree_cap:
            raise InputError(f"filter needs degree above the cap {cfg.filter_degree_cap}")
        f = _interpolant(spec, d)
        if ok(f):
            break
        d *= 2
    lo, hi, best = d // 2, d, f
    while hi - lo > 1:
        mid = (lo + hi) // 2
        g = _interpolant(spec, mid)
        if ok(g):
            hi, best = mid, g
        else:
            lo = mid
    return best


def polynomial_filter(coefficients, a: float = 0.25, b: float = 0.75, sup_error: float = 0.25) -> ChebyshevFilter:
    """Wrap explicit Chebyshev coefficients (the grid check is not enforced)."""
    return ChebyshevFilter(FilterSpec(a, b, sup_error), np.asarray(coefficients, dtype=float))


def apply_filter(Hs, p: ChebyshevFilter, xi) -> tuple[np.ndarray, int]:
    """``p(H'') xi`` by Clenshaw on ``Y = 2H'' - I``; returns the vector and product count.

    ``Hs`` is a LocalHamiltonian, a matrix, or a callable ``v -> H'' v``.
    """
    xi = as_vector(xi)
    check_normalized(xi)
    if isinstance(Hs, LocalHamiltonian):
        if 2 ** Hs.n != xi.size:
            raise InputError("state dimension does not match the operator")
        mul = lambda v: apply(Hs, v)
    elif callable(Hs):
        mul = Hs
    else:
        M = Hs
        if M.shape[1] != xi.size:
            raise InputError("state dimension does not match the operator")
        mul = lambda v: M @ v
    c = p.coefficients
    d = len(c) - 1
    if d == 0:
        return c[0] * xi, 0
    Y = lambda v: 2 * mul(v) - v
    b1, b2 = c[d] * xi, np.zeros_like(xi)
    for ck in c[d - 1:0:-1]:
        b1, b2 = ck * xi + 2 * Y(b1) - b2, b1
    return c[0] * xi + Y(b1) - b2, d


def decide_classical(H: LocalHamiltonian, g, a: float, b: float, delta: float, factor: float | None = None,
                     check_promise: bool = False, cfg: Config = DEFAULT) -> DecisionReport:
    """Yes when ``nu = ||p(H'') xi|| >= delta / 2`` with a ``delta / 4`` filter.

    ``a`` and ``b`` are in the units of ``H``; ``factor`` overrides the exact
    norm used for rescaling.
    """
    if not b > a:
        return DecisionReport("Invalid", None, 0, 0.0, route="classical", details={"reason": "thresholds inverted"})
    if not 0 < delta <= 1:
        raise InputError("delta must lie in (0, 1]")
    Hn, f = rescale_unit(H, norm=factor, cfg=cfg)
    Hs, amap = shift_spectrum(Hn, cfg=cfg)
    a2, b2 = float(amap.forward(a / f)), float(amap.forward(b / f))
    p = build_filter(a2, b2, delta / 4, cfg=cfg)
    xi = as_vector(g)
    v, products = apply_filter(assemble(Hs, sparse=True, cfg=cfg), p, xi)
    nu = float(np.linalg.norm(v))
    decision = "Yes" if nu >= delta / 2 else "No"
    details = {
        "nu": nu,
        "degree": p.degree,
        "products": products,
        "a_shifted": a2,
        "b_shifted": b2,
        "yes_floor": math.sqrt(delta) - delta / 4,
        "no_ceiling": delta / 4,
        "factor": f,
    }
    if check_promise:
        spec = spectrum(Hs, cfg=cfg)
        lam0 = spec.ground_energy
        w0 = float(np.real(np.vdot(xi, spec.ground_projector() @ xi)))
        yes_ok = lam0 <= a2 and w0 >= delta
        details.update(lambda0_shifted=lam0, ground_weight=w0,
                       promise_violation=not (yes_ok or lam0 >= b2))
    return DecisionReport(decision, nu, 1, float(products), route="classical", details=details)


# ------------------------------------------------------------ sampled route


def _sparse_clenshaw(col, c: np.ndarray, e: dict) -> dict:
    """``p(H'') e`` for a sparse dict vector, expanding one column at a time."""

    def lin(*pairs) -> dict:
        out: dict = {}
        for s, v in pairs:
            for k, x in v.items():
                out[k] = out.get(k, 0) + s * x
        return out

    def Y(v: dict) -> dict:
        out: dict = {}
        for w, x in v.items():
            for u, h in col(w).items():
                out[u] = out.get(u, 0) + 2 * h * x
        return lin((1, out), (-1, v))

    d = len(c) - 1
    if d == 0:
        return lin((c[0], e))
    b1, b2 = lin((c[d], e)), {}
    for ck in c[d - 1:0:-1]:
        b1, b2 = lin((ck, e), (2, Y(b1)), (-1, b2)), b1
    return lin((c[0], e), (1, Y(b1)), (-1, b2))


@dataclass(frozen=True)
class SampledEstimate:
    estimate: float
    stderr: float
    samples: int
    distinct: int


def sampled_norm_estimate(Hs: LocalHamiltonian, g, p: ChebyshevFilter, samples: int,
                          rng: np.random.Generator) -> SampledEstimate:
    """Importance-sampling estimate of ``||p(H'') xi||^2``.

    Draw ``z ~ |xi_z|^2`` and average ``<z|p^2|xi> / xi_z``.  The numerator
    comes from sparse column expansion of ``H''`` and amplitude queries.
    """
    n = Hs.n
    col = lru_cache(maxsize=None)(lambda w: row(Hs, w))
    amp = lru_cache(maxsize=None)(lambda w: amplitude_query(g, format(w, f"0{n}b")))
    idx = sample_indices(g, rng, samples)
    uniq, counts = np.unique(idx, return_counts=True)
    vals = np.empty(uniq.size)
    for i, z in enumerate(uniq):
        z = int(z)
        u = _sparse_clenshaw(col, p.coefficients, _sparse_clenshaw(col, p.coefficients, {z: 1.0}))
        num = sum(np.conj(y) * amp(k) for k, y in u.items())
        vals[i] = float(np.real(num / amp(z)))
    mean = float(np.sum(counts * vals) / samples)
    var = float(np.sum(counts * (vals - mean) ** 2) / max(samples - 1, 1))
    return SampledEstimate(mean, math.sqrt(var / samples), samples, int(uniq.size))


def filter_to_json(p: ChebyshevFilter) -> str:
    return json.dumps(p.to_json(), sort_keys=True)
