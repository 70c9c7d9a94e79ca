"""Quantum-route decider under an ideal phase-estimation measurement model.

Each QPE run returns an eigenvalue of the shifted operator ``(H + I) / 2``
drawn with probability ``|<phi_j|xi>|^2`` and rounded to a grid of spacing
``eps`` anchored at 0.  The ground-energy estimate is the minimum over
``R = ceil((c_R / delta) ln(1/eta))`` runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from itertools import combinations
from math import comb

import numpy as np

from glhbench.config import DEFAULT, Config
from glhbench.errors import InputError, SizeError, ValidationError
from glhbench.guiding_states import GuidingState, realize_dense, support_weights
from glhbench.operator_core import (
    LocalHamiltonian,
    Spectrum,
    check_normalized,
    operator_norm,
    rescale_unit,
    row,
    spectrum,
)

DECISIONS = ("Yes", "No", "Invalid")


@dataclass(frozen=True)
class QPEConfig:
    eps: float
    eta: float = 0.1
    delta: float = 0.5
    seed: int | None = None
    c_r: float = DEFAULT.repetition_constant

    def __post_init__(self):
        if not 0 < self.eps < 1 or not 0 < self.eta < 1:
            raise ValidationError("eps and eta must lie in (0, 1)")
        if not 0 < self.delta <= 1:
            raise ValidationError("delta must lie in (0, 1]")

    @property
    def repetitions(self) -> int:
        return max(1, math.ceil(self.c_r / self.delta * math.log(1 / self.eta)))

    @property
    def per_run_cost(self) -> float:
        """Charge of one run, ``ln(1/eta) / (c_R eps eta delta)``.

        Multiplied by the repetition count this reproduces the stated total
        ``ln(1/eta)^2 / (eps eta delta^2)`` literally.
        """
        return math.log(1 / self.eta) / (self.c_r * self.eps * self.eta * self.delta)

    @property
    def cost(self) -> float:
        return self.repetitions * self.per_run_cost


@dataclass(frozen=True)
class DecisionReport:
    decision: str
    estimate: float | None
    repetitions: int
    cost: float
    seed: int | None = None
    route: str = "qpe"
    details: dict | None = None

    def __post_init__(self):
        if self.decision not in DECISIONS:
            raise ValidationError(f"decision must be one of {DECISIONS}")
        if self.repetitions < 1 and self.decision != "Invalid":
            raise ValidationError("at least one repetition is required")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=float)


def round_to_grid(x, eps: float):
    """Nearest multiple of ``eps``; exact ties go to the lower point."""
    x = np.asarray(x, dtype=float)
    return np.ceil(x / eps - 0.5) * eps


def as_vector(xi) -> np.ndarray:
    if isinstance(xi, GuidingState):
        return realize_dense(xi)
    return np.asarray(xi, dtype=complex)


def outcome_distribution(H: LocalHamiltonian | Spectrum, xi) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and the Born weights ``|<phi_j|xi>|^2``."""
    spec = H if isinstance(H, Spectrum) else spectrum(H)
    if spec.basis is not None or spec.eigenvectors.shape[1] != spec.dim:
        raise InputError("the measurement model needs the full eigenbasis")
    xi = as_vector(xi)
    check_normalized(xi)
    p = np.abs(spec.eigenvectors.conj().T @ xi) ** 2
    return spec.eigenvalues, p / p.sum()


def qpe_sample(H: LocalHamiltonian | Spectrum, xi, eps: float, rng: np.random.Generator, size=None):
    """Ideal phase-estimation outcomes for an operator with spectrum in ``[0, 1]``."""
    lam, p = outcome_distribution(H, xi)
    if lam[0] < -1e-12 or lam[-1] > 1 + 1e-12:
        raise ValidationError("spectrum must lie in [0, 1]; shift with (H + I) / 2 first")
    j = rng.choice(lam.size, size=size, p=p)
    return round_to_grid(lam[j], eps)


def estimate_ground(H: LocalHamiltonian | Spectrum, xi, cfg: QPEConfig,
                    rng: np.random.Generator | None = None) -> tuple[float, DecisionReport]:
    """Minimum over ``cfg.repetitions`` ideal QPE outcomes."""
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    spec = H if isinstance(H, Spectrum) else spectrum(H)
    samples = qpe_sample(spec, xi, cfg.eps, rng, size=cfg.repetitions)
    lam_hat = float(np.min(samples))
    rep = DecisionReport("Yes", lam_hat, cfg.repetitions, cfg.cost, cfg.seed, details={"eps": cfg.eps})
    return lam_hat, rep


@dataclass(frozen=True)
class ShiftedProblem:
    """``H'' = (H / factor + I) / 2`` together with translated thresholds."""

    spectrum: Spectrum
    factor: float
    a: float
    b: float

    def to_original(self, x: float) -> float:
        return (2 * x - 1) * self.factor


def shifted_problem(H: LocalHamiltonian, a: float, b: float, factor: float | None = None,
                    cfg: Config = DEFAULT) -> ShiftedProblem:
    from glhbench.dequantizer import shift_spectrum

    Hn, f = rescale_unit(H, norm=factor, cfg=cfg)
    Hs, _ = shift_spectrum(Hn, cfg=cfg)
    return ShiftedProblem(spectrum(Hs, cfg=cfg), f, 0.5 * (a / f + 1), 0.5 * (b / f + 1))


def decide_glh(H: LocalHamiltonian | ShiftedProblem, g, a: float, b: float, eta: float = 0.1,
               delta: float = 0.5, seed: int | None = None, rng: np.random.Generator | None = None,
               c_r: float = DEFAULT.repetition_constant, factor: float | None = None,
               cfg: Config = DEFAULT) -> DecisionReport:
    """Yes when the min-estimator falls at or below the threshold midpoint.

    ``a`` and ``b`` are in the units of ``H``; the decision runs on the
    shifted unit-norm operator with ``eps = (b'' - a'') / 4``.  A
    precomputed ShiftedProblem may stand in for ``H``.
    """
    if not b > a:
        return DecisionReport("Invalid", None, 0, 0.0, seed, details={"reason": "thresholds inverted"})
    prob = H if isinstance(H, ShiftedProblem) else shifted_problem(H, a, b, factor=factor, cfg=cfg)
    if isinstance(H, ShiftedProblem):
        f = prob.factor
        prob = ShiftedProblem(prob.spectrum, f, 0.5 * (a / f + 1), 0.5 * (b / f + 1))
    eps = (prob.b - prob.a) / 4
    qcfg = QPEConfig(eps=min(eps, 0.5), eta=eta, delta=delta, seed=seed, c_r=c_r)
    lam_hat, _ = estimate_ground(prob.spectrum, g, qcfg, rng=rng)
    mid = 0.5 * (prob.a + prob.b)
    decision = "Yes" if lam_hat <= mid else "No"
    return DecisionReport(
        decision,
        prob.to_original(lam_hat),
        qcfg.repetitions,
        qcfg.cost,
        seed,
        details={"eps_shifted": qcfg.eps, "midpoint_shifted": mid, "estimate_shifted": lam_hat,
                 "factor": prob.factor},
    )


# ------------------------------------------------------------ weight sector


def weight_k_basis(n: int, k: int) -> list[int]:
    """Indices of weight-``k`` strings in lexicographic (= ascending integer) order."""
    out = []
    for ones in combinations(range(n), k):
        z = 0
        for q in ones:
            z |= 1 << (n - 1 - q)
        out.append(z)
    return sorted(out)


def weight_k_project(H: LocalHamiltonian, k: int, cfg: Config = DEFAULT) -> np.ndarray:
    """``P_k H P_k`` on the weight-``k`` sector, built row by row from the term list."""
    n = H.n
    if not 0 <= k <= n:
        raise InputError(f"weight {k} outside [0, {n}]")
    D = comb(n, k)
    if D > cfg.subset_cap:
        raise SizeError(f"sector dimension {D} exceeds cap {cfg.subset_cap}")
    basis = weight_k_basis(n, k)
    pos = {z: i for i, z in enumerate(basis)}
    Hk = np.zeros((D, D), dtype=complex)
    for j, z in enumerate(basis):
        for w, v in row(H, z).items():
            i = pos.get(w)
            if i is not None:
                Hk[i, j] += v
    return Hk


@dataclass(frozen=True)
class WeightKReport:
    k: int
    overlap: float
    lambda0: float
    gap: float
    mu0: float
    energy: float
    sector_energy: float
    norm: float
    lower_slack: float
    upper_slack: float
    mu_slack: float
    mu_upper_slack: float

    def holds(self, tol: float = 1e-10) -> bool:
        return min(self.lower_slack, self.upper_slack, self.mu_slack, self.mu_upper_slack) >= -tol


def weight_k_bounds_check(H: LocalHamiltonian, k: int, psi, cfg: Config = DEFAULT) -> WeightKReport:
    """Evaluate both inequality chains for a weight-``k`` trial state.

    The overlap is the ground-space weight of ``psi``; the upper chain uses
    ``||H||`` and presumes a positive semidefinite ``H``.
    """
    vec = as_vector(psi)
    check_normalized(vec)
    if support_weights(vec) != {k}:
        raise ValidationError(f"trial state is not supported on the weight-{k} sector")
    spec = spectrum(H, cfg=cfg)
    lam = spec.eigenvalues
    P0 = spec.ground_projector()
    delta = float(np.real(np.vdot(vec, P0 @ vec)))
    lam0 = float(lam[0])
    gap = spec.gap
    M = spec.eigenvectors @ np.diag(lam) @ spec.eigenvectors.conj().T
    E = float(np.real(np.vdot(vec, M @ vec)))
    Hk = weight_k_project(H, k, cfg)
    basis = weight_k_basis(H.n, k)
    sub = vec[basis]
    Ek = float(np.real(np.vdot(sub, Hk @ sub)))
    mu0 = float(np.linalg.eigvalsh(Hk)[0])
    nrm = operator_norm(H, cfg)[0]
    gap_term = 0.0 if not np.isfinite(gap) else (1 - delta) * gap
    return WeightKReport(
        k=k,
        overlap=delta,
        lambda0=lam0,
        gap=gap,
        mu0=mu0,
        energy=E,
        sector_energy=Ek,
        norm=nrm,
        lower_slack=E - (gap_term + lam0),
        upper_slack=lam0 + (1 - delta) * nrm - E,
        mu_slack=Ek - mu0,
        mu_upper_slack=lam0 + (1 - delta) * nrm - mu0,
    )
