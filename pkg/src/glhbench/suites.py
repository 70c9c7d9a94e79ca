"""Seeded instance generators and the lemma suites run by ``glhbench verify``.

Each suite returns a :class:`SuiteResult` of named checks with the measured
numbers attached, so the CLI can print a report and set its exit status.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from glhbench.config import DEFAULT, Config
from glhbench.errors import InputError
from glhbench.fermionic_gaussian import (
    evolve,
    gaussian_energy,
    gaussian_statevector,
    pfaffian,
    random_orthogonal,
    vacuum_covariance,
)
from glhbench.feynman_kitaev import (
    ClockEncoding,
    build_fk,
    deterministic_circuit,
    history_state,
    nullity_residual,
    output_energy,
    pre_idle,
    r_fidelity_closed_form,
    r_state,
    random_circuit,
    RSetDescription,
    subset_sparse,
    verify_hardness_instance,
)
from glhbench.guiding_states import DenseState, FixedWeightState, geometric_bounds, optimal_amplitude_profile
from glhbench.operator_core import (
    LocalHamiltonian,
    PauliString,
    apply,
    fidelity,
    normalize,
    random_local_hamiltonian,
    random_state,
    spectrum,
)


@dataclass
class Check:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)


@dataclass
class SuiteResult:
    suite: str
    seed: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}


# --------------------------------------------------------------- generators


def random_triple(dim: int, rng: np.random.Generator, spread: float | None = None):
    """States ``a, b, c`` with ``a`` a random perturbation of ``b``."""
    b = random_state(dim, rng)
    c = random_state(dim, rng)
    s = rng.uniform(0, 1.5) if spread is None else spread
    a = normalize(b + s * random_state(dim, rng))
    return a, b, c


def geometric_violation(a, b, c, tol: float = 1e-12) -> tuple[bool, bool]:
    """Return ``(inside interval, small-X branch)`` for one triple."""
    X = float(np.linalg.norm(a - b))
    Y = min(1.0, float(abs(np.vdot(b, c)) ** 2))
    lo, hi = geometric_bounds(X, Y)
    F = float(abs(np.vdot(a, c)) ** 2)
    return lo - tol <= F <= hi + tol, X <= math.sqrt(Y)


def psd_local_hamiltonian(n: int, rng: np.random.Generator, conserving: bool = False,
                          n_terms: int | None = None) -> LocalHamiltonian:
    """Random 2-local Hamiltonian shifted to be positive semidefinite.

    ``conserving=True`` draws XX+YY hopping and ZZ/Z fields, which keep the
    Hamming weight fixed.
    """
    if conserving:
        paulis = []
        for i, j in combinations(range(n), 2):
            if rng.random() < 0.7:
                t = rng.normal()
                for P in ("XX", "YY"):
                    paulis.append(PauliString(t, P).embed(n, (i, j)))
                paulis.append(PauliString(rng.normal(), "ZZ").embed(n, (i, j)))
        for i in range(n):
            paulis.append(PauliString(rng.normal(), "Z").embed(n, (i,)))
        H = LocalHamiltonian.from_paulis(n, paulis)
    else:
        H = random_local_hamiltonian(n, 2, n_terms or 2 * n, rng)
    lam0 = float(spectrum(H).eigenvalues[0])
    return H.shifted(-lam0 + rng.uniform(0, 0.5))


def random_weight_k_state(n: int, k: int, rng: np.random.Generator, H: LocalHamiltonian | None = None):
    """Random weight-``k`` state, or (when ``H`` is given, half the time) the sector ground state."""
    from glhbench.energy_estimation import weight_k_basis, weight_k_project

    basis = weight_k_basis(n, k)
    if H is not None and rng.random() < 0.5:
        w, v = np.linalg.eigh(weight_k_project(H, k))
        amps = v[:, 0]
    else:
        m = int(rng.integers(1, len(basis) + 1))
        pick = rng.choice(len(basis), size=m, replace=False)
        amps = np.zeros(len(basis), dtype=complex)
        amps[pick] = random_state(m, rng)
    keep = np.abs(amps) > 1e-14
    strings = tuple(format(z, f"0{n}b") for z, k_ in zip(basis, keep) if k_)
    return FixedWeightState(n, k, strings, normalize(amps[keep]))


def constant_gap_instance(n: int, yes: bool, rng: np.random.Generator, a_s: float = 0.3, b_s: float = 0.5,
                          overlap: tuple = (0.5, 0.9)):
    """Unit-norm Hamiltonian whose shifted spectrum sits below ``a_s`` (Yes) or above ``b_s`` (No).

    Returns ``(H, guide, a, b, ground_overlap)`` with thresholds in the units
    of ``H``.  Yes guides mix the ground state with weight drawn from
    ``overlap``; No guides are random.
    """
    H0 = random_local_hamiltonian(n, 2, 2 * n, rng)
    spec = spectrum(H0)
    lo, hi = spec.eigenvalues[0], spec.eigenvalues[-1]
    s0, width = (0.1, 0.8) if yes else (0.55, 0.45)
    scale = 2 * width / (hi - lo)
    H = H0.scaled(scale).shifted(2 * s0 - 1 - scale * lo)
    phi0 = spec.vector(0)
    if yes:
        w = rng.uniform(*overlap)
        chi = random_state(phi0.size, rng)
        chi = normalize(chi - np.vdot(phi0, chi) * phi0)
        xi = math.sqrt(w) * phi0 + math.sqrt(1 - w) * chi
    else:
        xi = random_state(phi0.size, rng)
    xi = normalize(xi)
    return H, DenseState(xi), 2 * a_s - 1, 2 * b_s - 1, float(abs(np.vdot(phi0, xi)) ** 2)


def random_gaussian_pair(n: int, rng: np.random.Generator, n_terms: int = 6, max_weight: int = 4):
    """Random pure covariance and a random Pauli Hamiltonian of weight at most ``max_weight``."""
    M = evolve(vacuum_covariance(n), random_orthogonal(2 * n, rng))
    paulis = []
    for _ in range(n_terms):
        w = int(rng.integers(1, min(max_weight, n) + 1))
        support = tuple(sorted(int(q) for q in rng.choice(n, size=w, replace=False)))
        letters = "".join(rng.choice(list("XYZ"), size=w))
        paulis.append(PauliString(rng.normal(), letters).embed(n, support))
    return M, LocalHamiltonian.from_paulis(n, paulis)


def random_antisymmetric(dim: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.normal(size=(dim, dim))
    return A - A.T


# -------------------------------------------------------------------- suites


def suite_geometric(rng: np.random.Generator, trials: int = 2000) -> list:
    bad, small, large = 0, 0, 0
    for _ in range(trials):
        ok, branch = geometric_violation(*random_triple(int(rng.integers(2, 9)), rng))
        bad += not ok
        small += branch
        large += not branch
    return [Check("interval_holds", bad == 0, {"violations": bad, "trials": trials}),
            Check("both_branches", small > 0 and large > 0, {"small_x": small, "large_x": large})]


def suite_nullity(rng: np.random.Generator, count: int = 12, cfg: Config = DEFAULT) -> list:
    worst_null, worst_out = 0.0, 0.0
    for i in range(count):
        enc = ("unary", "one_hot")[i % 2]
        c = random_circuit(int(rng.integers(1, 3)), int(rng.integers(0, 2)), int(rng.integers(1, 4)), rng)
        c = pre_idle(c, int(rng.integers(0, 4)))
        inst = build_fk(c, enc, 10.0, cfg=cfg)
        eta = history_state(c, inst.encoding)
        worst_null = max(worst_null, nullity_residual(inst, eta))
        e_out = output_energy(inst, eta)
        worst_out = max(worst_out, abs(e_out * (c.K + 1) + c.acceptance_probability() - 1))
    return [Check("history_nullity", worst_null <= 1e-10, {"max_residual": worst_null}),
            Check("output_identity", worst_out <= 1e-10, {"max_error": worst_out})]


def sw_decay_measure(seed: int = 7, N: int = 10, exponents=(3, 4, 5)) -> dict:
    """``||g - eta||`` and the R-state fidelity bound on one rejecting instance."""
    rng = np.random.default_rng(seed)
    c = deterministic_circuit(2, 0, 2, False, rng)
    K = c.K + N
    reps = [verify_hardness_instance(c, "unary", 10.0 ** e * K ** 3, N) for e in exponents]
    d = [r.g_eta_distance for r in reps]
    return {
        "K": K,
        "distances": d,
        "ratios": [d[i] / d[i + 1] for i in range(len(d) - 1)],
        "fidelity_g": [r.r_fidelity_g for r in reps],
        "lower_bounds": [r.r_lower_bound for r in reps],
    }


def suite_sw_decay(rng: np.random.Generator) -> list:
    m = sw_decay_measure(seed=int(rng.integers(1 << 31)))
    ok_ratio = all(5 <= r <= 20 for r in m["ratios"])
    ok_bound = all(f >= lo - 1e-12 for f, lo in zip(m["fidelity_g"], m["lower_bounds"]))
    return [Check("decay_ratios", ok_ratio, {"distances": m["distances"], "ratios": m["ratios"]}),
            Check("fidelity_lower_bound", ok_bound, {"fidelity": m["fidelity_g"], "bound": m["lower_bounds"]})]


def r_fidelity(N: int, T: int, rng: np.random.Generator, enc: str = "unary") -> float:
    c = pre_idle(random_circuit(1, 0, T, rng), N)
    r = RSetDescription(c.start_bits, N, ClockEncoding(enc, c.K))
    eta = history_state(c, enc, sparse=True)
    return fidelity(subset_sparse(r_state(r)), eta)


def suite_fidelity_law(rng: np.random.Generator, pairs=((5, 2), (10, 3), (20, 4))) -> list:
    out = []
    for N, T in pairs:
        for enc in ("unary", "one_hot"):
            F = r_fidelity(N, T, rng, enc)
            want = r_fidelity_closed_form(N, T)
            out.append(Check(f"fidelity_{enc}_{N}_{T}", abs(F - want) <= 1e-12, {"measured": F, "closed_form": want}))
    return out


def suite_weight_k(rng: np.random.Generator, count: int = 40) -> list:
    from glhbench.energy_estimation import weight_k_bounds_check

    worst = np.inf
    for _ in range(count):
        n = int(rng.integers(3, 7))
        k = int(rng.integers(0, n + 1))
        H = psd_local_hamiltonian(n, rng, conserving=bool(rng.random() < 0.5))
        rep = weight_k_bounds_check(H, k, random_weight_k_state(n, k, rng, H))
        worst = min(worst, rep.lower_slack, rep.upper_slack, rep.mu_slack, rep.mu_upper_slack)
    return [Check("chains_hold", worst >= -1e-10, {"min_slack": worst, "pairs": count})]


def random_s_e(rng: np.random.Generator, n: int = 5):
    pool = [format(z, f"0{n}b") for z in range(2 ** n)]
    E = list(rng.choice(pool, size=int(rng.integers(1, 2 ** n)), replace=False))
    inside = list(rng.choice(E, size=int(rng.integers(1, len(E) + 1)), replace=False))
    rest = [s for s in pool if s not in E]
    extra = list(rng.choice(rest, size=int(rng.integers(0, min(3, len(rest)) + 1)), replace=False)) if rest else []
    return inside, E, inside + extra


def suite_uniform_optimality(rng: np.random.Generator, count: int = 8, with_extra: bool = False) -> list:
    excess, shortfall = -np.inf, 0.0
    for _ in range(count):
        S, E, S_extra = random_s_e(rng)
        rep = optimal_amplitude_profile(S_extra if with_extra else S, E, trials=10, rng=rng)
        excess = max(excess, rep.best_value - rep.uniform_value)
        shortfall = max(shortfall, rep.uniform_value - rep.best_value)
    return [Check("never_exceeds_uniform", excess <= 1e-9, {"max_excess": excess}),
            Check("reaches_uniform", shortfall <= 1e-6, {"max_shortfall": shortfall})]


def suite_gauss(rng: np.random.Generator, count: int = 30) -> list:
    worst_e, worst_pf = 0.0, 0.0
    for _ in range(count):
        n = int(rng.integers(1, 6))
        M, H = random_gaussian_pair(n, rng)
        psi = gaussian_statevector(M)
        dense = float(np.real(np.vdot(psi, apply(H, psi))))
        worst_e = max(worst_e, abs(gaussian_energy(M, H) - dense))
        A = random_antisymmetric(2 * int(rng.integers(1, 7)), rng)
        det = np.linalg.det(A)
        worst_pf = max(worst_pf, abs(pfaffian(A) ** 2 - det) / max(abs(det), 1e-300))
    return [Check("wick_energy", worst_e <= 1e-8, {"max_error": worst_e}),
            Check("pfaffian_squared", worst_pf <= 1e-8, {"max_relative_error": worst_pf})]


def suite_fk_lemmas(rng: np.random.Generator) -> list:
    out = suite_nullity(rng, count=6) + suite_fidelity_law(rng, pairs=((5, 2), (10, 3))) + suite_sw_decay(rng)
    for accept in (True, False):
        for enc in ("unary", "one_hot"):
            c = deterministic_circuit(2, 0, 2, accept, rng)
            K = c.K + 3
            rep = verify_hardness_instance(c, enc, 1e3 * K ** 3, 3)
            out.append(Check(f"hardness_{'yes' if accept else 'no'}_{enc}", rep.passed(),
                             {"ground_energy": rep.ground_energy, "a": rep.thresholds.a, "b": rep.thresholds.b,
                              "gap": rep.gap}))
    return out


SUITES = {
    "geometric": suite_geometric,
    "nullity": suite_nullity,
    "sw-decay": suite_sw_decay,
    "fidelity-law": suite_fidelity_law,
    "weight-k": suite_weight_k,
    "uniform-optimality": suite_uniform_optimality,
    "gauss": suite_gauss,
    "fk-lemmas": suite_fk_lemmas,
}


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return SuiteResult(name, seed, SUITES[name](rng))
