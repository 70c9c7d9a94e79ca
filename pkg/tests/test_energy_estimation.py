import json
import math

import numpy as np
import pytest

from glhbench.errors import InputError, SizeError, ValidationError
from glhbench.energy_estimation import (
    DecisionReport,
    QPEConfig,
    decide_glh,
    estimate_ground,
    outcome_distribution,
    qpe_sample,
    round_to_grid,
    shifted_problem,
    weight_k_basis,
    weight_k_bounds_check,
    weight_k_project,
)
from glhbench.feynman_kitaev import build_fk, deterministic_circuit, history_state, pre_idle, yes_no_thresholds
from glhbench.guiding_states import chi_square_test
from glhbench.operator_core import LocalHamiltonian, PauliString, assemble, random_local_hamiltonian, spectrum
from glhbench.suites import psd_local_hamiltonian, random_weight_k_state


def diag_ham(values):
    """Two-qubit diagonal operator with the given spectrum, in [0, 1]."""
    z = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]]) / 4
    c = z @ np.asarray(values, dtype=float)
    return LocalHamiltonian.from_paulis(2, [PauliString(c[0], "II"), PauliString(c[1], "ZI"),
                                            PauliString(c[2], "IZ"), PauliString(c[3], "ZZ")])


H4 = diag_ham([0.1, 0.35, 0.6, 0.9])


class TestGrid:
    def test_nearest(self):
        assert round_to_grid(0.26, 0.1) == pytest.approx(0.3)
        assert round_to_grid(0.24, 0.1) == pytest.approx(0.2)

    def test_tie_down(self):
        assert round_to_grid(0.25, 0.5) == 0.0
        assert round_to_grid(0.75, 0.5) == 0.5


class TestSample:
    def test_eigenvector_input(self, rng):
        xi = np.zeros(4)
        xi[0] = 1
        s = qpe_sample(H4, xi, 0.05, rng, size=200)
        assert np.all(s == round_to_grid(0.1, 0.05))

    def test_two_outcome(self, rng):
        xi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        s = qpe_sample(H4, xi, 0.05, rng, size=10_000)
        assert np.mean(s == round_to_grid(0.1, 0.05)) == pytest.approx(0.5, abs=0.01)

    def test_chi_square(self, rng):
        H = random_local_hamiltonian(3, 2, 4, rng)
        Hn = H.scaled(0.5 / np.abs(np.linalg.eigvalsh(assemble(H))).max()).shifted(0.5)
        xi = rng.normal(size=8) + 1j * rng.normal(size=8)
        xi /= np.linalg.norm(xi)
        spec = spectrum(Hn)
        lam, p = outcome_distribution(spec, xi)
        idx = rng.choice(8, size=20_000, p=p)
        assert chi_square_test(idx, p)["passed"]
        draws = qpe_sample(spec, xi, 1e-9, rng, size=20_000)
        hits = np.array([np.argmin(np.abs(lam - d)) for d in draws])
        assert chi_square_test(hits, p)["passed"]

    def test_unnormalized(self, rng):
        with pytest.raises(ValidationError):
            qpe_sample(H4, np.ones(4), 0.1, rng)

    def test_spectrum_range(self, rng):
        with pytest.raises(ValidationError):
            qpe_sample(diag_ham([-1, 0, 0, 1]), np.eye(4)[0], 0.1, rng)

    def test_fk_ground_bin(self, rng):
        c = pre_idle(deterministic_circuit(1, 0, 2, True, rng), 2)
        inst = build_fk(c, "unary", 1e3 * c.K ** 3)
        H = inst.hamiltonian()
        prob = shifted_problem(H, 0.0, 0.1)
        spec = prob.spectrum
        eta = history_state(c, "unary")
        overlap = abs(np.vdot(spec.vector(0), eta)) ** 2
        lam, p = outcome_distribution(spec, eta)
        draws = rng.choice(lam.size, size=20_000, p=p)
        freq = np.mean(draws == 0)
        assert abs(freq - overlap) <= 3 * math.sqrt(overlap * (1 - overlap) / 20_000)


class TestEstimate:
    def test_delta_one(self, rng):
        cfg = QPEConfig(eps=0.05, eta=0.1, delta=1.0)
        assert cfg.repetitions == math.ceil(3 * math.log(10))
        xi = np.eye(4)[0]
        lam, rep = estimate_ground(H4, xi, cfg, rng)
        assert lam == round_to_grid(0.1, 0.05)
        assert rep.repetitions == cfg.repetitions

    def test_halving_delta(self):
        a = QPEConfig(eps=0.1, eta=0.01, delta=0.5, c_r=4)
        b = QPEConfig(eps=0.1, eta=0.01, delta=0.25, c_r=4)
        exact = lambda d: 4 / d * math.log(100)
        assert a.repetitions == math.ceil(exact(0.5))
        assert b.repetitions == math.ceil(2 * exact(0.5))

    def test_cost_formula(self):
        cfg = QPEConfig(eps=0.1, eta=0.2, delta=0.5)
        assert cfg.per_run_cost * cfg.repetitions == pytest.approx(cfg.cost)
        assert cfg.per_run_cost * 3 / 0.5 * math.log(5) == pytest.approx(math.log(5) ** 2 / (0.1 * 0.2 * 0.25))

    def test_cost_monotone(self):
        base = QPEConfig(eps=0.1, eta=0.2, delta=0.5).cost
        assert QPEConfig(eps=0.05, eta=0.2, delta=0.5).cost > base
        assert QPEConfig(eps=0.1, eta=0.1, delta=0.5).cost > base
        assert QPEConfig(eps=0.1, eta=0.2, delta=0.25).cost > base

    def test_soundness(self, rng):
        xi = np.array([0.5, 0.5, 0.5, 0.5])
        for _ in range(50):
            lam, _ = estimate_ground(H4, xi, QPEConfig(eps=0.07, delta=0.25), rng)
            assert lam >= 0.1 - 0.07

    def test_failure_rate(self, rng):
        xi = np.array([np.sqrt(0.5), 0.5, 0.5, 0])
        cfg = QPEConfig(eps=0.05, eta=0.1, delta=0.5)
        fails = sum(abs(estimate_ground(H4, xi, cfg, rng)[0] - 0.1) > 0.05 for _ in range(500))
        assert fails / 500 <= 0.1 + 2 * math.sqrt(0.1 * 0.9 / 500)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            QPEConfig(eps=0)
        with pytest.raises(ValidationError):
            QPEConfig(eps=0.1, delta=0)


class TestDecide:
    @pytest.mark.parametrize("accept", [True, False])
    @pytest.mark.parametrize("kind", ["unary", "one_hot"])
    def test_fk(self, accept, kind, rng):
        c = pre_idle(deterministic_circuit(1, 1, 2, accept, rng), 3)
        delta = 1e3 * c.K ** 3
        H = build_fk(c, kind, delta).hamiltonian()
        thr = yes_no_thresholds(c.K, delta)
        rep = decide_glh(H, history_state(c, kind), thr.a, thr.b, seed=1)
        assert rep.decision == ("Yes" if accept else "No")

    def test_invalid(self):
        rep = decide_glh(H4, np.eye(4)[0], 0.3, 0.3)
        assert rep.decision == "Invalid"

    def test_report_json(self):
        rep = decide_glh(H4, np.eye(4)[0], -0.5, 0.5, seed=4)
        obj = json.loads(rep.to_json())
        assert {"decision", "estimate", "repetitions", "cost", "seed"} <= set(obj)
        assert rep.cost == pytest.approx(rep.repetitions * QPEConfig(eps=rep.details["eps_shifted"]).per_run_cost)

    def test_reproducible(self):
        xi = np.full(4, 0.5)
        a = decide_glh(H4, xi, 0.0, 0.5, seed=9)
        b = decide_glh(H4, xi, 0.0, 0.5, seed=9)
        assert a.to_json() == b.to_json()

    def test_bad_decision(self):
        with pytest.raises(ValidationError):
            DecisionReport("Maybe", None, 1, 0.0)


class TestWeightK:
    def test_basis_order(self):
        assert weight_k_basis(3, 1) == [1, 2, 4]

    def test_extremes(self, rng):
        H = random_local_hamiltonian(4, 2, 5, rng)
        M = assemble(H)
        assert np.allclose(weight_k_project(H, 0, ), [[M[0, 0]]])
        assert np.allclose(weight_k_project(H, 4), [[M[15, 15]]])

    def test_projector_oracle(self, rng):
        H = random_local_hamiltonian(5, 2, 6, rng)
        M = assemble(H)
        idx = [z for z in range(32) if bin(z).count("1") == 2]
        Hk = weight_k_project(H, 2)
        assert np.allclose(Hk, Hk.conj().T)
        assert np.allclose(np.linalg.eigvalsh(Hk), np.linalg.eigvalsh(M[np.ix_(idx, idx)]), atol=1e-10)

    def test_range_and_cap(self, rng):
        from glhbench.config import Config

        H = random_local_hamiltonian(4, 2, 3, rng)
        with pytest.raises(InputError):
            weight_k_project(H, 5)
        with pytest.raises(SizeError):
            weight_k_project(H, 2, cfg=Config(subset_cap=5))

    def test_ground_in_sector(self, rng):
        H = psd_local_hamiltonian(4, rng, conserving=True)
        lam, vecs = np.linalg.eigh(assemble(H))
        # pick a sector whose restricted minimum equals the global one
        for k in range(5):
            if abs(np.linalg.eigvalsh(weight_k_project(H, k))[0] - lam[0]) <= 1e-9:
                break
        Hk = weight_k_project(H, k)
        w, v = np.linalg.eigh(Hk)
        psi = np.zeros(16, dtype=complex)
        psi[weight_k_basis(4, k)] = v[:, 0]
        rep = weight_k_bounds_check(H, k, psi)
        assert rep.mu0 == pytest.approx(rep.lambda0, abs=1e-10)
        assert rep.holds()

    def test_zero_overlap(self, rng):
        H = LocalHamiltonian.from_paulis(3, [PauliString(1.0, "ZII"), PauliString(1.0, "IZI"),
                                             PauliString(1.0, "IIZ"), PauliString(3.0, "III")])
        # ground state is |111>, so weight 1 has no overlap
        psi = np.zeros(8)
        psi[4] = 1
        rep = weight_k_bounds_check(H, 1, psi)
        assert rep.overlap == 0
        assert rep.lambda0 + rep.gap <= rep.energy + 1e-12

    def test_random_pairs(self, rng):
        for _ in range(20):
            H = psd_local_hamiltonian(4, rng, conserving=True)
            k = int(rng.integers(0, 5))
            assert weight_k_bounds_check(H, k, random_weight_k_state(4, k, rng, H)).holds()

    def test_wrong_sector(self):
        with pytest.raises(ValidationError):
            weight_k_bounds_check(H4, 1, np.array([1, 0, 0, 1]) / np.sqrt(2))
