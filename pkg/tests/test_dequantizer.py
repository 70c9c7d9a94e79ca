import json
import math

import numpy as np
import pytest
from numpy.polynomial import chebyshev as npcheb

from glhbench.config import Config
from glhbench.dequantizer import (
    ChebyshevFilter,
    FilterSpec,
    apply_filter,
    build_filter,
    chebyshev_coefficients,
    decide_classical,
    filter_to_json,
    polynomial_filter,
    sampled_norm_estimate,
    shift_spectrum,
)
from glhbench.energy_estimation import decide_glh
from glhbench.errors import InputError, ValidationError
from glhbench.guiding_states import SubsetState
from glhbench.operator_core import LocalHamiltonian, PauliString, assemble, random_local_hamiltonian, rescale_unit
from glhbench.suites import constant_gap_instance


def unit_random(n, rng):
    H, _ = rescale_unit(random_local_hamiltonian(n, 2, 2 * n, rng))
    return H


def eig_apply(M, coeffs, xi):
    lam, V = np.linalg.eigh(M)
    return V @ (npcheb.chebval(2 * lam - 1, coeffs) * (V.conj().T @ xi))


class TestShift:
    def test_z(self):
        Hs, amap = shift_spectrum(LocalHamiltonian.from_paulis(1, [PauliString(1.0, "Z")]))
        assert np.allclose(np.linalg.eigvalsh(assemble(Hs)), [0, 1])
        assert amap.inverse(amap.forward(0.3)) == pytest.approx(0.3)

    def test_zero(self):
        Hs, _ = shift_spectrum(LocalHamiltonian(2, (), 1))
        assert np.allclose(np.linalg.eigvalsh(assemble(Hs)), 0.5)

    def test_random(self, rng):
        for _ in range(10):
            w = np.linalg.eigvalsh(assemble(shift_spectrum(unit_random(3, rng))[0]))
            assert w[0] >= -1e-12 and w[-1] <= 1 + 1e-12

    def test_norm_violation(self):
        with pytest.raises(ValidationError):
            shift_spectrum(LocalHamiltonian.from_paulis(1, [PauliString(2.0, "Z")]))


class TestFilter:
    def test_example(self):
        p = build_filter(0.2, 0.8, 0.1)
        assert p.degree <= 10
        assert p.grid_error() <= 0.1
        assert p.degree <= FilterSpec(0.2, 0.8, 0.1).degree_bound()

    def test_minimal_degree(self):
        p = build_filter(0.3, 0.5, 0.05)
        lower = ChebyshevFilter(p.spec, chebyshev_coefficients(lambda y: p.spec.step((y + 1) / 2), p.degree - 1))
        assert lower.grid_error() > 0.05

    def test_halving_error(self):
        for a, b in [(0.2, 0.8), (0.3, 0.5), (0.4, 0.45)]:
            d1 = build_filter(a, b, 0.1).degree
            d2 = build_filter(a, b, 0.05).degree
            assert d2 - d1 <= 4 / (b - a) * math.log(2) + 1

    def test_degree_grows_with_narrow_window(self):
        degs = [build_filter(0.5 - w / 2, 0.5 + w / 2, 0.1).degree for w in (0.4, 0.2, 0.1, 0.05)]
        assert degs == sorted(degs) and degs[-1] > degs[0]

    def test_degenerate(self):
        with pytest.raises(InputError):
            FilterSpec(0.0, 1.0, 0.1)
        with pytest.raises(InputError):
            FilterSpec(0.5, 0.4, 0.1)
        with pytest.raises(InputError):
            FilterSpec(0.2, 0.4, 0.6)

    def test_cap(self):
        with pytest.raises(InputError):
            build_filter(0.5, 0.5001, 0.01, cfg=Config(filter_degree_cap=64))

    def test_interpolation_exact_for_polynomials(self):
        c = chebyshev_coefficients(lambda y: 3 * y ** 3 - y + 2, 3)
        assert np.allclose(npcheb.cheb2poly(c), [2, -1, 0, 3])

    def test_json(self):
        p = build_filter(0.2, 0.6, 0.1)
        back = ChebyshevFilter.from_json(json.loads(filter_to_json(p)))
        assert np.allclose(back.coefficients, p.coefficients)
        assert set(json.loads(filter_to_json(p))) == {"a", "b", "sup_error", "degree", "coefficients"}


class TestApply:
    def test_constant(self, rng):
        Hs = shift_spectrum(unit_random(3, rng))[0]
        xi = np.full(8, 8 ** -0.5)
        v, products = apply_filter(Hs, polynomial_filter([1.0]), xi)
        assert np.allclose(v, xi) and products == 0

    def test_identity_polynomial(self, rng):
        Hs = shift_spectrum(unit_random(3, rng))[0]
        xi = np.full(8, 8 ** -0.5)
        # x = (T_0(y) + T_1(y)) / 2 with y = 2x - 1
        v, products = apply_filter(Hs, polynomial_filter([0.5, 0.5]), xi)
        assert np.allclose(v, assemble(Hs) @ xi)
        assert products == 1

    def test_vs_eigenbasis(self, rng):
        Hs = shift_spectrum(unit_random(4, rng))[0]
        M = assemble(Hs)
        coeffs = rng.normal(size=21)
        xi = rng.normal(size=16) + 1j * rng.normal(size=16)
        xi /= np.linalg.norm(xi)
        calls = []
        mul = lambda v: calls.append(1) or M @ v
        v, products = apply_filter(mul, polynomial_filter(coeffs), xi)
        assert np.abs(v - eig_apply(M, coeffs, xi)).max() <= 1e-8
        assert products == len(calls) == 20

    def test_all_operator_forms(self, rng):
        Hs = shift_spectrum(unit_random(3, rng))[0]
        p = build_filter(0.3, 0.6, 0.1)
        xi = np.eye(8)[3]
        a = apply_filter(Hs, p, xi)[0]
        b = apply_filter(assemble(Hs), p, xi)[0]
        assert np.allclose(a, b)

    def test_dimension_mismatch(self, rng):
        Hs = shift_spectrum(unit_random(3, rng))[0]
        with pytest.raises(InputError):
            apply_filter(Hs, polynomial_filter([1.0, 0.1]), np.eye(4)[0])


class TestDecide:
    def test_no_instance(self, rng):
        H, g, a, b, _ = constant_gap_instance(4, False, rng)
        rep = decide_classical(H, g, a, b, 0.5)
        assert rep.decision == "No"
        assert rep.details["nu"] <= 0.5 / 4

    def test_yes_instance(self, rng):
        H, g, a, b, ov = constant_gap_instance(4, True, rng, overlap=(0.5, 0.5))
        assert ov == pytest.approx(0.5)
        rep = decide_classical(H, g, a, b, 0.5)
        assert rep.decision == "Yes"
        assert rep.details["nu"] >= math.sqrt(0.5) - 0.125

    def test_promise_violation(self, rng):
        H, _, a, b, _ = constant_gap_instance(4, True, rng)
        # the top eigenvector has no weight anywhere below the threshold
        top = np.linalg.eigh(assemble(H))[1][:, -1]
        rep = decide_classical(H, top, a, b, 0.5, check_promise=True)
        assert rep.decision == "No"
        assert rep.details["promise_violation"]

    def test_invalid(self):
        rep = decide_classical(LocalHamiltonian(1, (), 1), np.eye(2)[0], 0.2, 0.1, 0.5)
        assert rep.decision == "Invalid"

    def test_agrees_with_quantum_route(self, rng):
        for yes in (True, False):
            for _ in range(3):
                H, g, a, b, _ = constant_gap_instance(3, yes, rng)
                assert decide_classical(H, g, a, b, 0.5).decision == decide_glh(H, g, a, b, seed=2).decision


class TestSampled:
    def test_constant_one(self, rng):
        Hs = shift_spectrum(unit_random(3, rng))[0]
        g = SubsetState(3, ("000", "011", "110"))
        est = sampled_norm_estimate(Hs, g, polynomial_filter([1.0]), 2000, rng)
        assert abs(est.estimate - 1) <= max(3 * est.stderr, 1e-12)

    def test_against_deterministic(self, rng):
        Hs = shift_spectrum(unit_random(3, rng))[0]
        g = SubsetState(3, ("000", "011", "101", "110"))
        p = build_filter(0.4, 0.6, 0.1)
        xi = np.array([0.5 if format(z, "03b") in g.strings else 0 for z in range(8)])
        exact = np.linalg.norm(apply_filter(assemble(Hs), p, xi)[0]) ** 2
        est = sampled_norm_estimate(Hs, g, p, 100_000, rng)
        assert abs(est.estimate - exact) <= 3 * est.stderr + 1e-12

    def test_zero_case(self, rng):
        H, g, a, b, _ = constant_gap_instance(3, False, rng)
        Hn, f = rescale_unit(H)
        Hs = shift_spectrum(Hn)[0]
        # filter vanishing on the whole shifted spectrum [0.55, 1]
        p = build_filter(0.5 * (a / f + 1), 0.5 * (b / f + 1), 1e-6)
        sub = SubsetState(3, tuple(format(z, "03b") for z in range(8)))
        est = sampled_norm_estimate(Hs, sub, p, 500, rng)
        assert abs(est.estimate) <= 3 * est.stderr + 1e-9
