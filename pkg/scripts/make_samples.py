"""Regenerate the sample inputs in ``data/``."""

import json
from pathlib import Path

import numpy as np

from glhbench.fermionic_gaussian import covariance_to_json
from glhbench.feynman_kitaev import Gate, GateCircuit, circuit_to_json
from glhbench.guiding_states import SubsetState, multi_alphabet_example, state_to_json, subset_to_mps
from glhbench.operator_core import hamiltonian_to_json
from glhbench.suites import constant_gap_instance, random_gaussian_pair

OUT = Path(__file__).resolve().parent.parent / "data"
X = np.array([[0, 1], [1, 0]])
Z = np.diag([1, -1])
CNOT = np.eye(4)[[0, 1, 3, 2]]


def write(name, obj):
    (OUT / name).write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    write("circuit_accept.json", circuit_to_json(GateCircuit("00", 0, (Gate((0,), X), Gate((0, 1), CNOT)))))
    write("circuit_reject.json", circuit_to_json(GateCircuit("00", 0, (Gate((0,), Z), Gate((0, 1), CNOT)))))
    sub = SubsetState(5, ("00110", "10101", "11000", "01111", "10011"))
    write("scss.json", state_to_json(sub))
    write("sigma_scess.json", state_to_json(multi_alphabet_example()))
    write("mps.json", state_to_json(subset_to_mps(sub)))
    rng = np.random.default_rng(2024)
    M, H = random_gaussian_pair(4, rng)
    write("gaussian_state.json", {"family": "gaussian", "covariance": M.tolist()})
    write("gaussian_covariance.json", covariance_to_json(M))
    write("gaussian_hamiltonian.json", hamiltonian_to_json(H))
    for label, yes in (("yes", True), ("no", False)):
        H, g, a, b, ov = constant_gap_instance(5, yes, rng)
        meta = {"a": a, "b": b, "overlap": 0.5, "measured_overlap": ov, "expected": "Yes" if yes else "No"}
        write(f"gap_{label}.json", {"hamiltonian": hamiltonian_to_json(H), "metadata": meta})
        write(f"gap_{label}_guide.json", state_to_json(g))


if __name__ == "__main__":
    main()
