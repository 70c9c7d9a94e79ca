"""Central tolerance and cap record.

Every module reads its defaults from :data:`DEFAULT`; callers that need
different caps build their own :class:`Config` with :func:`dataclasses.replace`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

CAP_ENV_VAR = "GLHBENCH_CAP_QUBITS"


@dataclass(frozen=True)
class Config:
    # caps
    qubit_cap: int = 16
    dense_cap: int = 12
    state_cap: int = 24
    subset_cap: int = 4096
    bond_cap: int = 64
    isometry_max_qubits: int = 3
    filter_degree_cap: int = 20000

    # tolerances
    hermitian_tol: float = 1e-12
    residual_tol: float = 1e-8
    degeneracy_tol: float = 1e-10
    norm_tol: float = 1e-10
    unitary_tol: float = 1e-10
    antisym_tol: float = 1e-10
    purity_tol: float = 1e-8

    # constants hidden by big-O statements
    sw_slack: float = 4.0
    repetition_constant: float = 3.0
    filter_degree_constant: float = 4.0


DEFAULT = Config()


def from_env(base: Config = DEFAULT) -> Config:
    """Return ``base`` with the qubit cap overridden from the environment, if set."""
    raw = os.environ.get(CAP_ENV_VAR)
    if not raw:
        return base
    cap = int(raw)
    if cap <= 0:
        raise ValueError(f"{CAP_ENV_VAR} must be positive, got {cap}")
    return replace(base, qubit_cap=cap)
