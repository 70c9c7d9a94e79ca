"""Numerical workbench for guided local Hamiltonian problems.

Compiles circuits into Feynman-Kitaev Hamiltonians, builds and prepares
guiding states, and decides ground-energy promises either through an
ideal phase-estimation model or a classical polynomial filter.
"""

from glhbench.config import DEFAULT, Config
from glhbench.errors import (
    DegenerateInputError,
    GLHError,
    InputError,
    SizeError,
    UnsupportedError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "Config",
    "DEFAULT",
    "GLHError",
    "InputError",
    "SizeError",
    "ValidationError",
    "DegenerateInputError",
    "UnsupportedError",
]
