"""Self-contained linear cone programming: data model, kernels, solver."""

from .kernels import NotPsd, chol_psd, sym_eig
from .program import (
    ConeProgram,
    Free,
    Nonneg,
    ProgramBuilder,
    PsdBlock,
    block_len,
    psd_unit_basis,
)
from .solver import Solution, SolverOptions, Status, solve

__all__ = [
    "ConeProgram",
    "Free",
    "Nonneg",
    "NotPsd",
    "ProgramBuilder",
    "PsdBlock",
    "Solution",
    "SolverOptions",
    "Status",
    "block_len",
    "chol_psd",
    "psd_unit_basis",
    "solve",
    "sym_eig",
]
