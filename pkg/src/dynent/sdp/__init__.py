"""Self-contained semidefinite programming: solver, modeling layer and standard form."""
from .model import Expr, Program, Solution, SolverError
from .solver import ConeProblem, ConeResult, solve_cone
from .standard import HermitianSdp, SdpSolution, embed_real, project_embedded, solve, verify
from .textio import dump, dumps, load, loads

__all__ = [
    "ConeProblem", "ConeResult", "Expr", "HermitianSdp", "Program", "SdpSolution", "Solution",
    "SolverError", "dump", "dumps", "embed_real", "load", "loads", "project_embedded", "solve",
    "solve_cone", "verify",
]
