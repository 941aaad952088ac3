from .atoms import Atom, AtomFamily, AtomKind, ProgressionConstruction, make_atoms, progression_shifts
from .primal import PrimalResult, primal_search
from .programs import (
    DEFAULT_SOLVER, LPCertificate, LPProblem, LPResult, SigmaSupResult, SolverConfig, SolverMode, default_a_grid,
    gamma_lp, lp_certificate, lp_solve, sigma_lp, sigma_sup
)
from .simplex import LPSolution, LPStatus, lp_minimize

__all__ = (
    "Atom",
    "AtomFamily",
    "AtomKind",
    "DEFAULT_SOLVER",
    "LPCertificate",
    "LPProblem",
    "LPResult",
    "LPSolution",
    "LPStatus",
    "PrimalResult",
    "ProgressionConstruction",
    "SigmaSupResult",
    "SolverConfig",
    "SolverMode",
    "default_a_grid",
    "gamma_lp",
    "lp_certificate",
    "lp_minimize",
    "lp_solve",
    "make_atoms",
    "primal_search",
    "progression_shifts",
    "sigma_lp",
    "sigma_sup",
)
