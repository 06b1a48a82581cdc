"""DC programming (DCA) solver for the constrained two-dimensional
non-guillotine cutting problem, with an exact branch-and-bound oracle."""

from .dca import DcaConfig, DcaResult, run_dca, solve_instance
from .exact import ExactResult, solve_brute_force, solve_exact_bb
from .formulation import Formulation, build_A, build_B, model_stats
from .io import feasibility_check, parse_canonical, parse_ngcut, read_instance, render_ascii, render_svg
from .lp import solve_lp
from .model import Instance, Piece, validate_instance

__version__ = "0.1.0"

__all__ = [
    "DcaConfig", "DcaResult", "ExactResult", "Formulation", "Instance", "Piece",
    "build_A", "build_B", "feasibility_check", "model_stats", "parse_canonical",
    "parse_ngcut", "read_instance", "render_ascii", "render_svg", "run_dca",
    "solve_brute_force", "solve_exact_bb", "solve_instance", "solve_lp",
    "validate_instance",
]
