"""Configuration-LP tools and an 11/6-guarantee local search for Restricted Assignment."""

from ._kernels import BACKEND
from .config_lp import (
    Configuration,
    DualSolution,
    LPResult,
    enumerate_configs,
    lp_feasible,
    opt_star,
    verify_dual,
    verify_primal,
)
from .dual_witness import build_witness, certify
from .errors import GuardExceeded, InvariantViolation, IterationCapExceeded, NotStuckError
from .estimate import estimate
from .instance import Instance, InstanceError, classify, generate_random, parse_instance, scale
from .local_search import R, extend, run, step
from .oracle import brute_force_opt, brute_force_potential_moves

__all__ = [
    "BACKEND",
    "Configuration",
    "DualSolution",
    "GuardExceeded",
    "Instance",
    "InstanceError",
    "InvariantViolation",
    "IterationCapExceeded",
    "LPResult",
    "NotStuckError",
    "R",
    "brute_force_opt",
    "brute_force_potential_moves",
    "build_witness",
    "certify",
    "classify",
    "enumerate_configs",
    "estimate",
    "extend",
    "generate_random",
    "lp_feasible",
    "opt_star",
    "parse_instance",
    "run",
    "step",
    "scale",
    "verify_dual",
    "verify_primal",
]
