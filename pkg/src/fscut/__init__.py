"""Minimum distance of binary linear codes by branch-and-cut with forbidden-set cuts."""

from .bnb import BnbConfig, MilpResult, SolveStats, solve_milp
from .gf2 import Gf2Matrix, Gf2Vector, min_weight_oracle, nullspace_basis, rref
from .models import CodeInstance, SeparationPoint, normalize_instance
from .separation import FsCut, ParityCheckPool, exact_rpc_separation, orchestrate
from .solver import solve_min_distance, solve_mld

__all__ = [
    "BnbConfig", "MilpResult", "SolveStats", "solve_milp",
    "Gf2Matrix", "Gf2Vector", "min_weight_oracle", "nullspace_basis", "rref",
    "CodeInstance", "SeparationPoint", "normalize_instance",
    "FsCut", "ParityCheckPool", "exact_rpc_separation", "orchestrate",
    "solve_min_distance", "solve_mld",
]
