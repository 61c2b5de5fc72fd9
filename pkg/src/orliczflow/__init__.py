"""Minimizing-movement solvers for doubly nonlinear flows alpha(x, u_t) + dE(u) = f
in Musielak-Orlicz spaces on a 1-D grid."""
from .energies import Energy, EnergyKind
from .grid import Grid, TimeGrid, make_grid, node_profile
from .modular import ModularSpace, luxemburg_norm
from .phi import PhiFunction, conjugate, delta2_constant, k0_lower_bound, validate_assumption_alpha
from .proximal import ProximalOperator, moreau_yosida_value, resolvent, yosida
from .solver import SolverConfig, minimize
from .stepper import Mode, Nonlinearity, Problem, solve, verify_hp_M

__version__ = "0.1.0"

__all__ = [
    "Energy", "EnergyKind", "Grid", "TimeGrid", "make_grid", "node_profile", "ModularSpace", "luxemburg_norm",
    "PhiFunction", "conjugate", "delta2_constant", "k0_lower_bound", "validate_assumption_alpha",
    "ProximalOperator", "moreau_yosida_value", "resolvent", "yosida", "SolverConfig", "minimize", "Mode",
    "Nonlinearity", "Problem", "solve", "verify_hp_M",
]
