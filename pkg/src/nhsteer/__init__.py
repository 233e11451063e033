"""Steering of nonholonomic integrator models with orthogonal-polynomial inputs."""

from .errors import (
    AmbiguityError,
    CapabilityError,
    ConvergenceError,
    DomainError,
    IntegrabilityError,
    NhsteerError,
    PlannerError,
    SingularityError,
)
from .orthopoly import (
    BasisElement,
    Harmonic,
    InputSignal,
    Term,
    WeightFn,
    basis_signal,
    combine_signals,
    constant_signal,
    evaluate,
    inner_product,
    integrate,
    integrate_smooth,
    l1_norm,
    scale_signal,
    weight_fn,
)
from .dynamics import (
    GnhiState,
    NhiState,
    Rotation,
    Trajectory,
    coupling_displacement,
    exp_rotation,
    hat,
    integrate_gnhi,
    integrate_nhi,
    integrate_so3,
    log_rotation,
    vee,
)
from .steering import (
    SteeringPlan,
    pair_signals,
    plan_gnhi,
    plan_nhi,
    scale_pair,
    simulate_plan,
)
from .optimal_energy import (
    cheb_extremal_inputs,
    cheb_optimal_inputs,
    el_residual,
    solution_to_plan,
    weighted_cost,
)
from .fuel_l1 import compare_families, fuel_constants, fuel_min, fuel_min_lp
from .so3_control import (
    AttitudePlan,
    constant_omega_plan,
    costate_residual,
    so3_sl_residual,
    underactuated_plan,
    weighted_rate_plan,
)

__all__ = [
    "NhsteerError",
    "DomainError",
    "CapabilityError",
    "IntegrabilityError",
    "PlannerError",
    "ConvergenceError",
    "AmbiguityError",
    "SingularityError",
    "BasisElement",
    "Term",
    "InputSignal",
    "WeightFn",
    "Harmonic",
    "evaluate",
    "inner_product",
    "integrate",
    "integrate_smooth",
    "l1_norm",
    "basis_signal",
    "constant_signal",
    "scale_signal",
    "combine_signals",
    "weight_fn",
    "NhiState",
    "GnhiState",
    "Rotation",
    "Trajectory",
    "integrate_nhi",
    "integrate_gnhi",
    "integrate_so3",
    "coupling_displacement",
    "hat",
    "vee",
    "exp_rotation",
    "log_rotation",
    "SteeringPlan",
    "pair_signals",
    "plan_nhi",
    "plan_gnhi",
    "scale_pair",
    "simulate_plan",
    "cheb_extremal_inputs",
    "cheb_optimal_inputs",
    "el_residual",
    "solution_to_plan",
    "weighted_cost",
    "fuel_constants",
    "fuel_min",
    "fuel_min_lp",
    "compare_families",
    "AttitudePlan",
    "constant_omega_plan",
    "weighted_rate_plan",
    "underactuated_plan",
    "costate_residual",
    "so3_sl_residual",
]

__version__ = "0.1.0"
