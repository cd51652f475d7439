"""Mean-field opinion dynamics on social graphs with closed-form feedback control."""

from .control import (
    ComplexRootsError,
    DomainError,
    ControlContext,
    ControlSolution,
    MultiplierModel,
    OptimalPolicy,
    coefficients,
    f_value,
    foc_residual,
    optimal_control,
    sensitivity_case1_dxi,
    sensitivity_case2_dxj,
)
from .cost import CostReport, gateaux_derivative, running_cost, total_cost, variational_step
from .dynamics import (
    PicardResult,
    SimConfig,
    Trajectory,
    integrating_factor,
    picard_law_iteration,
    simulate,
    simulate_ensemble,
    step,
    write_trajectory_csv,
)
from .graph import (
    Graph,
    GraphSpec,
    build_clustered,
    build_erdos_renyi,
    build_explicit,
    load_graph_csv,
    radius_neighborhood,
)
from .kernel import KernelParams, d2phi_dxi2, dphi_dxi, mean_field_drift, phi
from .measure import EmpiricalMeasure, kde, silverman_bandwidth, wasserstein2_1d

__version__ = "0.1.0"

__all__ = [
    "ComplexRootsError",
    "DomainError",
    "ControlContext",
    "ControlSolution",
    "CostReport",
    "EmpiricalMeasure",
    "Graph",
    "GraphSpec",
    "KernelParams",
    "MultiplierModel",
    "OptimalPolicy",
    "PicardResult",
    "SimConfig",
    "Trajectory",
    "build_clustered",
    "build_erdos_renyi",
    "build_explicit",
    "coefficients",
    "d2phi_dxi2",
    "dphi_dxi",
    "f_value",
    "foc_residual",
    "gateaux_derivative",
    "integrating_factor",
    "kde",
    "load_graph_csv",
    "mean_field_drift",
    "optimal_control",
    "phi",
    "picard_law_iteration",
    "radius_neighborhood",
    "running_cost",
    "sensitivity_case1_dxi",
    "sensitivity_case2_dxj",
    "silverman_bandwidth",
    "simulate",
    "simulate_ensemble",
    "step",
    "total_cost",
    "variational_step",
    "wasserstein2_1d",
    "write_trajectory_csv",
]
