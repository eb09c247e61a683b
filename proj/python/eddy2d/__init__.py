"""2-D eddy-current FEM with thin inductors."""

from ._core import (
    ConfigError,
    DomainSpec,
    GeometryError,
    MaterialParams,
    Mesh,
    RunConfig,
    SolverError,
    __version__,
    analytic_limit_solution,
    build_domain,
    default_domain,
    fit_rate,
    region_average,
    run_sweep,
    run_verify,
    solve_epsilon,
    solve_limit,
    total_currents,
    weight_rho,
)

__all__ = [
    "ConfigError",
    "DomainSpec",
    "GeometryError",
    "MaterialParams",
    "Mesh",
    "RunConfig",
    "SolverError",
    "__version__",
    "analytic_limit_solution",
    "build_domain",
    "default_domain",
    "fit_rate",
    "region_average",
    "run_sweep",
    "run_verify",
    "solve_epsilon",
    "solve_limit",
    "total_currents",
    "weight_rho",
]
