"""Random-restart dynamic solvers with Bayesian inference on basins of attraction."""

from .dynamics import (
    Solver,
    SolverConfig,
    TerminalOutcome,
    VectorFieldSpec,
    integrate,
    make_gradient_flow,
    make_picard_flow,
    projected_residual,
    solver_from,
)
from .geometry import (
    ConvexDomain,
    DomainError,
    InitialSampler,
    boundary_normal,
    contains,
    project,
    sample_initial,
    tangent_cone_project,
)
from .harness import (
    HnReport,
    OutcomeTally,
    RestartRecord,
    check_hn,
    empirical_basin_fractions,
    identify_outcomes,
    run_restarts,
)

__version__ = "0.1.0"
