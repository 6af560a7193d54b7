"""Seedable simulator and fluid-limit solver for community bail fund balance processes."""

from .distributions import (
    DistKind,
    DistSpec,
    LipschitzBound,
    ModelParams,
    ScalingSpec,
    blocking_example2_params,
    dist_cdf,
    dist_mean,
    example1_params,
    lipschitz_bound_H,
    truncated_mean_H,
)
from .paths import (
    CadlagPath,
    DomainMismatch,
    EventKind,
    PathEvent,
    read_path_csv,
    running_infimum,
    skorokhod_map,
    sup_norm_distance,
    write_path_csv,
)
from .simulate import (
    EventStream,
    ModelKind,
    SimulationResult,
    Totals,
    example_table_stream,
    format_scenario,
    generate_stream,
    parse_scenario,
    simulate,
    simulate_coupled,
    skorokhod_equivalence_check,
)
from .fluid import (
    FluidCurve,
    FluidModel,
    SteadyStateCase,
    SteadyStateVerdict,
    StepTooLarge,
    blocking_fluid,
    blocking_refinement_error,
    expected_value_inf,
    inf_fluid,
    skorokhod_fluid,
    steady_state_classify,
)
from .analysis import (
    CompensatorDiagnostic,
    ConvergenceReport,
    OrderingReport,
    UnsupportedKind,
    compensator_diagnostic,
    convergence_study,
    mean_variance_study,
    ordering_study,
    sup_norm_path_vs_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
