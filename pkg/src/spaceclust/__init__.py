"""Spatially coherent clustering of pairwise interaction data.

Groups the nodes of a dense interaction network while nudging the grouping
to vary smoothly over a second, structural network on the same nodes.  The
workflow: build or simulate the two networks, fit a penalized mixture over
all node pairs by classification EM, trace the penalty strength to where
the partition stabilizes, and pick the number of groups by ICL.
"""

from .networks import (
    InteractionNetwork,
    Partition,
    SoftAssignment,
    StructuralNetwork,
    laplacian,
    local_variance,
    penalty,
)
from .emissions import (
    BERNOULLI,
    FAMILY_KINDS,
    GAUSSIAN,
    INFLATED_GAUSSIAN,
    POISSON,
    EmissionFamily,
    ModelParams,
    NumericalError,
    complete_loglik,
    log_density,
    log_density_matrix,
    log_density_pairs,
    m_step,
)
from .vem import (
    FitConfig,
    FitResult,
    classify,
    e_step,
    init_partition,
    penalized_objective,
    run_vem,
)
from .selection import (
    LambdaPath,
    ModelSearch,
    PathConfig,
    default_lam0,
    icl,
    lambda_path,
    parameter_count,
    report_rows,
    search_models,
    select_model,
    spectral_partition,
)
from .simulate import (
    SimDesign,
    SimReplicate,
    assign_and_swap,
    gabriel_graph,
    generate_replicate,
    make_two_component,
    sample_interactions,
    spatial_discordance,
)
from .metrics import (
    adjusted_rand,
    between_group_mean,
    group_distance_matrix,
    within_group_mean,
)
from .geo import (
    EARTH_RADIUS_KM,
    OccurrenceTable,
    build_structural,
    great_circle_km,
    jaccard_network,
    structural_from_distances,
)
from . import io

__version__ = "0.1.0"

__all__ = [
    "InteractionNetwork",
    "StructuralNetwork",
    "Partition",
    "SoftAssignment",
    "laplacian",
    "local_variance",
    "penalty",
    "GAUSSIAN",
    "BERNOULLI",
    "POISSON",
    "INFLATED_GAUSSIAN",
    "FAMILY_KINDS",
    "EmissionFamily",
    "ModelParams",
    "NumericalError",
    "log_density",
    "log_density_matrix",
    "log_density_pairs",
    "m_step",
    "complete_loglik",
    "FitConfig",
    "FitResult",
    "init_partition",
    "e_step",
    "classify",
    "run_vem",
    "penalized_objective",
    "PathConfig",
    "LambdaPath",
    "ModelSearch",
    "default_lam0",
    "lambda_path",
    "parameter_count",
    "icl",
    "search_models",
    "select_model",
    "spectral_partition",
    "report_rows",
    "SimDesign",
    "SimReplicate",
    "gabriel_graph",
    "make_two_component",
    "assign_and_swap",
    "sample_interactions",
    "spatial_discordance",
    "generate_replicate",
    "adjusted_rand",
    "group_distance_matrix",
    "within_group_mean",
    "between_group_mean",
    "EARTH_RADIUS_KM",
    "OccurrenceTable",
    "jaccard_network",
    "great_circle_km",
    "build_structural",
    "structural_from_distances",
    "io",
    "__version__",
]
