"""Simulation and exact checks for the diameter of dense random uniform hypergraphs."""

from .errors import (
    FeasibilityError,
    FormatError,
    InfeasibleConditioningError,
    ParameterError,
    RegimeError,
)
from .hypergraph import (
    SampleConfig,
    UniformHypergraph,
    coupled_sample,
    rank_subset,
    read_hypergraph,
    sample_uniform_hypergraph,
    unrank_subset,
    write_hypergraph,
)
from .metrics import (
    UNREACHABLE,
    ConcentrationParams,
    LayerProfile,
    bfs_distances,
    count_remote_pairs,
    diameter,
    distance_matrix,
    layer_intersection,
    layer_profile,
    omega_star_holds,
)
from .parametrization import (
    GRAPH,
    HYPERGRAPH,
    RegimeParams,
    expected_remote_pairs,
    solve_p,
    target_probabilities,
)

__version__ = "0.1.0"
