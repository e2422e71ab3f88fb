"""Structural sign analysis of metabolic-network Jacobian determinants via Child Selections."""

from .algebra import LeibnizTerm, TooLarge, det_exact, leibniz_oracle, reshuffled_minor
from .bifurcation import (
    BifurcationPair,
    DomainMismatch,
    RateDerivatives,
    SignChangeWitness,
    WitnessNotFound,
    construct_sign_witness,
    find_bifurcation_pairs,
    jacobian_det_cauchy_binet,
    jacobian_det_numeric,
)
from .cycles import (
    Classification,
    CombinatorialBlowup,
    CompletionCycle,
    MRGraph,
    build_mr_graph,
    check_corollary_cases,
    classify,
    completion_cycles,
    count_completions,
)
from .network import (
    AutocatalysisError,
    DuplicateLabelError,
    EmptyReactionError,
    Metabolite,
    NetworkError,
    NetworkSyntaxError,
    Reaction,
    ReactionNetwork,
    StoichiometricMatrix,
    input_bipartite_graph,
    parse_network,
    serialize_network,
    stoichiometric_matrix,
)
from .selection import (
    ChildSelection,
    ConstraintInfeasible,
    DimensionMismatch,
    SelectionConstraint,
    count_child_selections,
    enumerate_child_selections,
    selection_distance,
)

__version__ = "0.1.0"
