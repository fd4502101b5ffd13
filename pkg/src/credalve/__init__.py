"""Exact inference in credal networks under strong independence."""

__version__ = "0.1.0"

from .engine import (
    CandidateExplosionError,
    Diagnostics,
    EngineOptions,
    InferenceResult,
    OracleSizeError,
    SeparableMessage,
    ZeroEvidenceError,
    apply_terminal_evidence,
    binary_polytree_bounds,
    eliminate_bucket,
    enumerate_strong_extension,
    infer,
    posterior_bounds_from_candidates,
    separable_ve,
)
from .geometry import (
    LpIterationError,
    PointSet,
    is_convex_combination,
    redundancy_eliminate,
)
from .graph import (
    SubnetworkReport,
    d_separated,
    elimination_order,
    is_polytree,
    relevant_subnetwork,
)
from .model import (
    CredalNetwork,
    Dag,
    ExtensiveCountError,
    Factor,
    LocalCredalSet,
    NetworkFormatError,
    Query,
    TransparentBayesNet,
    Variable,
    ccm_transform_extensive,
    concat_credal,
    intervals_to_vertices,
    load_network,
    network_to_document,
    networks_equal,
    save_network,
)
from .reductions import (
    SubsetSumInstance,
    subsetsum_oracle,
    subsetsum_to_network,
    subsetsum_upper_probability,
    verify_subset,
)

__all__ = [name for name in dir() if not name.startswith("_")]
