"""Book embeddings of upward planar st-graphs and a lower-bound lab."""

from .graph_core import (
    ChainCover,
    CycleError,
    Dag,
    Diagnostics,
    EmbeddedStGraph,
    GraphError,
    Reachability,
    RotationSystem,
    augment_to_st,
    chain_cover,
    subset_height,
    subset_width,
    transitive_closure,
    validate_embedding,
)

__version__ = "0.1.0"
