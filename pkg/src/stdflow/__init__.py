"""S-T densest flow queries over temporal flow networks."""

from .errors import (
    BudgetExceededError,
    InfeasibleQueryError,
    ParseError,
    QueryError,
    StdfError,
    ValidationError,
)
from .network import (
    INF,
    Flow,
    StaticFlowNetwork,
    TemporalEdge,
    TemporalFlowNetwork,
    add_super_terminals,
    from_records,
    ingest_edge_list,
    to_csv,
    window,
)
from .preprocess import Color, Rtfn, classify, compress, reduce, transform, vcp
from .maxflow import (
    max_flow,
    max_flow_sets,
    max_temporal_flow,
    naive_temporal_max_flow,
    reach,
)

__all__ = [
    "BudgetExceededError",
    "Color",
    "Flow",
    "INF",
    "InfeasibleQueryError",
    "ParseError",
    "QueryError",
    "Rtfn",
    "StaticFlowNetwork",
    "StdfError",
    "TemporalEdge",
    "TemporalFlowNetwork",
    "ValidationError",
    "add_super_terminals",
    "classify",
    "compress",
    "from_records",
    "ingest_edge_list",
    "max_flow",
    "max_flow_sets",
    "max_temporal_flow",
    "naive_temporal_max_flow",
    "reach",
    "reduce",
    "to_csv",
    "transform",
    "vcp",
    "window",
]
