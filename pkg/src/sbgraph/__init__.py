"""Connected components of set-based graphs, computed by intension."""

from .errors import (
    DimensionError,
    EmptyError,
    MapInfPreconditionError,
    ParseError,
    PieceLimitError,
    SBGError,
    UnboundParameterError,
    ValidationError,
)
from .graph import SBGraph, SetEdge, SetVertex, check_valid, connect_comp, edge_maps, validate
from .interval import MDInterval
from .pwlmap import AffinePiece, PWLMap, compose, map_inf, min_adj_map, min_map
from .sets import IntervalSet, parse_set

__all__ = [
    "AffinePiece",
    "DimensionError",
    "EmptyError",
    "IntervalSet",
    "MDInterval",
    "MapInfPreconditionError",
    "PWLMap",
    "ParseError",
    "PieceLimitError",
    "SBGError",
    "SBGraph",
    "SetEdge",
    "SetVertex",
    "UnboundParameterError",
    "ValidationError",
    "check_valid",
    "compose",
    "connect_comp",
    "edge_maps",
    "map_inf",
    "min_adj_map",
    "min_map",
    "parse_set",
    "validate",
]
