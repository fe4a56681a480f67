from .calculus import (
    JOIN,
    SELF,
    OrientedSectionPair,
    SurgeryOutcome,
    add_four_by_surgery,
    block_det_identity,
    block_det_sides,
    exact_det,
    handle_sign,
    handle_sign_from_index,
    intersection_index,
    surgery_outcome,
)
from .expr import GeneratingFunction, ParseError, parse_expression
from .tangency import Tangency, find_tangencies

__all__ = [
    "GeneratingFunction",
    "JOIN",
    "OrientedSectionPair",
    "ParseError",
    "SELF",
    "SurgeryOutcome",
    "Tangency",
    "add_four_by_surgery",
    "block_det_identity",
    "block_det_sides",
    "exact_det",
    "find_tangencies",
    "handle_sign",
    "handle_sign_from_index",
    "intersection_index",
    "parse_expression",
    "surgery_outcome",
]
