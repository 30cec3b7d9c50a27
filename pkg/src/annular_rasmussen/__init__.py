"""Annular Rasmussen invariants d_t of braid closures, computed exactly."""
from .braid import (
    BraidParseError,
    BraidValidationError,
    BraidWord,
    annular_compose,
    conjugate,
    parse_braid,
    serialize,
    stabilize,
    writhe,
)
from .invariants import (
    BraidReport,
    DtProfile,
    InternalConsistencyError,
    Segment,
    dt_at,
    profile,
    property_suite,
    report,
)
from .statecube import ResourceLimitError

__all__ = [
    "BraidParseError",
    "BraidReport",
    "BraidValidationError",
    "BraidWord",
    "DtProfile",
    "InternalConsistencyError",
    "ResourceLimitError",
    "Segment",
    "annular_compose",
    "conjugate",
    "dt_at",
    "parse_braid",
    "profile",
    "property_suite",
    "report",
    "serialize",
    "stabilize",
    "writhe",
]
