"""extendkit: exact extension decisions, approximation factors, and
machine-checkable certificates for subadditive, XOS, submodular, and
convex partial functions."""

SCHEMA_VERSION = "1"

from .ground import (  # noqa: F401
    ConvexPartialFunction,
    PartialSetFunction,
    Rational,
    parse_partial_function,
    parse_rational,
    serialize,
)
