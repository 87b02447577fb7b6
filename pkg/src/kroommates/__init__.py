"""Stable roommates with ties, incomplete lists and k-connected list extension."""
from .core import (
    Instance,
    InvalidInstanceError,
    InvalidMatchingError,
    Matching,
    RankedList,
    RoommatesError,
    blocking_pairs,
    is_stable,
    mutual_pairs,
    validate_instance,
)

__version__ = "0.1.0"
