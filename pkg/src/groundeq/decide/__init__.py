"""Semantic oracle, bounded proof search, fuzzing and metatheorem audits."""

from .closure import (  # noqa: F401
    CongruenceIndex,
    TermUniverse,
    backend_name,
    congruence_closure,
    grow_universe,
    valid,
)
from .search import (  # noqa: F401
    BoundsEmpty,
    NotFoundWithinBounds,
    SearchBounds,
    SearchContext,
    bounded_search,
)
from .fuzz import FuzzConfig, fuzz_derivation  # noqa: F401
from .audits import AuditResult, audit_prop3, audit_prop4  # noqa: F401
