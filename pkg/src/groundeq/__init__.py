"""groundeq: toolkit for ground equational sequent calculi.

Checker kernel with calculus feature flags, executable proof transformations,
a congruence-closure oracle, bounded proof search and derivation fuzzing.
"""

from .syntax import (  # noqa: F401
    Atom,
    Eq,
    ParseError,
    Pred,
    Sequent,
    Signature,
    Term,
    parse_atom,
    parse_sequent,
    parse_term,
)
from .kernel import (  # noqa: F401
    Calculus,
    CheckReport,
    Derivation,
    PRESETS,
    Template,
    apply_template,
    check_derivation,
    check_rule,
    get_calculus,
    match_replacement,
    stats,
    template_from,
)
from .derivio import parse_derivation, serialize_derivation  # noqa: F401

__version__ = "0.1.0"
