"""Auditors for the identity-antecedent metatheorems.

These do not re-prove anything: given a checked derivation they test whether
its end-sequent falls under the statement's pattern and, if so, whether the
asserted conclusion holds.  Fuzz campaigns drive them over large numbers of
derivations; a single violation would expose a kernel bug.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..kernel import Derivation
from ..syntax import Eq, Term, atom_str, is_identity

PASS = "pass"
VIOLATION = "violation"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class AuditResult:
    status: str
    detail: str = ""

    @property
    def applicable(self) -> bool:
        return self.status != NOT_APPLICABLE


def audit_prop3(d: Derivation) -> AuditResult:
    """Identity antecedents force a trivial equality succedent.

    Pattern: every antecedent atom is p=p and the succedent is an equality;
    then its two sides must be syntactically identical.  The derivation must
    already check in EQM or EQM-.
    """
    seq = d.conclusion
    if not isinstance(seq.succedent, Eq):
        return AuditResult(NOT_APPLICABLE, "succedent is not an equality")
    if not all(is_identity(a) for a in seq.antecedent):
        return AuditResult(NOT_APPLICABLE, "antecedent has a non-identity atom")
    if seq.succedent.lhs == seq.succedent.rhs:
        return AuditResult(PASS)
    return AuditResult(VIOLATION, f"non-trivial succedent {atom_str(seq.succedent)}")


_A = Term("a")
_FFA = Term("f", (Term("f", (_A,)),))
_TARGETS = (Eq(_A, _FFA), Eq(_FFA, _A))


def audit_prop4(d: Derivation) -> AuditResult:
    """One non-identity hypothesis among identities pins that hypothesis.

    Pattern: all antecedent atoms are equalities, exactly one of them is not
    an identity, and the succedent is a=f(f(a)) or f(f(a))=a; then the
    non-identity must itself be one of those two atoms.  The derivation must
    already check in EQM- over a signature with constant ``a`` and unary
    ``f``.
    """
    seq = d.conclusion
    if seq.succedent not in _TARGETS:
        return AuditResult(NOT_APPLICABLE, "succedent is not the pinned equality")
    if not all(isinstance(a, Eq) for a in seq.antecedent):
        return AuditResult(NOT_APPLICABLE, "antecedent has a predicate atom")
    non_identities = [a for a in seq.antecedent if not is_identity(a)]
    if len(non_identities) != 1:
        return AuditResult(NOT_APPLICABLE,
                           f"{len(non_identities)} non-identity hypotheses")
    e = non_identities[0]
    if e in _TARGETS:
        return AuditResult(PASS, atom_str(e))
    return AuditResult(VIOLATION, f"unexpected hypothesis {atom_str(e)}")
