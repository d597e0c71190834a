"""Constructive proof transformations.

Every whole-proof transform validates its input against the source calculus,
rebuilds the tree case by case, re-checks the output against the target
calculus, and returns the result wrapped in a :class:`TransformOutcome` whose
certificate records both calculi.  The kernel checker is the sole trust
anchor: a transform that produces an unchecked tree raises
``InternalTransformError`` instead of returning it.

Derived structural reasoning ("by weakenings and exchanges") is emitted as a
canonical sequence: append the missing atoms at the right end, then reorder
with adjacent exchanges, bubble-sort style.  That keeps outputs deterministic
and diffable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, Union

from . import kernel
from .kernel import (
    Calculus,
    Cng,
    CngShared,
    Contract,
    Cut,
    CutShared,
    Derivation,
    EqLeft1,
    EqLeft2,
    EqMechanism,
    Exchange,
    PRESETS,
    Refl,
    Template,
    Weaken,
    apply_template,
    check_derivation,
    stats,
    template_from,
)
from .syntax import Atom, Eq, Sequent, sequent_str


class TransformError(Exception):
    pass


class SourceDoesNotCheck(TransformError):
    pass


class SuccedentNotEquality(TransformError):
    pass


class ShapeMismatch(TransformError):
    pass


class PreconditionViolated(TransformError):
    pass


class InternalTransformError(TransformError):
    """A transform produced output that fails its own target check."""


@dataclass(frozen=True)
class Certificate:
    source_calculus: str
    target_calculus: str
    end_sequent_preserved: bool


@dataclass(frozen=True)
class TransformOutcome:
    result: Derivation
    certificate: Certificate


@dataclass(frozen=True)
class Fragment:
    """Derivation with open premises, composed by supplying their proofs."""
    open_premises: Tuple[Sequent, ...]
    conclusion: Sequent
    _build: Callable[..., Derivation]

    def compose(self, *premises: Derivation) -> Derivation:
        if len(premises) != len(self.open_premises):
            raise ShapeMismatch(
                f"fragment needs {len(self.open_premises)} premise(s), got {len(premises)}")
        for want, got in zip(self.open_premises, premises):
            if got.conclusion != want:
                raise ShapeMismatch(
                    f"premise concludes {sequent_str(got.conclusion)}, "
                    f"fragment expects {sequent_str(want)}")
        return self._build(*premises)


def _require_checked(d: Derivation, calc: Calculus) -> None:
    report = check_derivation(d, calc)
    if not report.ok:
        v = report.violations[0]
        raise SourceDoesNotCheck(
            f"input does not check in {calc.name}: {v.kind} at node {v.path or 'root'}: {v.message}")


def _outcome(result: Derivation, source: Calculus, target: Calculus,
             original_end: Sequent) -> TransformOutcome:
    report = check_derivation(result, target)
    if not report.ok:
        v = report.violations[0]
        raise InternalTransformError(
            f"transform output fails in {target.name}: {v.kind} at {v.path}: {v.message}")
    cert = Certificate(source.name, target.name,
                       result.conclusion == original_end)
    return TransformOutcome(result, cert)


def _as_calculus(calc: Union[str, Calculus]) -> Calculus:
    if isinstance(calc, Calculus):
        return calc
    return PRESETS[calc.upper()]


# ---------------------------------------------------------------------------
# Structural plumbing.

def weaken_exchange_to(d: Derivation, target: Sequence[Atom]) -> Derivation:
    """Extend and reorder the antecedent to exactly ``target`` by weakenings
    (missing atoms appended at the right end, in target order) followed by
    adjacent exchanges.  The current antecedent must be a sub-multiset of the
    target."""
    target = tuple(target)
    current = list(d.conclusion.antecedent)
    deficit: List[Atom] = []
    pool = list(current)
    for a in target:
        if a in pool:
            pool.remove(a)
        else:
            deficit.append(a)
    if pool:
        raise PreconditionViolated(
            f"antecedent atom {pool[0]} does not occur in the target")
    for a in deficit:
        d = kernel.weaken(d, a)
        current.append(a)
    for i in range(len(target)):
        if current[i] == target[i]:
            continue
        j = next(k for k in range(i + 1, len(current)) if current[k] == target[i])
        while j > i:
            d = kernel.exchange(d, j - 1)
            current[j - 1], current[j] = current[j], current[j - 1]
            j -= 1
    return d


def derive_member(antecedent: Sequence[Atom], index: int) -> Derivation:
    """Derivation of ``antecedent => antecedent[index]`` from an axiom by
    weakenings and exchanges."""
    antecedent = tuple(antecedent)
    return weaken_exchange_to(kernel.axiom(antecedent[index]), antecedent)


# ---------------------------------------------------------------------------
# Rule inter-derivations (the two directions of the equivalence of the
# eq-left pair with the congruence rule, over the structural rules).

def eqleft_as_cng(kind: int, gamma: Sequence[Atom], tpl: Template,
                  old, new) -> Fragment:
    """Simulate an eq-left inference by congruence nodes, contraction- and
    cut-free.  Kind 1 consumes a hypothesis old=new, kind 2 new=old; the one
    open premise is ``gamma => tpl[old]``."""
    gamma = tuple(gamma)
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    open_premise = Sequent(gamma, apply_template(tpl, old))
    if kind == 1:
        principal: Eq = Eq(old, new)

        def build(p: Derivation) -> Derivation:
            return kernel.cng(p, kernel.axiom(principal), tpl)
    else:
        principal = Eq(new, old)

        def build(p: Derivation) -> Derivation:
            # new=new by reflexivity, rewritten to old=new via the flipped
            # hypothesis; then the main congruence step.
            side = template_from(Eq(new, new), ((0,),))
            flip = kernel.cng(kernel.refl(new), kernel.axiom(principal), side)
            return kernel.cng(p, flip, tpl)

    conclusion = Sequent(gamma + (principal,), apply_template(tpl, new))
    return Fragment((open_premise,), conclusion, build)


def cng_as_eqm(gamma: Sequence[Atom], lam: Sequence[Atom], tpl: Template,
               old, new) -> Fragment:
    """Simulate a congruence inference with exactly one eq-left-1 and one cut
    (cut formula old=new), then exchanges restoring the Gamma, Lambda order;
    no contraction.  Open premises: ``gamma => tpl[old]`` and
    ``lam => old=new``."""
    gamma, lam = tuple(gamma), tuple(lam)
    open_premises = (Sequent(gamma, apply_template(tpl, old)),
                     Sequent(lam, Eq(old, new)))

    def build(p_gamma: Derivation, p_lam: Derivation) -> Derivation:
        step = kernel.eq_left1(p_gamma, tpl, old, new)
        merged = kernel.cut(p_lam, step)  # concludes lam, gamma => tpl[new]
        return weaken_exchange_to(merged, gamma + lam)

    conclusion = Sequent(gamma + lam, apply_template(tpl, new))
    return Fragment(open_premises, conclusion, build)


# ---------------------------------------------------------------------------
# Whole-proof translation between the eq-left formulation and the congruence
# formulation (equivalent over weakening, exchange and cut).

def translate(d: Derivation, target: Union[str, Calculus]) -> TransformOutcome:
    target_calc = _as_calculus(target)
    if target_calc.name == "EQ":
        source = PRESETS["EQM"]
    elif target_calc.name == "EQM":
        source = PRESETS["EQ"]
    else:
        raise ValueError("translation target must be EQ or EQM")
    _require_checked(d, source)

    def go(node: Derivation) -> Derivation:
        premises = tuple(go(p) for p in node.premises)
        rule = node.rule
        if target_calc.name == "EQ" and isinstance(rule, (EqLeft1, EqLeft2)):
            kind = 1 if isinstance(rule, EqLeft1) else 2
            gamma = node.premises[0].conclusion.antecedent
            frag = eqleft_as_cng(kind, gamma, rule.template, rule.old, rule.new)
            return frag.compose(premises[0])
        if target_calc.name == "EQM" and isinstance(rule, Cng):
            gamma = node.premises[0].conclusion.antecedent
            lam = node.premises[1].conclusion.antecedent
            frag = cng_as_eqm(gamma, lam, rule.template, rule.old, rule.new)
            return frag.compose(premises[0], premises[1])
        return Derivation(node.conclusion, rule, premises)

    result = go(d)
    outcome = _outcome(result, source, target_calc, d.conclusion)
    if stats(result).contractions != stats(d).contractions:
        raise InternalTransformError("translation changed the contraction count")
    return outcome


# ---------------------------------------------------------------------------
# Equality projection: restrict a derivation of an equality to the equality
# part of its antecedent.

def _project(node: Derivation) -> Derivation:
    rule = node.rule
    if isinstance(rule, (kernel.Axiom, Refl)):
        return node
    if isinstance(rule, Weaken):
        sub = _project(node.premises[0])
        if isinstance(rule.atom, Eq):
            return kernel.weaken(sub, rule.atom)
        return sub
    if isinstance(rule, Exchange):
        premise_ant = node.premises[0].conclusion.antecedent
        i = rule.index
        sub = _project(node.premises[0])
        if not (isinstance(premise_ant[i], Eq) and isinstance(premise_ant[i + 1], Eq)):
            return sub
        j = sum(1 for a in premise_ant[:i] if isinstance(a, Eq))
        return kernel.exchange(sub, j)
    if isinstance(rule, Contract):
        kept = node.conclusion.antecedent[-1]
        sub = _project(node.premises[0])
        if isinstance(kept, Eq):
            return kernel.contract(sub)
        return sub
    if isinstance(rule, EqLeft1):
        return kernel.eq_left1(_project(node.premises[0]), rule.template,
                               rule.old, rule.new)
    if isinstance(rule, EqLeft2):
        return kernel.eq_left2(_project(node.premises[0]), rule.template,
                               rule.old, rule.new)
    if isinstance(rule, Cut):
        left, right = node.premises
        psub = _project(right)
        if isinstance(rule.formula, Eq):
            return kernel.cut(_project(left), psub)
        # A non-equality cut formula is projected away entirely: the right
        # subderivation already proves the goal from its equality part.
        gamma_eq = tuple(a for a in left.conclusion.antecedent if isinstance(a, Eq))
        lam_eq = tuple(a for a in right.conclusion.antecedent[:-1] if isinstance(a, Eq))
        return weaken_exchange_to(psub, gamma_eq + lam_eq)
    raise InternalTransformError(f"unexpected rule under projection: {rule.rule_name}")


def project_equalities(d: Derivation, calc: Union[str, Calculus]) -> TransformOutcome:
    calc = _as_calculus(calc)
    if calc.name not in ("EQM", "EQM-"):
        raise ValueError("projection is defined for EQM and EQM-")
    _require_checked(d, calc)
    if not isinstance(d.conclusion.succedent, Eq):
        raise SuccedentNotEquality(
            f"succedent {d.conclusion.succedent} is not an equality")
    result = _project(d)
    want = tuple(a for a in d.conclusion.antecedent if isinstance(a, Eq))
    if result.conclusion != Sequent(want, d.conclusion.succedent):
        raise InternalTransformError("projection produced the wrong end-sequent")
    return _outcome(result, calc, calc, d.conclusion)


# ---------------------------------------------------------------------------
# Contraction admissibility in the cut- and contraction-free context-sharing
# system, and contraction elimination built on it.

_CCF = PRESETS["CCF-EQP"]
_CF = PRESETS["CF-EQP"]


def filter_last(gamma: Sequence[Atom], f: Atom) -> Tuple[Atom, ...]:
    """Drop every occurrence of ``f`` except the last; no-op when absent."""
    gamma = tuple(gamma)
    if f not in gamma:
        return gamma
    last = len(gamma) - 1 - gamma[::-1].index(f)
    return tuple(a for i, a in enumerate(gamma) if a != f or i == last)


def _lemma_a(node: Derivation, f: Atom) -> Derivation:
    gamma = node.conclusion.antecedent
    if f not in gamma:
        return node
    rule = node.rule
    if isinstance(rule, kernel.Axiom):
        # antecedent is exactly (f,); already filtered
        return node
    if isinstance(rule, Weaken):
        premise = node.premises[0]
        if rule.atom != f:
            return kernel.weaken(_lemma_a(premise, f), rule.atom)
        if f not in premise.conclusion.antecedent:
            return node
        sub = _lemma_a(premise, f)
        # the premise keeps one interior occurrence; move it to the end
        target = filter_last(gamma, f)
        return weaken_exchange_to(sub, target)
    if isinstance(rule, Exchange):
        premise = node.premises[0]
        sub = _lemma_a(premise, f)
        filtered_premise = filter_last(premise.conclusion.antecedent, f)
        filtered_conclusion = filter_last(gamma, f)
        if filtered_premise == filtered_conclusion:
            return sub
        j = _adjacent_swap_index(filtered_premise, filtered_conclusion)
        return kernel.exchange(sub, j)
    if isinstance(rule, CngShared):
        left = _lemma_a(node.premises[0], f)
        right = _lemma_a(node.premises[1], f)
        return kernel.cng_shared(left, right, rule.template)
    raise InternalTransformError(
        f"rule {rule.rule_name} cannot appear in a checked ccf derivation")


def _adjacent_swap_index(a: Tuple[Atom, ...], b: Tuple[Atom, ...]) -> int:
    if len(a) == len(b):
        for j in range(len(a) - 1):
            if a[j] != b[j]:
                if a[j] == b[j + 1] and a[j + 1] == b[j] and a[j + 2:] == b[j + 2:]:
                    return j
                break
    raise InternalTransformError(
        "filtered antecedents do not differ by one adjacent swap")


def lemma_a(d: Derivation, f: Atom) -> TransformOutcome:
    """From a contraction- and cut-free context-sharing derivation of
    Gamma => H, derive Gamma filtered to the last occurrence of f => H."""
    _require_checked(d, _CCF)
    result = _lemma_a(d, f)
    want = Sequent(filter_last(d.conclusion.antecedent, f), d.conclusion.succedent)
    if result.conclusion != want:
        raise InternalTransformError("filtering produced the wrong end-sequent")
    return _outcome(result, _CCF, _CCF, d.conclusion)


def _admit_contraction(d: Derivation) -> Derivation:
    ant = d.conclusion.antecedent
    if len(ant) < 2 or ant[-1] != ant[-2]:
        raise ShapeMismatch("end-sequent must close with two identical atoms")
    f = ant[-1]
    squeezed = _lemma_a(d, f)  # concludes (Gamma minus f), f => H
    return weaken_exchange_to(squeezed, ant[:-1])


def admit_contraction(d: Derivation) -> TransformOutcome:
    """Contraction admissibility: Gamma, F, F => H yields Gamma, F => H
    without using the contraction rule."""
    _require_checked(d, _CCF)
    result = _admit_contraction(d)
    return _outcome(result, _CCF, _CCF, d.conclusion)


def saturate(d: Derivation, gamma0: Sequence[Atom]) -> TransformOutcome:
    """Re-target the end-sequent antecedent to ``gamma0``, which must contain
    every atom occurring in it."""
    _require_checked(d, _CCF)
    gamma0 = tuple(gamma0)
    missing = [a for a in d.conclusion.antecedent if a not in gamma0]
    if missing:
        raise PreconditionViolated(f"{missing[0]} does not occur in the target antecedent")
    result = d
    seen = []
    for a in d.conclusion.antecedent:
        if a not in seen:
            seen.append(a)
            result = _lemma_a(result, a)
    result = weaken_exchange_to(result, gamma0)
    return _outcome(result, _CCF, _CCF, d.conclusion)


def eliminate_contractions(d: Derivation) -> TransformOutcome:
    """Remove every contraction from a cut-free context-sharing derivation,
    bottom-up, by contraction admissibility."""
    _require_checked(d, _CF)

    def go(node: Derivation) -> Derivation:
        premises = tuple(go(p) for p in node.premises)
        if isinstance(node.rule, Contract):
            return _admit_contraction(premises[0])
        return Derivation(node.conclusion, node.rule, premises)

    result = go(d)
    outcome = _outcome(result, _CF, _CCF, d.conclusion)
    s = stats(result)
    if s.contractions or s.cuts:
        raise InternalTransformError("contraction elimination left forbidden nodes")
    return outcome


def contraction_via_shared_cut(d: Derivation, calc: Calculus) -> TransformOutcome:
    """Derive the contraction step with a context-sharing cut: the left premise
    is the axiom F => F weakened by Gamma and exchanged so F ends last."""
    if calc.cut is not kernel.CutMode.SHARED:
        raise ValueError(f"{calc.name} does not use the context-sharing cut")
    _require_checked(d, calc)
    ant = d.conclusion.antecedent
    if len(ant) < 2 or ant[-1] != ant[-2]:
        raise ShapeMismatch("end-sequent must close with two identical atoms")
    f = ant[-1]
    left = weaken_exchange_to(kernel.axiom(f), ant[:-1])
    result = kernel.cut_shared(left, d)
    return _outcome(result, calc, calc, d.conclusion)
