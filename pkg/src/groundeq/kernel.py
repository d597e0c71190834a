"""Checking kernel: calculus presets, parameterized rule applications, and a
derivation checker.

Rule applications carry full witnesses (templates, split indices, introduced
atoms), so checking a node is a deterministic shape comparison and the kernel
never searches.  Derivations are immutable trees; a checked derivation is one
whose every node passes :func:`check_rule` against a calculus.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, Optional, Sequence, Tuple, Union

from .syntax import (
    HOLE,
    Atom,
    Eq,
    Path,
    Pred,
    Sequent,
    Term,
    atom_children,
    atom_positions,
    atom_replace,
    atom_str,
    atom_with_children,
)


class EqMechanism(enum.Enum):
    """How equalities act on sequents: a pair of left rules, or a congruence
    rule in its context-independent or context-sharing form."""
    EQ_LEFT_PAIR = "eq-left-pair"
    CNG = "cng"
    CNG_SHARED = "cng-shared"


class CutMode(enum.Enum):
    INDEPENDENT = "independent"
    SHARED = "shared"
    NONE = "none"


@dataclass(frozen=True)
class Calculus:
    name: str
    eq_mechanism: EqMechanism
    cut: CutMode
    contraction: bool
    weakening: bool = True
    exchange: bool = True


PRESETS: Dict[str, Calculus] = {
    "EQM": Calculus("EQM", EqMechanism.EQ_LEFT_PAIR, CutMode.INDEPENDENT, True),
    "EQM-": Calculus("EQM-", EqMechanism.EQ_LEFT_PAIR, CutMode.INDEPENDENT, False),
    "EQ": Calculus("EQ", EqMechanism.CNG, CutMode.INDEPENDENT, True),
    "EQP": Calculus("EQP", EqMechanism.CNG_SHARED, CutMode.INDEPENDENT, True),
    "CF-EQM": Calculus("CF-EQM", EqMechanism.EQ_LEFT_PAIR, CutMode.NONE, True),
    "CF-EQ": Calculus("CF-EQ", EqMechanism.CNG, CutMode.NONE, True),
    "CF-EQP": Calculus("CF-EQP", EqMechanism.CNG_SHARED, CutMode.NONE, True),
    "CCF-EQP": Calculus("CCF-EQP", EqMechanism.CNG_SHARED, CutMode.NONE, False),
}


def get_calculus(name: str, shared_cut: bool = False) -> Calculus:
    """Look up a preset by its command-line name; ``shared_cut`` replaces an
    independent cut by the context-sharing one."""
    preset = PRESETS.get(name.upper())
    if preset is None:
        raise KeyError(f"unknown calculus {name!r} (known: {', '.join(PRESETS)})")
    if not shared_cut:
        return preset
    if preset.cut is not CutMode.INDEPENDENT:
        raise ValueError(f"{preset.name} has no cut rule to share")
    return Calculus(preset.name + "+shared-cut", preset.eq_mechanism,
                    CutMode.SHARED, preset.contraction)


# ---------------------------------------------------------------------------
# Templates: an atom-shaped tree with a distinguished hole at zero or more
# term positions.  Applying a template plugs the same term into every hole.

_HOLE_TERM = Term(HOLE)


@dataclass(frozen=True)
class Template:
    shape: Atom

    def __post_init__(self):
        for _, t in atom_positions(self.shape):
            if t.head == HOLE and t.args:
                raise ValueError("template hole cannot have arguments")

    def __str__(self) -> str:
        return atom_str(self.shape)

    @property
    def holes(self) -> Tuple[Path, ...]:
        return tuple(p for p, t in atom_positions(self.shape) if t.is_hole)


def template_from(atom: Atom, paths: Sequence[Path]) -> Template:
    """Blank the given positions of a concrete atom into holes."""
    return Template(atom_replace(atom, paths, _HOLE_TERM))


def apply_template(tpl: Template, t: Term) -> Atom:
    """Plug ``t`` into every hole of the template."""
    return atom_replace(tpl.shape, tpl.holes, t)


def _match_terms(p: Term, c: Term, old: Term, new: Term) -> FrozenSet[Term]:
    """All holed term trees w with w[old]=p and w[new]=c."""
    out = set()
    if p == old and c == new:
        out.add(_HOLE_TERM)
    if p.head == c.head and len(p.args) == len(c.args):
        child_sets = [_match_terms(pa, ca, old, new) for pa, ca in zip(p.args, c.args)]
        if all(child_sets):
            for combo in itertools.product(*child_sets):
                out.add(Term(p.head, tuple(combo)))
    return frozenset(out)


def match_replacement(premise_atom: Atom, conclusion_atom: Atom,
                      old: Term, new: Term) -> FrozenSet[Template]:
    """All templates tpl with apply(tpl, old) = premise_atom and
    apply(tpl, new) = conclusion_atom.  Empty means no rule instance exists.
    """
    pc = atom_children(premise_atom)
    cc = atom_children(conclusion_atom)
    if isinstance(premise_atom, Eq) != isinstance(conclusion_atom, Eq):
        return frozenset()
    if isinstance(premise_atom, Pred):
        if premise_atom.name != conclusion_atom.name or len(pc) != len(cc):
            return frozenset()
    child_sets = [_match_terms(p, c, old, new) for p, c in zip(pc, cc)]
    if not all(child_sets):
        return frozenset()
    out = set()
    for combo in itertools.product(*child_sets):
        out.add(Template(atom_with_children(premise_atom, tuple(combo))))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Rule applications.  One dataclass per inference figure; ``old``/``new`` are
# the rewritten subterm in the premise/conclusion succedent respectively.

@dataclass(frozen=True)
class Axiom:
    rule_name = "axiom"
    n_premises = 0


@dataclass(frozen=True)
class Refl:
    term: Term
    rule_name = "refl"
    n_premises = 0


@dataclass(frozen=True)
class Weaken:
    atom: Atom
    rule_name = "weaken"
    n_premises = 1


@dataclass(frozen=True)
class Exchange:
    index: int  # left one of the two adjacent antecedent positions swapped
    rule_name = "exchange"
    n_premises = 1


@dataclass(frozen=True)
class Contract:
    rule_name = "contract"
    n_premises = 1


@dataclass(frozen=True)
class Cut:
    formula: Atom
    split: int  # boundary between the two premise contexts in the conclusion
    rule_name = "cut"
    n_premises = 2


@dataclass(frozen=True)
class CutShared:
    formula: Atom
    rule_name = "cut-shared"
    n_premises = 2


@dataclass(frozen=True)
class EqLeft1:
    template: Template
    old: Term
    new: Term
    rule_name = "eq-left-1"
    n_premises = 1

    @property
    def principal(self) -> Eq:
        return Eq(self.old, self.new)


@dataclass(frozen=True)
class EqLeft2:
    template: Template
    old: Term
    new: Term
    rule_name = "eq-left-2"
    n_premises = 1

    @property
    def principal(self) -> Eq:
        return Eq(self.new, self.old)


@dataclass(frozen=True)
class Cng:
    template: Template
    old: Term
    new: Term
    split: int
    rule_name = "cng"
    n_premises = 2


@dataclass(frozen=True)
class CngShared:
    template: Template
    old: Term
    new: Term
    rule_name = "cng-shared"
    n_premises = 2


RuleApp = Union[Axiom, Refl, Weaken, Exchange, Contract, Cut, CutShared,
                EqLeft1, EqLeft2, Cng, CngShared]

RULE_CLASSES = (Axiom, Refl, Weaken, Exchange, Contract, Cut, CutShared,
                EqLeft1, EqLeft2, Cng, CngShared)
RULES_BY_NAME = {cls.rule_name: cls for cls in RULE_CLASSES}


@dataclass(frozen=True)
class Derivation:
    conclusion: Sequent
    rule: RuleApp
    premises: Tuple["Derivation", ...] = ()


# ---------------------------------------------------------------------------
# Checking.

RULE_DISABLED = "rule-disabled"
SHAPE_MISMATCH = "shape-mismatch"
TEMPLATE_MISMATCH = "template-mismatch"
PREMISE_COUNT = "premise-count"


@dataclass(frozen=True)
class Violation:
    path: Tuple[int, ...]
    kind: str
    message: str


@dataclass(frozen=True)
class DerivationStats:
    height: int
    node_count: int
    contractions: int
    cuts: int
    weakenings: int


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    violations: Tuple[Violation, ...]
    stats: DerivationStats


def check_rule(conclusion: Sequent, rule: RuleApp,
               premises: Sequence[Sequent], calc: Calculus
               ) -> Optional[Tuple[str, str]]:
    """Validate one fully parameterized rule instance against a calculus.

    Returns None when the instance matches the inference figure exactly,
    otherwise a (kind, message) pair.
    """
    if len(premises) != rule.n_premises:
        return (PREMISE_COUNT,
                f"{rule.rule_name} expects {rule.n_premises} premise(s), got {len(premises)}")
    ant = conclusion.antecedent
    succ = conclusion.succedent

    if isinstance(rule, Axiom):
        if len(ant) != 1 or ant[0] != succ:
            return (SHAPE_MISMATCH, "axiom must be A => A")
        return None

    if isinstance(rule, Refl):
        if ant:
            return (SHAPE_MISMATCH, "reflexivity needs an empty antecedent")
        if succ != Eq(rule.term, rule.term):
            return (SHAPE_MISMATCH, "reflexivity concludes => t=t for its witness t")
        return None

    if isinstance(rule, Weaken):
        if not calc.weakening:
            return (RULE_DISABLED, f"weakening disabled in {calc.name}")
        (p,) = premises
        # Succedent is preserved; the introduced atom lands at the right end.
        if not ant or ant[-1] != rule.atom or ant[:-1] != p.antecedent or succ != p.succedent:
            return (SHAPE_MISMATCH, "weakening appends its atom at the right end")
        return None

    if isinstance(rule, Exchange):
        if not calc.exchange:
            return (RULE_DISABLED, f"exchange disabled in {calc.name}")
        (p,) = premises
        i = rule.index
        if not (0 <= i < len(ant) - 1):
            return (SHAPE_MISMATCH, f"exchange index {i} out of range")
        swapped = p.antecedent[:i] + (p.antecedent[i + 1], p.antecedent[i]) + p.antecedent[i + 2:]
        if len(p.antecedent) != len(ant) or swapped != ant or succ != p.succedent:
            return (SHAPE_MISMATCH, "exchange swaps two adjacent antecedent atoms")
        return None

    if isinstance(rule, Contract):
        if not calc.contraction:
            return (RULE_DISABLED, f"contraction disabled in {calc.name}")
        (p,) = premises
        if not ant or p.antecedent != ant + (ant[-1],) or succ != p.succedent:
            return (SHAPE_MISMATCH, "contraction merges the two identical atoms ending the premise")
        return None

    if isinstance(rule, Cut):
        if calc.cut is not CutMode.INDEPENDENT:
            return (RULE_DISABLED, f"independent cut disabled in {calc.name}")
        left, right = premises
        k = rule.split
        if not (0 <= k <= len(ant)):
            return (SHAPE_MISMATCH, f"cut split {k} out of range")
        gamma, lam = ant[:k], ant[k:]
        if left != Sequent(gamma, rule.formula):
            return (SHAPE_MISMATCH, "left cut premise must be Gamma => A")
        if right != Sequent(lam + (rule.formula,), succ):
            return (SHAPE_MISMATCH, "right cut premise must be Lambda, A => H")
        return None

    if isinstance(rule, CutShared):
        if calc.cut is not CutMode.SHARED:
            return (RULE_DISABLED, f"context-sharing cut disabled in {calc.name}")
        left, right = premises
        if left != Sequent(ant, rule.formula):
            return (SHAPE_MISMATCH, "left shared-cut premise must be Gamma => A")
        if right != Sequent(ant + (rule.formula,), succ):
            return (SHAPE_MISMATCH, "right shared-cut premise must be Gamma, A => H")
        return None

    if isinstance(rule, (EqLeft1, EqLeft2)):
        if calc.eq_mechanism is not EqMechanism.EQ_LEFT_PAIR:
            return (RULE_DISABLED, f"equality left rules disabled in {calc.name}")
        (p,) = premises
        if not ant or ant[-1] != rule.principal:
            return (SHAPE_MISMATCH, "principal equality must end the conclusion antecedent")
        if p.antecedent != ant[:-1]:
            return (SHAPE_MISMATCH, "premise context must match the conclusion context")
        if p.succedent != apply_template(rule.template, rule.old):
            return (TEMPLATE_MISMATCH, "premise succedent is not the template at the old term")
        if succ != apply_template(rule.template, rule.new):
            return (TEMPLATE_MISMATCH, "conclusion succedent is not the template at the new term")
        return None

    if isinstance(rule, Cng):
        if calc.eq_mechanism is not EqMechanism.CNG:
            return (RULE_DISABLED, f"congruence rule disabled in {calc.name}")
        left, right = premises
        k = rule.split
        if not (0 <= k <= len(ant)):
            return (SHAPE_MISMATCH, f"congruence split {k} out of range")
        gamma, lam = ant[:k], ant[k:]
        if right != Sequent(lam, Eq(rule.old, rule.new)):
            return (SHAPE_MISMATCH, "right congruence premise must be Lambda => r=s")
        if left.antecedent != gamma:
            return (SHAPE_MISMATCH, "left congruence premise context mismatch")
        if left.succedent != apply_template(rule.template, rule.old):
            return (TEMPLATE_MISMATCH, "left premise succedent is not the template at the old term")
        if succ != apply_template(rule.template, rule.new):
            return (TEMPLATE_MISMATCH, "conclusion succedent is not the template at the new term")
        return None

    if isinstance(rule, CngShared):
        if calc.eq_mechanism is not EqMechanism.CNG_SHARED:
            return (RULE_DISABLED, f"context-sharing congruence disabled in {calc.name}")
        left, right = premises
        if right != Sequent(ant, Eq(rule.old, rule.new)):
            return (SHAPE_MISMATCH, "right premise must be Gamma => r=s over the shared context")
        if left.antecedent != ant:
            return (SHAPE_MISMATCH, "left premise must share the conclusion antecedent")
        if left.succedent != apply_template(rule.template, rule.old):
            return (TEMPLATE_MISMATCH, "left premise succedent is not the template at the old term")
        if succ != apply_template(rule.template, rule.new):
            return (TEMPLATE_MISMATCH, "conclusion succedent is not the template at the new term")
        return None

    return (SHAPE_MISMATCH, f"unknown rule {rule!r}")


def _walk_postorder(d: Derivation) -> Iterator[Tuple[Derivation, Tuple[int, ...]]]:
    # Iterative, so deep weakening/exchange chains cannot hit the recursion
    # limit.  Yields each node after its premises, with its path from the root.
    stack = [(d, (), False)]
    while stack:
        node, path, expanded = stack.pop()
        if expanded:
            yield node, path
        else:
            stack.append((node, path, True))
            for i in range(len(node.premises) - 1, -1, -1):
                stack.append((node.premises[i], path + (i,), False))


def stats(d: Derivation) -> DerivationStats:
    """Height (leaf = 0), node count and per-rule tallies, by one traversal."""
    heights: Dict[int, int] = {}
    node_count = contractions = cuts = weakenings = 0
    height = 0
    for node, _path in _walk_postorder(d):
        h = 0 if not node.premises else 1 + max(heights[id(p)] for p in node.premises)
        heights[id(node)] = h
        height = max(height, h)
        node_count += 1
        if isinstance(node.rule, Contract):
            contractions += 1
        elif isinstance(node.rule, (Cut, CutShared)):
            cuts += 1
        elif isinstance(node.rule, Weaken):
            weakenings += 1
    return DerivationStats(height, node_count, contractions, cuts, weakenings)


def check_derivation(d: Derivation, calc: Calculus) -> CheckReport:
    """Check every node against the calculus; violations carry node paths
    (premise indices from the root, () being the end-sequent node)."""
    violations = []
    for node, path in _walk_postorder(d):
        res = check_rule(node.conclusion, node.rule,
                         tuple(p.conclusion for p in node.premises), calc)
        if res is not None:
            violations.append(Violation(path, res[0], res[1]))
    return CheckReport(not violations, tuple(violations), stats(d))


# ---------------------------------------------------------------------------
# Forward node builders.  These compute the conclusion from the premises and
# witnesses, so transforms and generators produce nodes that check by
# construction; the checker above remains the independent validator.

class BuildError(ValueError):
    pass


def axiom(atom: Atom) -> Derivation:
    return Derivation(Sequent((atom,), atom), Axiom())


def refl(term: Term) -> Derivation:
    return Derivation(Sequent((), Eq(term, term)), Refl(term))


def weaken(d: Derivation, atom: Atom) -> Derivation:
    c = d.conclusion
    return Derivation(Sequent(c.antecedent + (atom,), c.succedent), Weaken(atom), (d,))


def exchange(d: Derivation, index: int) -> Derivation:
    a = d.conclusion.antecedent
    if not (0 <= index < len(a) - 1):
        raise BuildError(f"exchange index {index} out of range for {len(a)} atoms")
    swapped = a[:index] + (a[index + 1], a[index]) + a[index + 2:]
    return Derivation(Sequent(swapped, d.conclusion.succedent), Exchange(index), (d,))


def contract(d: Derivation) -> Derivation:
    a = d.conclusion.antecedent
    if len(a) < 2 or a[-1] != a[-2]:
        raise BuildError("contraction needs two identical atoms at the right end")
    return Derivation(Sequent(a[:-1], d.conclusion.succedent), Contract(), (d,))


def cut(left: Derivation, right: Derivation) -> Derivation:
    formula = left.conclusion.succedent
    ra = right.conclusion.antecedent
    if not ra or ra[-1] != formula:
        raise BuildError("right cut premise must end with the cut formula")
    ant = left.conclusion.antecedent + ra[:-1]
    rule = Cut(formula, len(left.conclusion.antecedent))
    return Derivation(Sequent(ant, right.conclusion.succedent), rule, (left, right))


def cut_shared(left: Derivation, right: Derivation) -> Derivation:
    formula = left.conclusion.succedent
    gamma = left.conclusion.antecedent
    if right.conclusion.antecedent != gamma + (formula,):
        raise BuildError("shared-cut premises must share the context Gamma")
    return Derivation(Sequent(gamma, right.conclusion.succedent),
                      CutShared(formula), (left, right))


def _eq_left(cls, d: Derivation, tpl: Template, old: Term, new: Term) -> Derivation:
    if d.conclusion.succedent != apply_template(tpl, old):
        raise BuildError("premise succedent does not match the template at the old term")
    rule = cls(tpl, old, new)
    ant = d.conclusion.antecedent + (rule.principal,)
    return Derivation(Sequent(ant, apply_template(tpl, new)), rule, (d,))


def eq_left1(d: Derivation, tpl: Template, old: Term, new: Term) -> Derivation:
    return _eq_left(EqLeft1, d, tpl, old, new)


def eq_left2(d: Derivation, tpl: Template, old: Term, new: Term) -> Derivation:
    return _eq_left(EqLeft2, d, tpl, old, new)


def _cng_parts(left: Derivation, right: Derivation, tpl: Template):
    eq = right.conclusion.succedent
    if not isinstance(eq, Eq):
        raise BuildError("right congruence premise must conclude an equality")
    if left.conclusion.succedent != apply_template(tpl, eq.lhs):
        raise BuildError("left premise succedent does not match the template at the old term")
    return eq.lhs, eq.rhs, apply_template(tpl, eq.rhs)


def cng(left: Derivation, right: Derivation, tpl: Template) -> Derivation:
    old, new, succ = _cng_parts(left, right, tpl)
    ant = left.conclusion.antecedent + right.conclusion.antecedent
    rule = Cng(tpl, old, new, len(left.conclusion.antecedent))
    return Derivation(Sequent(ant, succ), rule, (left, right))


def cng_shared(left: Derivation, right: Derivation, tpl: Template) -> Derivation:
    old, new, succ = _cng_parts(left, right, tpl)
    gamma = left.conclusion.antecedent
    if right.conclusion.antecedent != gamma:
        raise BuildError("context-sharing congruence premises must share Gamma")
    return Derivation(Sequent(gamma, succ), CngShared(tpl, old, new), (left, right))
