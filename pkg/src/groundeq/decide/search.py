"""Bounded backward proof search with memoization.

Two cooperating layers:

* a multiset layer that decides "derivable within height h" with antecedents
  taken up to exchange.  Deleting exchange nodes from a derivation never
  increases its height, so a negative multiset verdict certifies that no
  literal derivation of that height exists; this layer does the exhaustive
  work behind ``NotFoundWithinBounds``.
* a literal layer that enumerates real rule applications (exchange included)
  and builds checkable derivations with exact heights.  Every literal state is
  pruned through the multiset layer.

Both layers optionally prune sequents the congruence-closure oracle refutes.
That is sound because every rule preserves oracle validity (cross-checked by
the soundness test campaigns), and it never removes a proof of a valid goal;
disable it with ``semantic_pruning=False`` to search the raw rule space.

The search never claims unbounded non-derivability: a negative answer always
carries its bounds.  Enumeration is restricted to sequents over the derived
term universe (goal subterms closed under the signature up to
``max_term_depth``); cut formulas, weakened atoms and rewrite witnesses all
come from that universe.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .. import kernel
from ..kernel import Calculus, CutMode, Derivation, EqMechanism, template_from
from ..syntax import (
    Atom,
    Eq,
    Pred,
    Sequent,
    Signature,
    Term,
    atom_replace,
    atom_str,
    atom_terms,
    occurrences,
    sequent_terms,
)
from .closure import TermUniverse, grow_universe

_INF = sys.maxsize


class BoundsEmpty(ValueError):
    """Raised when the requested bounds describe an empty search space."""


@dataclass(frozen=True)
class SearchBounds:
    max_height: int
    max_term_depth: int


@dataclass(frozen=True)
class NotFoundWithinBounds:
    """Exhaustive negative verdict, valid only within the embedded bounds."""
    goal: Sequent
    calculus: str
    bounds: SearchBounds


SearchResult = Union[Derivation, NotFoundWithinBounds]


def _akey(atom: Atom) -> str:
    return atom_str(atom)


class SearchContext:
    """Reusable search state: term universe, closure caches and memo tables.

    A context may serve many goals over the same signature, calculus and
    bounds, sharing its memo tables between them; every goal's terms must lie
    inside the seeded universe.
    """

    def __init__(self, sig: Signature, calc: Calculus, bounds: SearchBounds,
                 seed_terms: Iterable[Term] = (),
                 predicate_atoms: Sequence[Pred] = (),
                 semantic_pruning: bool = True):
        if bounds.max_height < 0 or bounds.max_term_depth < 0:
            raise BoundsEmpty(f"bounds {bounds} are empty")
        self.sig = sig
        self.calc = calc
        self.bounds = bounds
        self.pruning = semantic_pruning
        terms = grow_universe(seed_terms, sig, bounds.max_term_depth)
        self.universe = TermUniverse(terms)
        self.terms: Tuple[Term, ...] = tuple(terms)
        self.equality_atoms: Tuple[Eq, ...] = tuple(
            Eq(t, u) for t, u in itertools.product(self.terms, repeat=2))
        self.predicate_atoms: Tuple[Pred, ...] = tuple(
            sorted(set(predicate_atoms), key=_akey))
        self.counters = {"ms_states": 0, "lit_states": 0, "closures": 0}
        self._roots_memo: Dict[Tuple[Atom, ...], List[int]] = {}
        self._valid_memo: Dict[Tuple[Tuple[Atom, ...], Atom], bool] = {}
        self._entailed_memo: Dict[Tuple[Atom, ...], Tuple[Atom, ...]] = {}
        self._pairs_memo: Dict[Tuple[Atom, ...], Tuple[Tuple[Term, Term], ...]] = {}
        # multiset layer: (key, succ) -> [min_success_budget, max_failed_budget]
        self._ms_memo: Dict[Tuple[Tuple[Atom, ...], Atom], List[Optional[int]]] = {}
        # literal layer: (ant, succ) -> [derivation, height, max_failed_budget]
        self._lit_memo: Dict[Tuple[Tuple[Atom, ...], Atom], list] = {}
        self._mskey_memo: Dict[Tuple[Atom, ...], Tuple[Atom, ...]] = {}
        self._rw_memo: Dict[Tuple[Atom, Term, Term], List[Tuple[Tuple, Atom]]] = {}

    # -- closure-backed facts ------------------------------------------------

    def _check_in_universe(self, seq: Sequent) -> None:
        for t in sequent_terms(seq):
            if t not in self.universe:
                raise ValueError(
                    f"goal term {t} outside the context universe; seed it explicitly")

    def _mskey(self, ant: Tuple[Atom, ...]) -> Tuple[Atom, ...]:
        key = self._mskey_memo.get(ant)
        if key is None:
            key = tuple(sorted(ant, key=_akey))
            self._mskey_memo[ant] = key
        return key

    def _roots(self, key: Tuple[Atom, ...]) -> List[int]:
        eqs = tuple(a for a in key if isinstance(a, Eq))
        roots = self._roots_memo.get(eqs)
        if roots is None:
            self.counters["closures"] += 1
            u = self.universe
            pairs = [(u.id(a.lhs), u.id(a.rhs)) for a in eqs]
            roots = u.close(pairs)
            self._roots_memo[eqs] = roots
        return roots

    def _valid(self, key: Tuple[Atom, ...], succ: Atom) -> bool:
        memo_key = (key, succ)
        res = self._valid_memo.get(memo_key)
        if res is None:
            roots = self._roots(key)
            u = self.universe
            if isinstance(succ, Eq):
                res = roots[u.id(succ.lhs)] == roots[u.id(succ.rhs)]
            else:
                res = any(
                    isinstance(a, Pred) and a.name == succ.name
                    and len(a.args) == len(succ.args)
                    and all(roots[u.id(x)] == roots[u.id(y)]
                            for x, y in zip(a.args, succ.args))
                    for a in key)
            self._valid_memo[memo_key] = res
        return res

    def _related_pairs(self, key: Tuple[Atom, ...]) -> Tuple[Tuple[Term, Term], ...]:
        """Ordered pairs of distinct universe terms the antecedent relates."""
        pairs = self._pairs_memo.get(key)
        if pairs is None:
            roots = self._roots(key)
            by_root: Dict[int, List[Term]] = {}
            for i, t in enumerate(self.universe.terms):
                by_root.setdefault(roots[i], []).append(t)
            out = []
            for _, members in sorted(by_root.items()):
                if len(members) > 1:
                    out.extend((t, u) for t, u in itertools.permutations(members, 2))
            out.sort(key=lambda p: (str(p[0]), str(p[1])))
            pairs = tuple(out)
            self._pairs_memo[key] = pairs
        return pairs

    def _entailed_atoms(self, key: Tuple[Atom, ...]) -> Tuple[Atom, ...]:
        """Cut-formula candidates the antecedent semantically entails."""
        res = self._entailed_memo.get(key)
        if res is None:
            atoms: List[Atom] = [Eq(t, t) for t in self.terms]
            atoms.extend(Eq(t, u) for t, u in self._related_pairs(key))
            atoms.extend(p for p in self.predicate_atoms if self._valid(key, p))
            res = tuple(atoms)
            self._entailed_memo[key] = res
        return res

    def _cut_candidates(self, key: Tuple[Atom, ...]) -> Tuple[Atom, ...]:
        if self.pruning:
            return self._entailed_atoms(key)
        return self.equality_atoms + self.predicate_atoms

    def _eq_pair_candidates(self, key: Tuple[Atom, ...],
                            include_identity: bool) -> Iterable[Tuple[Term, Term]]:
        if self.pruning:
            if include_identity:
                return itertools.chain(((t, t) for t in self.terms),
                                       self._related_pairs(key))
            return self._related_pairs(key)
        return itertools.product(self.terms, repeat=2)

    # -- rewriting -----------------------------------------------------------

    def _rewrite_options(self, succ: Atom, frm: Term, to: Term
                         ) -> List[Tuple[Tuple, Atom]]:
        """Replace any subset of the occurrences of ``frm`` in ``succ`` by
        ``to``; results whose terms leave the universe are dropped.  The empty
        subset (a hole-free template) is always included."""
        cached = self._rw_memo.get((succ, frm, to))
        if cached is not None:
            return cached
        occs = occurrences(succ, frm)
        seen = {succ}
        out: List[Tuple[Tuple, Atom]] = [((), succ)]
        for r in range(1, len(occs) + 1):
            for combo in itertools.combinations(occs, r):
                rewritten = atom_replace(succ, combo, to)
                if rewritten in seen:
                    continue
                seen.add(rewritten)
                if all(t in self.universe for t in atom_terms(rewritten)):
                    out.append((combo, rewritten))
        self._rw_memo[(succ, frm, to)] = out
        return out

    # -- multiset layer ------------------------------------------------------

    def _ms(self, key: Tuple[Atom, ...], succ: Atom, budget: int) -> bool:
        ent = self._ms_memo.get((key, succ))
        if ent is None:
            ent = [None, -1]
            self._ms_memo[(key, succ)] = ent
        if ent[0] is not None and budget >= ent[0]:
            return True
        if budget <= ent[1]:
            return False
        if self.pruning and not self._valid(key, succ):
            ent[1] = _INF
            return False
        ok = self._ms_solve(key, succ, budget)
        if ok:
            ent[0] = budget if ent[0] is None else min(ent[0], budget)
        else:
            ent[1] = max(ent[1], budget)
        return ok

    def _ms_solve(self, key: Tuple[Atom, ...], succ: Atom, budget: int) -> bool:
        self.counters["ms_states"] += 1
        if len(key) == 1 and key[0] == succ:
            return True
        if not key and isinstance(succ, Eq) and succ.lhs == succ.rhs:
            return True
        if budget == 0:
            return False
        calc = self.calc
        b = budget - 1
        distinct = _distinct(key)

        if calc.weakening:
            for g in distinct:
                if self._ms(_remove_one(key, g), succ, b):
                    return True

        if calc.eq_mechanism is EqMechanism.EQ_LEFT_PAIR:
            for e in distinct:
                if not isinstance(e, Eq):
                    continue
                rest = _remove_one(key, e)
                for _paths, psucc in self._rewrite_options(succ, e.rhs, e.lhs):
                    if self._ms(rest, psucc, b):
                        return True
                for _paths, psucc in self._rewrite_options(succ, e.lhs, e.rhs):
                    if self._ms(rest, psucc, b):
                        return True

        if calc.eq_mechanism is EqMechanism.CNG_SHARED:
            for new in _distinct_subterms(succ):
                for old in self._cng_old_candidates(key, new):
                    eq_atom = Eq(old, new)
                    for paths, psucc in self._rewrite_options(succ, new, old):
                        if not paths:
                            continue
                        if self._ms(key, eq_atom, b) and self._ms(key, psucc, b):
                            return True
            for old, new in self._eq_pair_candidates(key, include_identity=False):
                # hole-free template: the succedent passes through unchanged
                if self._ms(key, Eq(old, new), b) and self._ms(key, succ, b):
                    return True

        if calc.eq_mechanism is EqMechanism.CNG:
            for part1, part2 in _partitions(key):
                for new in _distinct_subterms(succ):
                    for old in self._cng_old_candidates(part2, new):
                        eq_atom = Eq(old, new)
                        for paths, psucc in self._rewrite_options(succ, new, old):
                            if not paths:
                                continue
                            if self._ms(part2, eq_atom, b) and self._ms(part1, psucc, b):
                                return True
                for old, new in self._eq_pair_candidates(part2, include_identity=True):
                    if self._ms(part2, Eq(old, new), b) and self._ms(part1, succ, b):
                        return True

        if calc.contraction:
            for g in distinct:
                if self._ms(_add_one(key, g), succ, b):
                    return True

        if calc.cut is CutMode.INDEPENDENT:
            for part1, part2 in _partitions(key):
                for c in self._cut_candidates(part1):
                    if self._ms(part1, c, b) and self._ms(_add_one(part2, c), succ, b):
                        return True
        elif calc.cut is CutMode.SHARED:
            for c in self._cut_candidates(key):
                if self._ms(key, c, b) and self._ms(_add_one(key, c), succ, b):
                    return True
        return False

    def _cng_old_candidates(self, key: Tuple[Atom, ...], new: Term) -> List[Term]:
        if self.pruning:
            roots = self._roots(key)
            u = self.universe
            target = roots[u.id(new)]
            return [t for i, t in enumerate(self.universe.terms)
                    if roots[i] == target and t != new]
        return [t for t in self.terms if t != new]

    # -- literal layer -------------------------------------------------------

    def search(self, goal: Sequent) -> SearchResult:
        """First derivation found within the bounds, or the negative verdict."""
        self._check_in_universe(goal)
        found = self._lit(goal.antecedent, goal.succedent, self.bounds.max_height)
        if found is None:
            return NotFoundWithinBounds(goal, self.calc.name, self.bounds)
        return found[0]

    def _lit(self, ant: Tuple[Atom, ...], succ: Atom, budget: int
             ) -> Optional[Tuple[Derivation, int]]:
        ent = self._lit_memo.get((ant, succ))
        if ent is None:
            ent = [None, None, -1]
            self._lit_memo[(ant, succ)] = ent
        if ent[1] is not None and ent[1] <= budget:
            return ent[0], ent[1]
        if budget <= ent[2]:
            return None
        if not self._ms(self._mskey(ant), succ, budget):
            ent[2] = max(ent[2], budget)
            return None
        res = self._lit_solve(ant, succ, budget)
        if res is None:
            ent[2] = max(ent[2], budget)
        elif ent[1] is None or res[1] < ent[1]:
            ent[0], ent[1] = res
        return res

    def _lit_solve(self, ant: Tuple[Atom, ...], succ: Atom, budget: int
                   ) -> Optional[Tuple[Derivation, int]]:
        self.counters["lit_states"] += 1
        if len(ant) == 1 and ant[0] == succ:
            return kernel.axiom(succ), 0
        if not ant and isinstance(succ, Eq) and succ.lhs == succ.rhs:
            return kernel.refl(succ.lhs), 0
        if budget == 0:
            return None
        calc = self.calc
        b = budget - 1

        if calc.weakening and ant:
            sub = self._lit(ant[:-1], succ, b)
            if sub:
                return kernel.weaken(sub[0], ant[-1]), sub[1] + 1

        if calc.eq_mechanism is EqMechanism.EQ_LEFT_PAIR and ant \
                and isinstance(ant[-1], Eq):
            e = ant[-1]
            for paths, psucc in self._rewrite_options(succ, e.rhs, e.lhs):
                sub = self._lit(ant[:-1], psucc, b)
                if sub:
                    tpl = template_from(succ, paths)
                    return kernel.eq_left1(sub[0], tpl, e.lhs, e.rhs), sub[1] + 1
            for paths, psucc in self._rewrite_options(succ, e.lhs, e.rhs):
                sub = self._lit(ant[:-1], psucc, b)
                if sub:
                    tpl = template_from(succ, paths)
                    return kernel.eq_left2(sub[0], tpl, e.rhs, e.lhs), sub[1] + 1

        if calc.eq_mechanism is EqMechanism.CNG_SHARED:
            res = self._lit_cng_shared(ant, succ, b)
            if res:
                return res

        if calc.eq_mechanism is EqMechanism.CNG:
            res = self._lit_cng(ant, succ, b)
            if res:
                return res

        if calc.contraction and ant:
            sub = self._lit(ant + (ant[-1],), succ, b)
            if sub:
                return kernel.contract(sub[0]), sub[1] + 1

        if calc.exchange:
            for i in range(len(ant) - 1):
                if ant[i] == ant[i + 1]:
                    continue
                swapped = ant[:i] + (ant[i + 1], ant[i]) + ant[i + 2:]
                sub = self._lit(swapped, succ, b)
                if sub:
                    return kernel.exchange(sub[0], i), sub[1] + 1

        if calc.cut is CutMode.INDEPENDENT:
            for i in range(len(ant) + 1):
                for c in self._cut_candidates(self._mskey(ant[:i])):
                    left = self._lit(ant[:i], c, b)
                    if not left:
                        continue
                    right = self._lit(ant[i:] + (c,), succ, b)
                    if right:
                        return kernel.cut(left[0], right[0]), max(left[1], right[1]) + 1
        elif calc.cut is CutMode.SHARED:
            for c in self._cut_candidates(self._mskey(ant)):
                left = self._lit(ant, c, b)
                if not left:
                    continue
                right = self._lit(ant + (c,), succ, b)
                if right:
                    return kernel.cut_shared(left[0], right[0]), max(left[1], right[1]) + 1
        return None

    def _lit_cng_shared(self, ant, succ, b):
        key = self._mskey(ant)
        for new in _distinct_subterms(succ):
            for old in self._cng_old_candidates(key, new):
                eq_atom = Eq(old, new)
                right = self._lit(ant, eq_atom, b)
                if not right:
                    continue
                for paths, psucc in self._rewrite_options(succ, new, old):
                    if not paths:
                        continue
                    left = self._lit(ant, psucc, b)
                    if left:
                        tpl = template_from(succ, paths)
                        node = kernel.cng_shared(left[0], right[0], tpl)
                        return node, max(left[1], right[1]) + 1
        for old, new in self._eq_pair_candidates(key, include_identity=False):
            right = self._lit(ant, Eq(old, new), b)
            if not right:
                continue
            left = self._lit(ant, succ, b)
            if left:
                tpl = template_from(succ, ())
                node = kernel.cng_shared(left[0], right[0], tpl)
                return node, max(left[1], right[1]) + 1
        return None

    def _lit_cng(self, ant, succ, b):
        for i in range(len(ant) + 1):
            gamma, lam = ant[:i], ant[i:]
            lam_key = self._mskey(lam)
            for new in _distinct_subterms(succ):
                for old in self._cng_old_candidates(lam_key, new):
                    right = self._lit(lam, Eq(old, new), b)
                    if not right:
                        continue
                    for paths, psucc in self._rewrite_options(succ, new, old):
                        if not paths:
                            continue
                        left = self._lit(gamma, psucc, b)
                        if left:
                            tpl = template_from(succ, paths)
                            node = kernel.cng(left[0], right[0], tpl)
                            return node, max(left[1], right[1]) + 1
            for old, new in self._eq_pair_candidates(lam_key, include_identity=True):
                right = self._lit(lam, Eq(old, new), b)
                if not right:
                    continue
                left = self._lit(gamma, succ, b)
                if left:
                    tpl = template_from(succ, ())
                    node = kernel.cng(left[0], right[0], tpl)
                    return node, max(left[1], right[1]) + 1
        return None


def _distinct(key: Tuple[Atom, ...]) -> List[Atom]:
    out: List[Atom] = []
    for a in key:
        if not out or a != out[-1]:
            out.append(a)
    return out


def _distinct_subterms(succ: Atom) -> List[Term]:
    seen = []
    have = set()
    for t in atom_terms(succ):
        if t not in have:
            have.add(t)
            seen.append(t)
    return seen


def _remove_one(key: Tuple[Atom, ...], atom: Atom) -> Tuple[Atom, ...]:
    i = key.index(atom)
    return key[:i] + key[i + 1:]


def _add_one(key: Tuple[Atom, ...], atom: Atom) -> Tuple[Atom, ...]:
    ak = _akey(atom)
    for i, a in enumerate(key):
        if _akey(a) >= ak:
            return key[:i] + (atom,) + key[i:]
    return key + (atom,)


def _partitions(key: Tuple[Atom, ...]):
    """All splits of a sorted atom tuple into two sorted sub-multisets."""
    groups = [(a, len(list(g))) for a, g in itertools.groupby(key)]
    choices = [range(c + 1) for _, c in groups]
    for take in itertools.product(*choices):
        part1: List[Atom] = []
        part2: List[Atom] = []
        for (a, c), k in zip(groups, take):
            part1.extend([a] * k)
            part2.extend([a] * (c - k))
        yield tuple(part1), tuple(part2)


def bounded_search(goal: Sequent, calc: Calculus, bounds: SearchBounds,
                   sig: Signature, semantic_pruning: bool = True) -> SearchResult:
    """Search for a derivation of the goal within the bounds.

    A returned derivation checks in ``calc`` with height at most
    ``bounds.max_height``.  ``NotFoundWithinBounds`` means the bounded rule
    space was exhausted: no derivation over the derived term universe exists
    within the height bound.
    """
    preds = tuple(a for a in goal.antecedent if isinstance(a, Pred))
    ctx = SearchContext(sig, calc, bounds, seed_terms=sequent_terms(goal),
                        predicate_atoms=preds, semantic_pruning=semantic_pruning)
    return ctx.search(goal)
