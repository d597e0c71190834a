"""Semantic oracle: congruence closure over ground-term universes.

The hot kernel (union-find plus congruence sweeps) lives in a compiled
extension with a pure-Python twin; whichever is importable is selected here.
Set ``GROUNDEQ_PURE=1`` to force the fallback, e.g. for benchmarking.
"""
from __future__ import annotations

import itertools
import os
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..syntax import Atom, Eq, Pred, Sequent, Signature, Term, sequent_terms

if os.environ.get("GROUNDEQ_PURE") == "1":
    from .. import _ccore_py as _backend
else:
    try:
        from .. import _ccore as _backend  # type: ignore[attr-defined]
    except ImportError:
        from .. import _ccore_py as _backend


def backend_name() -> str:
    """Which closure kernel is active: "compiled" or "pure-python"."""
    return _backend.BACKEND


class TermUniverse:
    """Interned node table over a fixed set of ground terms.

    Subterms are interned before their parents, so argument ids are always
    smaller than the node id, which is what the closure kernels expect.
    """

    def __init__(self, terms: Iterable[Term] = ()):
        self._ids: Dict[Term, int] = {}
        self.terms: List[Term] = []
        self._head_ids: Dict[str, int] = {}
        self._heads: List[int] = []
        self._offsets: List[int] = [0]
        self._args: List[int] = []
        for t in terms:
            self.intern(t)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, t: Term) -> bool:
        return t in self._ids

    def intern(self, t: Term) -> int:
        known = self._ids.get(t)
        if known is not None:
            return known
        arg_ids = [self.intern(a) for a in t.args]
        head = self._head_ids.setdefault(t.head, len(self._head_ids))
        idx = len(self.terms)
        self._ids[t] = idx
        self.terms.append(t)
        self._heads.append(head)
        self._args.extend(arg_ids)
        self._offsets.append(len(self._args))
        return idx

    def id(self, t: Term) -> int:
        return self._ids[t]

    def close(self, eq_pairs: Sequence[Tuple[int, int]]) -> List[int]:
        """Roots per node (least id in class) after merging the given pairs."""
        flat: List[int] = []
        for a, b in eq_pairs:
            flat.append(a)
            flat.append(b)
        return _backend.close(len(self.terms), self._heads, self._offsets,
                              self._args, flat)


def grow_universe(seeds: Iterable[Term], sig: Optional[Signature],
                  max_depth: int) -> List[Term]:
    """All subterms of the seeds, closed under applying the signature's
    functions while the produced term depth stays within ``max_depth``."""
    have = {}
    for s in seeds:
        for t in s.subterms():
            have.setdefault(t, t.depth())
    if sig is not None:
        funs = sorted(sig.functions.items())
        changed = True
        while changed:
            changed = False
            current = sorted(have, key=lambda t: (have[t], str(t)))
            for name, arity in funs:
                for combo in itertools.product(current, repeat=arity):
                    depth = 1 + max((have[c] for c in combo), default=-1)
                    if depth > max_depth:
                        continue
                    t = Term(name, tuple(combo))
                    if t not in have:
                        have[t] = depth
                        changed = True
    return sorted(have, key=lambda t: (have[t], str(t)))


class CongruenceIndex:
    """Smallest congruence over a term universe containing the input pairs."""

    def __init__(self, universe: TermUniverse, eqs: Iterable[Eq]):
        self.universe = universe
        pairs = [(universe.intern(e.lhs), universe.intern(e.rhs)) for e in eqs]
        self.roots = universe.close(pairs)

    def related(self, t: Term, u: Term) -> bool:
        try:
            return self.roots[self.universe.id(t)] == self.roots[self.universe.id(u)]
        except KeyError:
            raise ValueError(f"term outside the closure universe: {t} / {u}") from None

    def classes(self) -> List[Tuple[Term, ...]]:
        by_root: Dict[int, List[Term]] = {}
        for i, t in enumerate(self.universe.terms):
            by_root.setdefault(self.roots[i], []).append(t)
        return [tuple(ts) for _, ts in sorted(by_root.items())]


def congruence_closure(eqs: Sequence[Eq], sig: Optional[Signature] = None,
                       universe_depth: int = 0) -> CongruenceIndex:
    """Close the input equalities over their subterm universe, optionally
    extended by signature application up to ``universe_depth``."""
    seeds: List[Term] = []
    for e in eqs:
        seeds.append(e.lhs)
        seeds.append(e.rhs)
    terms = grow_universe(seeds, sig, universe_depth) if sig is not None else seeds
    u = TermUniverse(terms)
    return CongruenceIndex(u, eqs)


def _predicate_match(succ: Pred, antecedent: Sequence[Atom],
                     roots: List[int], u: TermUniverse) -> bool:
    sids = [u.id(a) for a in succ.args]
    for atom in antecedent:
        if isinstance(atom, Pred) and atom.name == succ.name \
                and len(atom.args) == len(succ.args):
            if all(roots[u.id(b)] == roots[s] for b, s in zip(atom.args, sids)):
                return True
    return False


def valid(seq: Sequent) -> bool:
    """Semantic verdict: does the antecedent entail the succedent?

    An equality succedent must relate under the congruence closure of the
    antecedent equalities; a predicate succedent must match some antecedent
    predicate atom of the same symbol with pairwise related arguments.
    """
    u = TermUniverse(sequent_terms(seq))
    pairs = [(u.id(a.lhs), u.id(a.rhs)) for a in seq.antecedent if isinstance(a, Eq)]
    roots = u.close(pairs)
    succ = seq.succedent
    if isinstance(succ, Eq):
        return roots[u.id(succ.lhs)] == roots[u.id(succ.rhs)]
    return _predicate_match(succ, seq.antecedent, roots, u)
