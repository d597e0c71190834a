"""Forward derivation fuzzing: seeded random generation of checkable proofs.

Derivations are grown from axiom and reflexivity leaves by weighted random
rule application, always through the kernel's forward builders, so every
output checks in the configured calculus by construction (the test campaigns
re-check them independently).  Everything is driven by one ``random.Random``
instance, so results are deterministic per seed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .. import kernel
from ..kernel import Calculus, CutMode, Derivation, EqMechanism, template_from
from ..syntax import (
    Atom,
    Eq,
    Pred,
    Signature,
    Term,
    atom_positions,
    occurrences,
)
from ..transforms import derive_member, weaken_exchange_to

_DEFAULT_WEIGHTS = {
    "weaken": 2.0,
    "exchange": 1.2,
    "contract": 1.0,
    "cut": 0.6,
    "cut-shared": 0.6,
    "eq-left-1": 2.0,
    "eq-left-2": 1.0,
    "cng": 1.6,
    "cng-shared": 1.6,
}


@dataclass
class FuzzConfig:
    seed: int
    target_size: int
    calculus: Calculus
    signature: Signature
    weights: Optional[Dict[str, float]] = None
    max_term_depth: int = 2
    predicate_weight: float = 0.2
    identity_weight: float = 0.15
    special_atoms: Tuple[Atom, ...] = ()
    special_weight: float = 0.0
    succedent_equality: bool = False
    require_contraction: bool = False

    def rule_weights(self) -> Dict[str, float]:
        """Effective weights; rules the calculus disables are forced to 0."""
        w = dict(_DEFAULT_WEIGHTS)
        if self.weights:
            w.update(self.weights)
        calc = self.calculus
        if not calc.contraction:
            w["contract"] = 0.0
        if not calc.weakening:
            w["weaken"] = 0.0
        if not calc.exchange:
            w["exchange"] = 0.0
        w["cut"] = w["cut"] if calc.cut is CutMode.INDEPENDENT else 0.0
        w["cut-shared"] = w["cut-shared"] if calc.cut is CutMode.SHARED else 0.0
        if calc.eq_mechanism is not EqMechanism.EQ_LEFT_PAIR:
            w["eq-left-1"] = w["eq-left-2"] = 0.0
        if calc.eq_mechanism is not EqMechanism.CNG:
            w["cng"] = 0.0
        if calc.eq_mechanism is not EqMechanism.CNG_SHARED:
            w["cng-shared"] = 0.0
        return {k: v for k, v in w.items() if v > 0.0}


class _Generator:
    def __init__(self, cfg: FuzzConfig, rng: random.Random):
        if cfg.require_contraction and not cfg.calculus.contraction:
            raise ValueError("cannot require contractions in a contraction-free calculus")
        self.cfg = cfg
        self.rng = rng
        self.sig = cfg.signature
        self.constants = sorted(n for n, a in self.sig.functions.items() if a == 0)
        self.builders = sorted((n, a) for n, a in self.sig.functions.items() if a > 0)
        self.predicates = sorted(self.sig.predicates.items())
        if not self.constants:
            raise ValueError("fuzzing needs at least one constant in the signature")
        self.pool: list[Derivation] = []
        self.sizes: Dict[int, int] = {}

    # -- raw material --------------------------------------------------------

    def random_term(self, depth: Optional[int] = None) -> Term:
        rng = self.rng
        if depth is None:
            depth = self.cfg.max_term_depth
        if depth == 0 or not self.builders or rng.random() < 0.45:
            return Term(rng.choice(self.constants))
        name, arity = rng.choice(self.builders)
        return Term(name, tuple(self.random_term(depth - 1) for _ in range(arity)))

    def random_atom(self) -> Atom:
        rng = self.rng
        if self.cfg.special_atoms and rng.random() < self.cfg.special_weight:
            return rng.choice(self.cfg.special_atoms)
        if self.predicates and rng.random() < self.cfg.predicate_weight:
            name, arity = rng.choice(self.predicates)
            return Pred(name, tuple(self.random_term() for _ in range(arity)))
        if rng.random() < self.cfg.identity_weight:
            t = self.random_term()
            return Eq(t, t)
        return Eq(self.random_term(), self.random_term())

    def _leaf(self) -> Derivation:
        if self.rng.random() < 0.25:
            return kernel.refl(self.random_term())
        return kernel.axiom(self.random_atom())

    # -- pool management -----------------------------------------------------

    def _add(self, d: Derivation, size: int) -> None:
        self.pool.append(d)
        self.sizes[id(d)] = size

    def _size(self, d: Derivation) -> int:
        return self.sizes.get(id(d)) or kernel.stats(d).node_count

    def _pick(self) -> Derivation:
        return self.rng.choice(self.pool)

    # -- rule steps ----------------------------------------------------------

    def _occurrence_subset(self, atom: Atom, sub: Term) -> Tuple:
        occs = occurrences(atom, sub)
        chosen = tuple(p for p in occs if self.rng.random() < 0.7)
        return chosen

    def step_weaken(self):
        d = self._pick()
        self._add(kernel.weaken(d, self.random_atom()), self._size(d) + 1)

    def step_exchange(self):
        d = self._pick()
        n = len(d.conclusion.antecedent)
        if n < 2:
            return
        i = self.rng.randrange(n - 1)
        self._add(kernel.exchange(d, i), self._size(d) + 1)

    def step_contract(self):
        d = self._pick()
        ant = d.conclusion.antecedent
        if len(ant) >= 2 and ant[-1] == ant[-2]:
            self._add(kernel.contract(d), self._size(d) + 1)
            return
        if not ant:
            return
        doubled = kernel.weaken(d, ant[-1])
        self._add(kernel.contract(doubled), self._size(d) + 2)

    def step_eq_left(self, kind: int):
        d = self._pick()
        succ = d.conclusion.succedent
        terms = sorted({t for _, t in atom_positions(succ)}, key=str)
        if not terms:
            return
        old = self.rng.choice(terms)
        tpl = template_from(succ, self._occurrence_subset(succ, old))
        new = self.random_term()
        build = kernel.eq_left1 if kind == 1 else kernel.eq_left2
        self._add(build(d, tpl, old, new), self._size(d) + 1)

    def step_cut(self):
        left = self._pick()
        right = self.rng.choice(
            [e for e in self.pool if e.conclusion.antecedent and
             e.conclusion.antecedent[-1] == left.conclusion.succedent]
            or [kernel.weaken(self._pick(), left.conclusion.succedent)])
        self._add(kernel.cut(left, right),
                  self._size(left) + self._size(right) + 1)

    def step_cut_shared(self):
        left = self._pick()
        gamma = left.conclusion.antecedent
        mates = [e for e in self.pool if e.conclusion.antecedent == gamma]
        body = self.rng.choice(mates)
        right = kernel.weaken(body, left.conclusion.succedent)
        self._add(kernel.cut_shared(left, right),
                  self._size(left) + self._size(body) + 2)

    def step_cng(self):
        left = self._pick()
        eq_mates = [e for e in self.pool if isinstance(e.conclusion.succedent, Eq)]
        if not eq_mates:
            return
        right = self.rng.choice(eq_mates)
        old = right.conclusion.succedent.lhs
        tpl = template_from(left.conclusion.succedent,
                            self._occurrence_subset(left.conclusion.succedent, old))
        self._add(kernel.cng(left, right, tpl),
                  self._size(left) + self._size(right) + 1)

    def step_cng_shared(self):
        left = self._pick()
        gamma = left.conclusion.antecedent
        mates = [e for e in self.pool
                 if e.conclusion.antecedent == gamma
                 and isinstance(e.conclusion.succedent, Eq)]
        if mates and self.rng.random() < 0.6:
            right = self.rng.choice(mates)
            extra = 1
        else:
            eq_positions = [i for i, a in enumerate(gamma) if isinstance(a, Eq)]
            if eq_positions and self.rng.random() < 0.7:
                right = derive_member(gamma, self.rng.choice(eq_positions))
            else:
                right = weaken_exchange_to(kernel.refl(self.random_term()), gamma)
            extra = kernel.stats(right).node_count + 1
        old = right.conclusion.succedent.lhs
        tpl = template_from(left.conclusion.succedent,
                            self._occurrence_subset(left.conclusion.succedent, old))
        self._add(kernel.cng_shared(left, right, tpl), self._size(left) + extra)

    # -- driver --------------------------------------------------------------

    def run(self) -> Derivation:
        cfg = self.cfg
        for _ in range(3):
            self._add(self._leaf(), 1)
        if cfg.succedent_equality:
            self._add(kernel.refl(self.random_term()), 1)
        steps = {
            "weaken": self.step_weaken,
            "exchange": self.step_exchange,
            "contract": self.step_contract,
            "eq-left-1": lambda: self.step_eq_left(1),
            "eq-left-2": lambda: self.step_eq_left(2),
            "cut": self.step_cut,
            "cut-shared": self.step_cut_shared,
            "cng": self.step_cng,
            "cng-shared": self.step_cng_shared,
        }
        weights = cfg.rule_weights()
        names = sorted(weights)
        wvals = [weights[n] for n in names]
        budget = max(cfg.target_size * 8, 40)
        for _ in range(budget):
            if max(self.sizes.values()) >= cfg.target_size:
                break
            steps[self.rng.choices(names, weights=wvals)[0]]()

        candidates = self.pool
        if cfg.succedent_equality:
            candidates = [d for d in candidates
                          if isinstance(d.conclusion.succedent, Eq)]
        best = max(candidates, key=self._size)
        if cfg.require_contraction and kernel.stats(best).contractions == 0:
            best = self._wrap_contraction(best)
        return best

    def _wrap_contraction(self, d: Derivation) -> Derivation:
        ant = d.conclusion.antecedent
        if ant:
            return kernel.contract(kernel.weaken(d, ant[-1]))
        extra = self.random_atom()
        return kernel.contract(kernel.weaken(kernel.weaken(d, extra), extra))


def fuzz_derivation(cfg: FuzzConfig) -> Derivation:
    """Grow one random derivation that checks in ``cfg.calculus``."""
    rng = random.Random(cfg.seed)
    return _Generator(cfg, rng).run()
