"""Concrete syntax for signatures, ground terms, atoms and sequents.

Grammar accepted by the parsers in this module:

    term    := IDENT | IDENT "(" term ("," term)* ")"
    atom    := term "=" term | IDENT "(" term ("," term)* ")" | IDENT
    sequent := [atom ("," atom)*] "=>" atom

Antecedents are ordered sequences, not multisets: exchange is an inference
rule, so position is semantic.  All values are immutable; equality of terms,
atoms and sequents is syntactic identity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Tuple, Union

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

#: Leaf head reserved for the hole of a template (never a declarable symbol).
HOLE = "_"


class ParseError(ValueError):
    """Malformed input text; ``offset`` is the byte position of the failure."""

    def __init__(self, message: str, offset: Optional[int] = None):
        if offset is not None:
            super().__init__(f"{message} (byte {offset})")
        else:
            super().__init__(message)
        self.message = message
        self.offset = offset


class UnknownSymbol(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class EmptySuccedent(ParseError):
    pass


class BadSignature(ValueError):
    pass


class Signature:
    """Declared function and predicate symbols, each with a fixed arity.

    Arity-0 functions are the individual parameters (constants).  The two
    name spaces are disjoint and ``=`` is built in, never declarable.
    """

    def __init__(self, functions: Optional[Dict[str, int]] = None,
                 predicates: Optional[Dict[str, int]] = None):
        self.functions: Dict[str, int] = dict(functions or {})
        self.predicates: Dict[str, int] = dict(predicates or {})
        for space in (self.functions, self.predicates):
            for name, arity in space.items():
                if not NAME_RE.match(name):
                    raise BadSignature(f"bad symbol name {name!r}")
                if not isinstance(arity, int) or arity < 0:
                    raise BadSignature(f"bad arity {arity!r} for {name!r}")
        overlap = set(self.functions) & set(self.predicates)
        if overlap:
            raise BadSignature(
                f"function/predicate name spaces overlap: {sorted(overlap)}")

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Signature)
                and self.functions == other.functions
                and self.predicates == other.predicates)

    def __repr__(self) -> str:
        return f"Signature(functions={self.functions!r}, predicates={self.predicates!r})"

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse the .sig format: lines ``fun NAME ARITY`` / ``pred NAME ARITY``."""
        funs: Dict[str, int] = {}
        preds: Dict[str, int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in ("fun", "pred"):
                raise BadSignature(f"line {lineno}: expected 'fun NAME ARITY' or 'pred NAME ARITY'")
            kind, name, arity_s = parts
            try:
                arity = int(arity_s)
            except ValueError:
                raise BadSignature(f"line {lineno}: bad arity {arity_s!r}") from None
            space = funs if kind == "fun" else preds
            if name in funs or name in preds:
                raise BadSignature(f"line {lineno}: duplicate symbol {name!r}")
            space[name] = arity
        return cls(funs, preds)

    def dump(self) -> str:
        lines = [f"fun {n} {a}" for n, a in sorted(self.functions.items())]
        lines += [f"pred {n} {a}" for n, a in sorted(self.predicates.items())]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Term:
    """Ground first-order term.  ``args`` length must equal the declared arity.

    A head of ``"_"`` marks a template hole; plain terms never contain one.
    """
    head: str
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        return term_str(self)

    @property
    def is_hole(self) -> bool:
        return self.head == HOLE

    def subterms(self) -> Iterator["Term"]:
        """All subterms in pre-order, including the term itself."""
        yield self
        for a in self.args:
            yield from a.subterms()

    def depth(self) -> int:
        if not self.args:
            return 0
        return 1 + max(a.depth() for a in self.args)


@dataclass(frozen=True)
class Eq:
    """Equality atom between two ground terms."""
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return atom_str(self)


@dataclass(frozen=True)
class Pred:
    """Predicate symbol applied to ground terms."""
    name: str
    args: Tuple[Term, ...] = ()

    def __str__(self) -> str:
        return atom_str(self)


Atom = Union[Eq, Pred]


@dataclass(frozen=True)
class Sequent:
    """Ordered antecedent of atoms with a single atomic succedent."""
    antecedent: Tuple[Atom, ...]
    succedent: Atom

    def __str__(self) -> str:
        return sequent_str(self)


def is_identity(atom: Atom) -> bool:
    """True for equalities of the shape p=p (syntactic identity of sides)."""
    return isinstance(atom, Eq) and atom.lhs == atom.rhs


def atom_children(atom: Atom) -> Tuple[Term, ...]:
    if isinstance(atom, Eq):
        return (atom.lhs, atom.rhs)
    return atom.args


def atom_with_children(atom: Atom, children: Tuple[Term, ...]) -> Atom:
    if isinstance(atom, Eq):
        lhs, rhs = children
        return Eq(lhs, rhs)
    return Pred(atom.name, children)


def atom_terms(atom: Atom) -> Iterator[Term]:
    """All term nodes occurring in the atom, in pre-order."""
    for child in atom_children(atom):
        yield from child.subterms()


def sequent_terms(seq: Sequent) -> Iterator[Term]:
    for a in seq.antecedent:
        yield from atom_terms(a)
    yield from atom_terms(seq.succedent)


# ---------------------------------------------------------------------------
# Positions.  A path into an atom is a tuple of child indices: the first
# index selects the equality side (0 lhs, 1 rhs) or the predicate argument,
# the rest descends through term arguments.

Path = Tuple[int, ...]


def term_at(term: Term, path: Path) -> Term:
    for i in path:
        term = term.args[i]
    return term


def atom_at(atom: Atom, path: Path) -> Term:
    return term_at(atom_children(atom)[path[0]], path[1:])


def _term_replace(term: Term, paths: Iterable[Path], repl: Term) -> Term:
    paths = [p for p in paths]
    if any(len(p) == 0 for p in paths):
        return repl
    by_child: Dict[int, list] = {}
    for p in paths:
        by_child.setdefault(p[0], []).append(p[1:])
    if not by_child:
        return term
    args = tuple(
        _term_replace(a, by_child[i], repl) if i in by_child else a
        for i, a in enumerate(term.args))
    return Term(term.head, args)


def atom_replace(atom: Atom, paths: Iterable[Path], repl: Term) -> Atom:
    """Replace the subterms at all the given positions by ``repl``."""
    by_child: Dict[int, list] = {}
    for p in paths:
        by_child.setdefault(p[0], []).append(p[1:])
    children = tuple(
        _term_replace(c, by_child[i], repl) if i in by_child else c
        for i, c in enumerate(atom_children(atom)))
    return atom_with_children(atom, children)


def term_positions(term: Term, prefix: Path = ()) -> Iterator[Tuple[Path, Term]]:
    yield prefix, term
    for i, a in enumerate(term.args):
        yield from term_positions(a, prefix + (i,))


def atom_positions(atom: Atom) -> Iterator[Tuple[Path, Term]]:
    """All term positions of the atom with their subterms, in pre-order."""
    for i, c in enumerate(atom_children(atom)):
        yield from term_positions(c, (i,))


def occurrences(atom: Atom, sub: Term) -> Tuple[Path, ...]:
    return tuple(p for p, t in atom_positions(atom) if t == sub)


# ---------------------------------------------------------------------------
# Serialization.

def term_str(t: Term) -> str:
    if not t.args:
        return t.head
    return f"{t.head}({','.join(term_str(a) for a in t.args)})"


def atom_str(a: Atom) -> str:
    if isinstance(a, Eq):
        return f"{term_str(a.lhs)}={term_str(a.rhs)}"
    if not a.args:
        return a.name
    return f"{a.name}({','.join(term_str(x) for x in a.args)})"


def sequent_str(s: Sequent) -> str:
    succ = atom_str(s.succedent)
    if not s.antecedent:
        return f"=> {succ}"
    return f"{', '.join(atom_str(a) for a in s.antecedent)} => {succ}"


# ---------------------------------------------------------------------------
# Parsing.

_TOKEN_RE = re.compile(r"=>|=|,|\(|\)|[A-Za-z][A-Za-z0-9_]*|_")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []  # (kind, value, offset); kind is the token text class
        pos = 0
        n = len(text)
        while pos < n:
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            tok = m.group()
            if tok in ("=>", "=", ",", "(", ")"):
                kind = tok
            elif tok == HOLE:
                kind = "hole"
            else:
                kind = "ident"
            self.tokens.append((kind, tok, pos))
            pos = m.end()
        self.tokens.append(("end", "", n))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != "end":
            self.i += 1
        return tok

    def expect(self, kind: str):
        k, v, off = self.next()
        if k != kind:
            raise ParseError(f"expected {kind!r}, found {v!r}", off)
        return v, off


# Raw application tree: (name, children, offset, is_hole).  Role (function
# versus predicate) is resolved afterwards from the syntactic position.
_Raw = Tuple[str, tuple, int, bool]


def _raw_application(lex: _Lexer, allow_hole: bool) -> _Raw:
    kind, name, off = lex.next()
    if kind == "hole":
        if not allow_hole:
            raise ParseError("hole '_' not allowed here", off)
        return (HOLE, (), off, True)
    if kind != "ident":
        raise ParseError(f"expected a symbol, found {name!r}", off)
    if lex.peek()[0] != "(":
        return (name, (), off, False)
    lex.next()
    children = [_raw_application(lex, allow_hole)]
    while lex.peek()[0] == ",":
        lex.next()
        children.append(_raw_application(lex, allow_hole))
    lex.expect(")")
    return (name, tuple(children), off, False)


class _SigContext:
    """Resolves symbol roles against a signature, or infers one on the fly."""

    def __init__(self, sig: Optional[Signature]):
        self.sig = sig
        self.inferring = sig is None
        self.functions: Dict[str, int] = {} if sig is None else sig.functions
        self.predicates: Dict[str, int] = {} if sig is None else sig.predicates

    def _record(self, space: Dict[str, int], other: Dict[str, int],
                role: str, name: str, arity: int, off: int) -> None:
        if name in other:
            raise UnknownSymbol(f"{name!r} used both as {role} and otherwise", off)
        known = space.get(name)
        if known is None:
            if self.inferring:
                space[name] = arity
            else:
                raise UnknownSymbol(f"unknown {role} symbol {name!r}", off)
        elif known != arity:
            raise ArityMismatch(
                f"{role} {name!r} expects {known} argument(s), got {arity}", off)

    def term(self, raw: _Raw) -> Term:
        name, children, off, hole = raw
        if hole:
            return Term(HOLE)
        self._record(self.functions, self.predicates, "function", name,
                     len(children), off)
        return Term(name, tuple(self.term(c) for c in children))

    def predicate(self, raw: _Raw) -> Pred:
        name, children, off, hole = raw
        if hole:
            raise ParseError("hole '_' cannot be an atom", off)
        self._record(self.predicates, self.functions, "predicate", name,
                     len(children), off)
        return Pred(name, tuple(self.term(c) for c in children))

    def result_signature(self) -> Signature:
        return Signature(self.functions, self.predicates)


def _parse_atom(lex: _Lexer, ctx: _SigContext, allow_hole: bool = False) -> Atom:
    raw = _raw_application(lex, allow_hole)
    if lex.peek()[0] == "=":
        lex.next()
        rhs = _raw_application(lex, allow_hole)
        return Eq(ctx.term(raw), ctx.term(rhs))
    return ctx.predicate(raw)


def _finish(lex: _Lexer) -> None:
    kind, v, off = lex.peek()
    if kind != "end":
        raise ParseError(f"trailing input {v!r}", off)


def parse_term(text: str, sig: Optional[Signature] = None) -> Term:
    """Parse a ground term; with ``sig=None`` the arities are inferred."""
    lex = _Lexer(text)
    ctx = _SigContext(sig)
    t = ctx.term(_raw_application(lex, allow_hole=False))
    _finish(lex)
    return t


def parse_atom(text: str, sig: Optional[Signature] = None) -> Atom:
    lex = _Lexer(text)
    ctx = _SigContext(sig)
    a = _parse_atom(lex, ctx)
    _finish(lex)
    return a


def parse_sequent(text: str, sig: Optional[Signature] = None) -> Sequent:
    """Parse ``atom, ..., atom => atom``; antecedent order is preserved."""
    lex = _Lexer(text)
    ctx = _SigContext(sig)
    antecedent = []
    if lex.peek()[0] != "=>":
        antecedent.append(_parse_atom(lex, ctx))
        while lex.peek()[0] == ",":
            lex.next()
            antecedent.append(_parse_atom(lex, ctx))
    kind, v, off = lex.next()
    if kind != "=>":
        raise ParseError(f"expected '=>', found {v!r}", off)
    if lex.peek()[0] == "end":
        raise EmptySuccedent("sequent has no succedent", lex.peek()[2])
    succedent = _parse_atom(lex, ctx)
    _finish(lex)
    return Sequent(tuple(antecedent), succedent)


def infer_signature(*texts: str) -> Signature:
    """Infer a signature from sequent texts (used for inline CLI goals)."""
    ctx = _SigContext(None)
    for text in texts:
        lex = _Lexer(text)
        antecedent_done = False
        if lex.peek()[0] != "=>":
            _parse_atom(lex, ctx)
            while lex.peek()[0] == ",":
                lex.next()
                _parse_atom(lex, ctx)
        kind, v, off = lex.next()
        if kind != "=>":
            raise ParseError(f"expected '=>', found {v!r}", off)
        _parse_atom(lex, ctx)
        _finish(lex)
        del antecedent_done
    return ctx.result_signature()


def validate_term(t: Term, sig: Signature) -> None:
    """Check arity and symbol declarations of every node; raises on failure."""
    if t.is_hole:
        raise UnknownSymbol("hole '_' in a plain term")
    arity = sig.functions.get(t.head)
    if arity is None:
        raise UnknownSymbol(f"unknown function symbol {t.head!r}")
    if arity != len(t.args):
        raise ArityMismatch(f"function {t.head!r} expects {arity} argument(s), got {len(t.args)}")
    for a in t.args:
        validate_term(a, sig)
