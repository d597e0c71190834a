"""Derivation files (.eqd): s-expression encoding of rule-labelled proof trees.

A node is ``(RULE PARAMS (PREMISE)* (seq ATOM* => ATOM))`` with the premises
before the conclusion.  Params carry the rule witnesses: introduced atoms,
swap/split indices, templates (atoms with holes written ``_``) and the
rewritten terms.  Canonical output puts one node per line with two-space
indentation, which keeps fixture diffs readable.
"""
from __future__ import annotations

import re
from typing import List, Optional, Tuple, Union

from .kernel import (
    Axiom,
    Cng,
    CngShared,
    Contract,
    Cut,
    CutShared,
    Derivation,
    EqLeft1,
    EqLeft2,
    Exchange,
    Refl,
    RuleApp,
    Template,
    Weaken,
)
from .syntax import (
    HOLE,
    Atom,
    Eq,
    ParseError,
    Pred,
    Sequent,
    Signature,
    Term,
)


class UnknownRuleName(ParseError):
    pass


class PremiseCountMismatch(ParseError):
    pass


# ---------------------------------------------------------------------------
# Reader: plain s-expressions made of parens and symbol tokens.

_SX_TOKEN = re.compile(r"[()]|[^\s()]+")

SExpr = Union[str, List["SExpr"]]


def _read_sexpr(text: str) -> Tuple[SExpr, int]:
    """Read the single toplevel s-expression; returns it and its end offset."""
    stack: List[Tuple[List[SExpr], int]] = []
    top: Optional[SExpr] = None
    pos, n = 0, len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == ";":
            nl = text.find("\n", pos)
            pos = n if nl < 0 else nl + 1
            continue
        m = _SX_TOKEN.match(text, pos)
        tok = m.group()
        if tok == "(":
            stack.append(([], pos))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", pos)
            done, _ = stack.pop()
            if stack:
                stack[-1][0].append(done)
            else:
                top = done
                pos = m.end()
                break
        else:
            if not stack:
                top = tok
                pos = m.end()
                break
            stack[-1][0].append(tok)
        pos = m.end()
    if stack:
        raise ParseError("unexpected end of input inside '('", stack[-1][1])
    if top is None:
        raise ParseError("empty input", 0)
    return top, pos


# ---------------------------------------------------------------------------
# Decoding against a signature.

def _decode_term(x: SExpr, sig: Signature, allow_hole: bool) -> Term:
    if isinstance(x, str):
        if x == HOLE:
            if not allow_hole:
                raise ParseError("hole '_' only allowed inside templates")
            return Term(HOLE)
        arity = sig.functions.get(x)
        if arity is None:
            raise ParseError(f"unknown constant {x!r}")
        if arity != 0:
            raise ParseError(f"function {x!r} expects {arity} argument(s), got 0")
        return Term(x)
    if not x or not isinstance(x[0], str):
        raise ParseError(f"bad term {x!r}")
    head, args = x[0], x[1:]
    arity = sig.functions.get(head)
    if arity is None:
        raise ParseError(f"unknown function symbol {head!r}")
    if arity != len(args):
        raise ParseError(f"function {head!r} expects {arity} argument(s), got {len(args)}")
    return Term(head, tuple(_decode_term(a, sig, allow_hole) for a in args))


def _decode_atom(x: SExpr, sig: Signature, allow_hole: bool = False) -> Atom:
    if isinstance(x, str):
        arity = sig.predicates.get(x)
        if arity is None:
            raise ParseError(f"unknown predicate {x!r}")
        if arity != 0:
            raise ParseError(f"predicate {x!r} expects {arity} argument(s), got 0")
        return Pred(x)
    if not x or not isinstance(x[0], str):
        raise ParseError(f"bad atom {x!r}")
    head, args = x[0], x[1:]
    if head == "=":
        if len(args) != 2:
            raise ParseError("'=' takes exactly two terms")
        return Eq(_decode_term(args[0], sig, allow_hole),
                  _decode_term(args[1], sig, allow_hole))
    arity = sig.predicates.get(head)
    if arity is None:
        raise ParseError(f"unknown predicate {head!r}")
    if arity != len(args):
        raise ParseError(f"predicate {head!r} expects {arity} argument(s), got {len(args)}")
    return Pred(head, tuple(_decode_term(a, sig, allow_hole) for a in args))


def _decode_template(x: SExpr, sig: Signature) -> Template:
    return Template(_decode_atom(x, sig, allow_hole=True))


def _decode_int(x: SExpr) -> int:
    if isinstance(x, str):
        try:
            return int(x)
        except ValueError:
            pass
    raise ParseError(f"expected an integer, found {x!r}")


def _decode_sequent(x: SExpr, sig: Signature) -> Sequent:
    if not isinstance(x, list) or not x or x[0] != "seq":
        raise ParseError(f"expected (seq ...), found {x!r}")
    body = x[1:]
    if "=>" not in body:
        raise ParseError("sequent without '=>'")
    arrow = body.index("=>")
    succ_part = body[arrow + 1:]
    if len(succ_part) != 1:
        raise ParseError("sequent needs exactly one succedent atom")
    antecedent = tuple(_decode_atom(a, sig) for a in body[:arrow])
    return Sequent(antecedent, _decode_atom(succ_part[0], sig))


# Per-rule parameter layout: "a"=atom, "i"=int, "t"=template, "m"=term.
_PARAM_LAYOUT = {
    "axiom": "",
    "refl": "",
    "weaken": "a",
    "exchange": "i",
    "contract": "",
    "cut": "ai",
    "cut-shared": "a",
    "eq-left-1": "tmm",
    "eq-left-2": "tmm",
    "cng": "tmmi",
    "cng-shared": "tmm",
}
_RULE_PREMISES = {
    "axiom": 0, "refl": 0, "weaken": 1, "exchange": 1, "contract": 1,
    "cut": 2, "cut-shared": 2, "eq-left-1": 1, "eq-left-2": 1,
    "cng": 2, "cng-shared": 2,
}


def _decode_node(x: SExpr, sig: Signature) -> Derivation:
    if not isinstance(x, list) or not x or not isinstance(x[0], str):
        raise ParseError(f"expected a rule node, found {x!r}")
    name = x[0]
    layout = _PARAM_LAYOUT.get(name)
    if layout is None:
        raise UnknownRuleName(f"unknown rule {name!r}")
    want = _RULE_PREMISES[name]
    rest = x[1:]
    if len(rest) != len(layout) + want + 1:
        raise PremiseCountMismatch(
            f"{name} takes {len(layout)} param(s), {want} premise(s) and a conclusion; "
            f"got {len(rest)} item(s)")
    params = []
    for code, item in zip(layout, rest[:len(layout)]):
        if code == "a":
            params.append(_decode_atom(item, sig))
        elif code == "i":
            params.append(_decode_int(item))
        elif code == "t":
            params.append(_decode_template(item, sig))
        else:
            params.append(_decode_term(item, sig, allow_hole=False))
    premises = tuple(_decode_node(p, sig) for p in rest[len(layout):-1])
    conclusion = _decode_sequent(rest[-1], sig)

    if name == "axiom":
        rule: RuleApp = Axiom()
    elif name == "refl":
        succ = conclusion.succedent
        if not isinstance(succ, Eq):
            raise ParseError("refl conclusion must be an equality")
        rule = Refl(succ.lhs)
    elif name == "weaken":
        rule = Weaken(params[0])
    elif name == "exchange":
        rule = Exchange(params[0])
    elif name == "contract":
        rule = Contract()
    elif name == "cut":
        rule = Cut(params[0], params[1])
    elif name == "cut-shared":
        rule = CutShared(params[0])
    elif name == "eq-left-1":
        rule = EqLeft1(params[0], params[1], params[2])
    elif name == "eq-left-2":
        rule = EqLeft2(params[0], params[1], params[2])
    elif name == "cng":
        rule = Cng(params[0], params[1], params[2], params[3])
    else:
        rule = CngShared(params[0], params[1], params[2])
    return Derivation(conclusion, rule, premises)


def parse_derivation(text: str, sig: Signature) -> Derivation:
    sx, end = _read_sexpr(text)
    if text[end:].strip():
        raise ParseError("trailing input after the derivation", end)
    return _decode_node(sx, sig)


# ---------------------------------------------------------------------------
# Encoding.

def _sx_term(t: Term) -> str:
    if not t.args:
        return t.head
    return "(" + " ".join([t.head] + [_sx_term(a) for a in t.args]) + ")"


def _sx_atom(a: Atom) -> str:
    if isinstance(a, Eq):
        return f"(= {_sx_term(a.lhs)} {_sx_term(a.rhs)})"
    if not a.args:
        return a.name
    return "(" + " ".join([a.name] + [_sx_term(x) for x in a.args]) + ")"


def _sx_sequent(s: Sequent) -> str:
    parts = ["seq"] + [_sx_atom(a) for a in s.antecedent] + ["=>", _sx_atom(s.succedent)]
    return "(" + " ".join(parts) + ")"


def _rule_params(rule: RuleApp) -> List[str]:
    if isinstance(rule, Weaken):
        return [_sx_atom(rule.atom)]
    if isinstance(rule, Exchange):
        return [str(rule.index)]
    if isinstance(rule, Cut):
        return [_sx_atom(rule.formula), str(rule.split)]
    if isinstance(rule, CutShared):
        return [_sx_atom(rule.formula)]
    if isinstance(rule, (EqLeft1, EqLeft2, CngShared)):
        return [_sx_atom(rule.template.shape), _sx_term(rule.old), _sx_term(rule.new)]
    if isinstance(rule, Cng):
        return [_sx_atom(rule.template.shape), _sx_term(rule.old),
                _sx_term(rule.new), str(rule.split)]
    return []


def serialize_derivation(d: Derivation) -> str:
    """Canonical form: one node per line, premises before the conclusion."""
    lines: List[str] = []
    # (node, indent, emitted) stack keeps this iterative for deep proofs.
    stack: List[Tuple[Derivation, str, bool]] = [(d, "", False)]
    while stack:
        node, indent, emitted = stack.pop()
        if emitted:
            lines.append(indent + "  " + _sx_sequent(node.conclusion) + ")")
            continue
        head = " ".join([node.rule.rule_name] + _rule_params(node.rule))
        lines.append(indent + "(" + head)
        stack.append((node, indent, True))
        for p in reversed(node.premises):
            stack.append((p, indent + "  ", False))
    return "\n".join(lines) + "\n"
