"""Reading and printing sorts, terms, propositions and sequents.

Surface forms::

    sort     iota | o | (-> T U ...)
    term     x | c | {K iota o} | (f t ...) | ({alpha T U} t u) | (: x T)
    prop     true | false | P | (P t ...) | (=> a b) | (and a b) | (or a b)
             | (forall (x T) a) | (exists (x T) a)
    sequent  (|- (a ...) b)

An identifier is resolved as a bound variable, then a declared symbol,
then a variable declared in the environment. ``(: x T)`` annotates a free
variable explicitly. Scheme indices may be omitted when the argument
sorts determine them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import sexpr
from .lang import (
    BOT, TOP, And, App, Arrow, Atom, Base, BVar, Bot, Exists, Forall, Imp, Or,
    Prop, Sequent, Signature, Sort, SortError, SortVar, Sym, Term, Top, Var,
    free_vars, fresh_name, well_sorted,
)
from .sexpr import ParseError, SExpr, is_brace

KEYWORDS = frozenset({"true", "false", "=>", "and", "or", "forall", "exists", ":", "->", "|-"})


@dataclass(frozen=True)
class Scope:
    sig: Signature
    env: Mapping[str, Sort] = field(default_factory=dict)
    sortvars: frozenset[str] = frozenset()


# ---------------------------------------------------------------------------
# Reading


def parse_sort(sx: SExpr, scope: Optional[Scope] = None) -> Sort:
    sortvars = scope.sortvars if scope else frozenset()
    if isinstance(sx, str):
        if sx in sortvars:
            return SortVar(sx)
        if scope is not None and sx not in scope.sig.sorts:
            raise ParseError(f"unknown sort {sx}")
        return Base(sx)
    if isinstance(sx, list) and len(sx) >= 3 and sx[0] == "->":
        parts = [parse_sort(p, scope) for p in sx[1:]]
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = Arrow(p, out)
        return out
    raise ParseError(f"bad sort {sexpr.dumps(sx)}")


def _parse_sym(sx: SExpr, scope: Scope) -> Sym:
    if isinstance(sx, str):
        return Sym(sx)
    if is_brace(sx) and len(sx) >= 2 and isinstance(sx[1], str):
        return Sym(sx[1], tuple(parse_sort(s, scope) for s in sx[2:]))
    raise ParseError(f"bad symbol {sexpr.dumps(sx)}")


def _resolve_indices(sym: Sym, args: tuple[Term, ...], scope: Scope, bound: list) -> Sym:
    decl = scope.sig.decls.get(sym.name)
    if decl is None:
        raise ParseError(f"unknown symbol {sym.name}")
    if sym.indices or not decl.params:
        return sym
    btypes = tuple(s for _, s in reversed(bound))
    try:
        arg_sorts = tuple(well_sorted(scope.sig, a, btypes) for a in args)
        return Sym(sym.name, decl.infer_indices(arg_sorts))
    except SortError as e:
        raise ParseError(f"cannot infer indices of {sym.name}: {e}") from e


def _parse_term(sx: SExpr, scope: Scope, bound: list) -> Term:
    if isinstance(sx, str):
        for depth, (name, _) in enumerate(reversed(bound)):
            if name == sx:
                return BVar(depth)
        if scope.sig.is_function(sx):
            return App(_resolve_indices(Sym(sx), (), scope, bound))
        if sx in scope.env:
            return Var(sx, scope.env[sx])
        raise ParseError(f"unknown identifier {sx}")
    if is_brace(sx):
        sym = _parse_sym(sx, scope)
        if not scope.sig.is_function(sym.name):
            raise ParseError(f"unknown function symbol {sym.name}")
        return App(sym)
    if isinstance(sx, list) and sx:
        if sx[0] == ":":
            if len(sx) != 3 or not isinstance(sx[1], str):
                raise ParseError(f"bad annotation {sexpr.dumps(sx)}")
            return Var(sx[1], parse_sort(sx[2], scope))
        sym = _parse_sym(sx[0], scope)
        if not scope.sig.is_function(sym.name):
            raise ParseError(f"unknown function symbol {sym.name}")
        args = tuple(_parse_term(a, scope, bound) for a in sx[1:])
        return App(_resolve_indices(sym, args, scope, bound), args)
    raise ParseError(f"bad term {sexpr.dumps(sx)}")


def _parse_prop(sx: SExpr, scope: Scope, bound: list) -> Prop:
    if isinstance(sx, str):
        if sx == "true":
            return TOP
        if sx == "false":
            return BOT
        if scope.sig.is_predicate(sx):
            return Atom(_resolve_indices(Sym(sx), (), scope, bound))
        raise ParseError(f"unknown proposition {sx}")
    if is_brace(sx):
        sym = _parse_sym(sx, scope)
        if not scope.sig.is_predicate(sym.name):
            raise ParseError(f"unknown predicate {sym.name}")
        return Atom(sym)
    if not isinstance(sx, list) or not sx:
        raise ParseError(f"bad proposition {sexpr.dumps(sx)}")
    head = sx[0]
    if head in ("=>", "and", "or"):
        if len(sx) < 3:
            raise ParseError(f"{head} needs at least two operands")
        ctor = {"=>": Imp, "and": And, "or": Or}[head]
        parts = [_parse_prop(p, scope, bound) for p in sx[1:]]
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = ctor(p, out)
        return out
    if head in ("forall", "exists"):
        if len(sx) != 3 or not isinstance(sx[1], list) or len(sx[1]) != 2 or not isinstance(sx[1][0], str):
            raise ParseError(f"bad binder {sexpr.dumps(sx)}")
        name = sx[1][0]
        s = parse_sort(sx[1][1], scope)
        body = _parse_prop(sx[2], scope, bound + [(name, s)])
        return (Forall if head == "forall" else Exists)(s, body, name)
    sym = _parse_sym(head, scope)
    if not scope.sig.is_predicate(sym.name):
        raise ParseError(f"unknown predicate {sym.name}")
    args = tuple(_parse_term(a, scope, bound) for a in sx[1:])
    return Atom(_resolve_indices(sym, args, scope, bound), args)


def parse_term(src: SExpr | str, scope: Scope) -> Term:
    sx = sexpr.read(src) if isinstance(src, str) else src
    return _parse_term(sx, scope, [])


def parse_prop(src: SExpr | str, scope: Scope) -> Prop:
    sx = sexpr.read(src) if isinstance(src, str) else src
    return _parse_prop(sx, scope, [])


def parse_expr(src: SExpr | str, scope: Scope) -> Term | Prop:
    """A proposition if it reads as one, otherwise a term."""
    sx = sexpr.read(src) if isinstance(src, str) else src
    try:
        return _parse_prop(sx, scope, [])
    except ParseError as prop_err:
        try:
            return _parse_term(sx, scope, [])
        except ParseError:
            raise prop_err from None


def parse_sequent(src: SExpr | str, scope: Scope) -> Sequent:
    sx = sexpr.read(src) if isinstance(src, str) else src
    if not (isinstance(sx, list) and len(sx) == 3 and sx[0] == "|-" and isinstance(sx[1], list)):
        raise ParseError(f"bad sequent {sexpr.dumps(sx)}")
    return Sequent(tuple(_parse_prop(p, scope, []) for p in sx[1]), _parse_prop(sx[2], scope, []))


# ---------------------------------------------------------------------------
# Printing


class Printer:
    """Renders values back to s-expressions the reader accepts."""

    def __init__(self, sig: Optional[Signature] = None, env: Optional[Mapping[str, Sort]] = None):
        self.sig = sig
        self.env = dict(env or {})
        self.reserved = set(KEYWORDS) | set(sig.decls if sig else ())

    def sort(self, s: Sort) -> SExpr:
        if isinstance(s, Arrow):
            parts = []
            while isinstance(s, Arrow):
                parts.append(self.sort(s.dom))
                s = s.cod
            return ["->", *parts, self.sort(s)]
        return s.name

    def _sym(self, sym: Sym, args) -> SExpr:
        if not sym.indices:
            return sym.name
        decl = self.sig.decls.get(sym.name) if self.sig else None
        if args and decl is not None and decl.inferable():
            return sym.name
        return [sexpr.BRACE, sym.name, *(self.sort(i) for i in sym.indices)]

    def _var(self, v: Var, names: list[str]) -> SExpr:
        bare = (
            self.env.get(v.name) == v.sort
            and v.name not in self.reserved
            and v.name not in names
        )
        return v.name if bare else [":", v.name, self.sort(v.sort)]

    def term(self, t: Term, names: Optional[list[str]] = None) -> SExpr:
        names = names or []
        match t:
            case Var():
                return self._var(t, names)
            case BVar(i):
                if i >= len(names):
                    return f"#{i}"
                return names[-1 - i]
            case App(sym, args):
                head = self._sym(sym, args)
                if not args:
                    return head
                return [head, *(self.term(a, names) for a in args)]
        raise TypeError(t)

    def prop(self, p: Prop, names: Optional[list[str]] = None, taken: Optional[set[str]] = None) -> SExpr:
        names = names or []
        if taken is None:
            taken = {v.name for v in free_vars(p)}
        match p:
            case Top():
                return "true"
            case Bot():
                return "false"
            case Atom(sym, args):
                head = self._sym(sym, args)
                if not args:
                    return head
                return [head, *(self.term(a, names) for a in args)]
            case Imp(a, b) | And(a, b) | Or(a, b):
                op = {Imp: "=>", And: "and", Or: "or"}[type(p)]
                return [op, self.prop(a, names, taken), self.prop(b, names, taken)]
            case Forall(s, body, hint) | Exists(s, body, hint):
                name = fresh_name(hint, taken | set(names) | self.reserved)
                q = "forall" if isinstance(p, Forall) else "exists"
                return [q, [name, self.sort(s)], self.prop(body, names + [name], taken)]
        raise TypeError(p)

    def sequent(self, seq: Sequent) -> SExpr:
        return ["|-", [self.prop(a) for a in seq.context], self.prop(seq.goal)]

    def expr(self, x) -> SExpr:
        if isinstance(x, Sequent):
            return self.sequent(x)
        if isinstance(x, (Var, BVar, App)):
            return self.term(x)
        return self.prop(x)


def show(x, sig: Optional[Signature] = None, env: Optional[Mapping[str, Sort]] = None) -> str:
    if isinstance(x, (Base, Arrow, SortVar)):
        return sexpr.dumps(Printer(sig, env).sort(x))
    return sexpr.dumps(Printer(sig, env).expr(x))
