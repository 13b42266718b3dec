"""Many-sorted terms and propositions with locally nameless binders.

Free variables carry a name and a sort. Bound variables are de Bruijn
indices; binders keep the user's name only as a printing hint, and that
hint is excluded from equality. Structural ``==`` on these values is
therefore alpha-equivalence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union


# ---------------------------------------------------------------------------
# Sorts


@dataclass(frozen=True, slots=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: "Sort"
    cod: "Sort"

    def __str__(self) -> str:
        return f"(-> {self.dom} {self.cod})"


@dataclass(frozen=True, slots=True)
class SortVar:
    """A sort parameter of a symbol scheme or of a sort-parametric rule."""

    name: str

    def __str__(self) -> str:
        return self.name


Sort = Union[Base, Arrow, SortVar]

IOTA = Base("iota")
PROP = Base("o")


def arrow(*sorts: Sort) -> Sort:
    """Right-associated arrow: ``arrow(a, b, c)`` is ``a -> (b -> c)``."""
    if not sorts:
        raise ValueError("arrow() needs at least one sort")
    out = sorts[-1]
    for s in reversed(sorts[:-1]):
        out = Arrow(s, out)
    return out


def sort_depth(s: Sort) -> int:
    if isinstance(s, Arrow):
        return 1 + max(sort_depth(s.dom), sort_depth(s.cod))
    return 0


def sort_vars(s: Sort) -> frozenset[str]:
    if isinstance(s, SortVar):
        return frozenset([s.name])
    if isinstance(s, Arrow):
        return sort_vars(s.dom) | sort_vars(s.cod)
    return frozenset()


def subst_sort(s: Sort, binding: Mapping[str, Sort]) -> Sort:
    if isinstance(s, SortVar):
        return binding.get(s.name, s)
    if isinstance(s, Arrow):
        return Arrow(subst_sort(s.dom, binding), subst_sort(s.cod, binding))
    return s


def match_sort(template: Sort, actual: Sort, binding: dict[str, Sort]) -> bool:
    """One-way matching; sort variables in ``actual`` are rigid."""
    if isinstance(template, SortVar):
        bound = binding.get(template.name)
        if bound is None:
            binding[template.name] = actual
            return True
        return bound == actual
    if isinstance(template, Arrow):
        return (
            isinstance(actual, Arrow)
            and match_sort(template.dom, actual.dom, binding)
            and match_sort(template.cod, actual.cod, binding)
        )
    return template == actual


# ---------------------------------------------------------------------------
# Terms and propositions


@dataclass(frozen=True, slots=True)
class Sym:
    """A symbol occurrence; ``indices`` instantiate a scheme, e.g. K_{T,U}."""

    name: str
    indices: tuple[Sort, ...] = ()


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True, slots=True)
class BVar:
    index: int


@dataclass(frozen=True, slots=True)
class App:
    sym: Sym
    args: tuple["Term", ...] = ()


Term = Union[Var, BVar, App]


@dataclass(frozen=True, slots=True)
class Atom:
    sym: Sym
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class Bot:
    pass


@dataclass(frozen=True, slots=True)
class Imp:
    left: "Prop"
    right: "Prop"


@dataclass(frozen=True, slots=True)
class And:
    left: "Prop"
    right: "Prop"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Prop"
    right: "Prop"


@dataclass(frozen=True, slots=True)
class Forall:
    sort: Sort
    body: "Prop"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class Exists:
    sort: Sort
    body: "Prop"
    hint: str = field(default="x", compare=False)


Prop = Union[Atom, Top, Bot, Imp, And, Or, Forall, Exists]
Binary = (Imp, And, Or)
Quant = (Forall, Exists)
TOP = Top()
BOT = Bot()

Context = tuple  # tuple[Prop, ...]; order and multiplicity are significant


@dataclass(frozen=True, slots=True)
class Sequent:
    context: tuple[Prop, ...]
    goal: Prop


def atom(name: str, *args: Term) -> Atom:
    return Atom(Sym(name), tuple(args))


def const(name: str, *indices: Sort) -> App:
    return App(Sym(name, tuple(indices)))


def is_prop(x: object) -> bool:
    return isinstance(x, (Atom, Top, Bot, Imp, And, Or, Forall, Exists))


# ---------------------------------------------------------------------------
# Locally nameless plumbing


def shift(x, by: int, cutoff: int = 0):
    """Add ``by`` to every bound index >= ``cutoff`` (loose indices)."""
    if by == 0:
        return x
    match x:
        case BVar(i):
            return BVar(i + by) if i >= cutoff else x
        case Var():
            return x
        case App(sym, args):
            return App(sym, tuple(shift(a, by, cutoff) for a in args)) if args else x
        case Atom(sym, args):
            return Atom(sym, tuple(shift(a, by, cutoff) for a in args)) if args else x
        case Top() | Bot():
            return x
        case Imp(a, b) | And(a, b) | Or(a, b):
            return type(x)(shift(a, by, cutoff), shift(b, by, cutoff))
        case Forall(s, body, hint) | Exists(s, body, hint):
            return type(x)(s, shift(body, by, cutoff + 1), hint)
    raise TypeError(f"not a term or proposition: {x!r}")


def instantiate(body, value: Term, depth: int = 0):
    """Replace bound index ``depth`` by ``value`` (opening one binder)."""
    match body:
        case BVar(i):
            if i == depth:
                return shift(value, depth)
            return BVar(i - 1) if i > depth else body
        case Var():
            return body
        case App(sym, args):
            return App(sym, tuple(instantiate(a, value, depth) for a in args)) if args else body
        case Atom(sym, args):
            return Atom(sym, tuple(instantiate(a, value, depth) for a in args)) if args else body
        case Top() | Bot():
            return body
        case Imp(a, b) | And(a, b) | Or(a, b):
            return type(body)(instantiate(a, value, depth), instantiate(b, value, depth))
        case Forall(s, inner, hint) | Exists(s, inner, hint):
            return type(body)(s, instantiate(inner, value, depth + 1), hint)
    raise TypeError(f"not a term or proposition: {body!r}")


def abstract(body, var: Var, depth: int = 0):
    """Turn free occurrences of ``var`` into bound index ``depth`` (closing)."""
    match body:
        case BVar(i):
            return BVar(i + 1) if i >= depth else body
        case Var():
            return BVar(depth) if body == var else body
        case App(sym, args):
            return App(sym, tuple(abstract(a, var, depth) for a in args)) if args else body
        case Atom(sym, args):
            return Atom(sym, tuple(abstract(a, var, depth) for a in args)) if args else body
        case Top() | Bot():
            return body
        case Imp(a, b) | And(a, b) | Or(a, b):
            return type(body)(abstract(a, var, depth), abstract(b, var, depth))
        case Forall(s, inner, hint) | Exists(s, inner, hint):
            return type(body)(s, abstract(inner, var, depth + 1), hint)
    raise TypeError(f"not a term or proposition: {body!r}")


def forall(var: Var, body: Prop) -> Forall:
    return Forall(var.sort, abstract(body, var), var.name)


def exists(var: Var, body: Prop) -> Exists:
    return Exists(var.sort, abstract(body, var), var.name)


def open_binder(q: Forall | Exists, var: Var) -> Prop:
    """The body of ``q`` with its bound variable replaced by ``var``."""
    return instantiate(q.body, var)


# ---------------------------------------------------------------------------
# Variables and substitution


def _walk_vars(x) -> Iterator[Var]:
    match x:
        case Var():
            yield x
        case App(_, args) | Atom(_, args):
            for a in args:
                yield from _walk_vars(a)
        case Imp(a, b) | And(a, b) | Or(a, b):
            yield from _walk_vars(a)
            yield from _walk_vars(b)
        case Forall(_, body, _) | Exists(_, body, _):
            yield from _walk_vars(body)


def free_vars(*xs) -> frozenset[Var]:
    """Free variables of terms, propositions, sequents or contexts."""
    out: set[Var] = set()
    for x in xs:
        if isinstance(x, Sequent):
            out |= free_vars(*x.context, x.goal)
        elif isinstance(x, (tuple, list)):
            out |= free_vars(*x)
        elif x is not None:
            out.update(_walk_vars(x))
    return frozenset(out)


def var_names(*xs) -> frozenset[str]:
    return frozenset(v.name for v in free_vars(*xs))


def has_loose(x, depth: int = 0) -> bool:
    match x:
        case BVar(i):
            return i >= depth
        case Var():
            return False
        case App(_, args) | Atom(_, args):
            return any(has_loose(a, depth) for a in args)
        case Imp(a, b) | And(a, b) | Or(a, b):
            return has_loose(a, depth) or has_loose(b, depth)
        case Forall(_, body, _) | Exists(_, body, _):
            return has_loose(body, depth + 1)
    return False


Substitution = Mapping[Var, Term]


def apply_subst(sigma: Substitution, x, depth: int = 0):
    """Capture-avoiding simultaneous substitution of free variables.

    Binders are nameless, so capture cannot happen; loose indices inside
    substituted terms are shifted past the binders they are pushed under.
    """
    if not sigma:
        return x
    match x:
        case Var():
            val = sigma.get(x)
            return x if val is None else shift(val, depth)
        case BVar():
            return x
        case App(sym, args):
            return App(sym, tuple(apply_subst(sigma, a, depth) for a in args)) if args else x
        case Atom(sym, args):
            return Atom(sym, tuple(apply_subst(sigma, a, depth) for a in args)) if args else x
        case Top() | Bot():
            return x
        case Imp(a, b) | And(a, b) | Or(a, b):
            return type(x)(apply_subst(sigma, a, depth), apply_subst(sigma, b, depth))
        case Forall(s, body, hint) | Exists(s, body, hint):
            return type(x)(s, apply_subst(sigma, body, depth + 1), hint)
        case Sequent(ctx, goal):
            return Sequent(tuple(apply_subst(sigma, p) for p in ctx), apply_subst(sigma, goal))
    raise TypeError(f"cannot substitute into {x!r}")


def subst1(x, var: Var, value: Term):
    return apply_subst({var: value}, x)


def compose(sigma: Substitution, tau: Substitution) -> dict[Var, Term]:
    """The substitution applying ``tau`` first, then ``sigma``."""
    out = {v: apply_subst(sigma, t) for v, t in tau.items()}
    for v, t in sigma.items():
        out.setdefault(v, t)
    return out


def alpha_eq(a, b) -> bool:
    return a == b


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    stem = base.rstrip("0123456789'") or "x"
    if base not in avoid:
        return base
    for k in itertools.count(1):
        cand = f"{stem}{k}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def size(x) -> int:
    match x:
        case Var() | BVar() | Top() | Bot():
            return 1
        case App(_, args) | Atom(_, args):
            return 1 + sum(size(a) for a in args)
        case Imp(a, b) | And(a, b) | Or(a, b):
            return 1 + size(a) + size(b)
        case Forall(_, body, _) | Exists(_, body, _):
            return 1 + size(body)
    raise TypeError(x)


# ---------------------------------------------------------------------------
# Signatures and sort checking


class SortError(Exception):
    def __init__(self, message: str, subterm=None):
        super().__init__(message)
        self.subterm = subterm


class UnknownSymbol(SortError):
    pass


class ArityMismatch(SortError):
    pass


class SortMismatch(SortError):
    pass


@dataclass(frozen=True)
class Decl:
    """Declaration of a function symbol (``result`` set) or predicate.

    ``params`` is empty for an ordinary symbol and names the sort
    parameters of a scheme otherwise.
    """

    name: str
    args: tuple[Sort, ...]
    result: Optional[Sort] = None
    params: tuple[str, ...] = ()

    @property
    def is_predicate(self) -> bool:
        return self.result is None

    def instantiate(self, indices: tuple[Sort, ...]) -> tuple[tuple[Sort, ...], Optional[Sort]]:
        if len(indices) != len(self.params):
            raise ArityMismatch(
                f"{self.name} expects {len(self.params)} sort indices, got {len(indices)}"
            )
        binding = dict(zip(self.params, indices))
        args = tuple(subst_sort(a, binding) for a in self.args)
        res = None if self.result is None else subst_sort(self.result, binding)
        return args, res

    def inferable(self) -> bool:
        """True when argument sorts alone determine every index."""
        found: frozenset[str] = frozenset()
        for a in self.args:
            found |= sort_vars(a)
        return set(self.params) <= found

    def infer_indices(self, arg_sorts: tuple[Sort, ...]) -> tuple[Sort, ...]:
        if len(arg_sorts) != len(self.args):
            raise ArityMismatch(f"{self.name} takes {len(self.args)} arguments, got {len(arg_sorts)}")
        binding: dict[str, Sort] = {}
        tmpl = tuple(subst_sort(a, {p: SortVar("?" + p) for p in self.params}) for a in self.args)
        for t, s in zip(tmpl, arg_sorts):
            if not match_sort(t, s, binding):
                raise SortMismatch(f"cannot instantiate {self.name} at argument sort {s}")
        missing = [p for p in self.params if "?" + p not in binding]
        if missing:
            raise SortError(f"indices {missing} of {self.name} are not determined by its arguments")
        return tuple(binding["?" + p] for p in self.params)


@dataclass(frozen=True)
class Signature:
    sorts: frozenset[str]
    decls: Mapping[str, Decl]

    @classmethod
    def build(cls, sorts: Iterable[str], decls: Iterable[Decl]) -> "Signature":
        table: dict[str, Decl] = {}
        for d in decls:
            prev = table.get(d.name)
            if prev is not None and prev != d:
                raise SortError(f"symbol {d.name} declared twice with different ranks")
            table[d.name] = d
        return cls(frozenset(sorts), table)

    def extend(self, sorts: Iterable[str] = (), decls: Iterable[Decl] = ()) -> "Signature":
        return Signature.build(self.sorts | set(sorts), [*self.decls.values(), *decls])

    def lookup(self, sym: Sym, predicate: bool) -> tuple[tuple[Sort, ...], Optional[Sort]]:
        d = self.decls.get(sym.name)
        if d is None or d.is_predicate != predicate:
            kind = "predicate" if predicate else "function symbol"
            raise UnknownSymbol(f"unknown {kind} {sym.name}", sym)
        return d.instantiate(sym.indices)

    def is_function(self, name: str) -> bool:
        d = self.decls.get(name)
        return d is not None and not d.is_predicate

    def is_predicate(self, name: str) -> bool:
        d = self.decls.get(name)
        return d is not None and d.is_predicate


def _check_sort_ok(sig: Signature, s: Sort, where) -> None:
    if isinstance(s, Base) and s.name not in sig.sorts:
        raise UnknownSymbol(f"unknown sort {s.name}", where)
    if isinstance(s, Arrow):
        _check_sort_ok(sig, s.dom, where)
        _check_sort_ok(sig, s.cod, where)


def well_sorted(sig: Signature, t: Term, bound: tuple[Sort, ...] = ()) -> Sort:
    """Sort of ``t``; ``bound`` lists binder sorts, innermost first."""
    match t:
        case Var(_, s):
            return s
        case BVar(i):
            if i >= len(bound):
                raise SortError(f"loose bound variable #{i}", t)
            return bound[i]
        case App(sym, args):
            try:
                arg_sorts, res = sig.lookup(sym, predicate=False)
            except SortError as e:
                e.subterm = t
                raise
            _check_args(sig, t, arg_sorts, args, bound)
            return res
    raise TypeError(f"not a term: {t!r}")


def _check_args(sig, node, arg_sorts, args, bound) -> None:
    if len(arg_sorts) != len(args):
        raise ArityMismatch(
            f"{node.sym.name} expects {len(arg_sorts)} arguments, got {len(args)}", node
        )
    for want, a in zip(arg_sorts, args):
        got = well_sorted(sig, a, bound)
        if got != want:
            raise SortMismatch(f"argument of {node.sym.name} has sort {got}, expected {want}", a)


def check_prop(sig: Signature, p: Prop, bound: tuple[Sort, ...] = ()) -> None:
    match p:
        case Atom(sym, args):
            try:
                arg_sorts, _ = sig.lookup(sym, predicate=True)
            except SortError as e:
                e.subterm = p
                raise
            _check_args(sig, p, arg_sorts, args, bound)
        case Top() | Bot():
            pass
        case Imp(a, b) | And(a, b) | Or(a, b):
            check_prop(sig, a, bound)
            check_prop(sig, b, bound)
        case Forall(s, body, _) | Exists(s, body, _):
            _check_sort_ok(sig, s, p)
            check_prop(sig, body, (s, *bound))
        case _:
            raise TypeError(f"not a proposition: {p!r}")


def check_sequent(sig: Signature, seq: Sequent) -> None:
    for p in seq.context:
        check_prop(sig, p)
    check_prop(sig, seq.goal)
