"""Rewrite rules on terms and atomic propositions, and the congruence they generate."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

from .lang import (
    App, Atom, BVar, Exists, Forall, Prop, Signature, Sort, SortError,
    Term, Var, And, Imp, Or, Top, Bot, check_prop, free_vars, is_prop, match_sort,
    shift, sort_vars, subst_sort, well_sorted,
)

Expr = Union[Term, Prop]


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    max_steps: int = 10_000
    max_reducts: int = 1024

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_reducts <= 0:
            raise ValueError("budget limits must be strictly positive")


DEFAULT_BUDGET = Budget()


class FuelExhausted(Exception):
    def __init__(self, last: Expr, steps: int):
        super().__init__(f"no normal form within {steps} steps")
        self.last = last
        self.steps = steps


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"

    def __bool__(self) -> bool:
        return self is Verdict.YES


def _binder_hints(x) -> tuple[str, ...]:
    match x:
        case Forall(_, body, hint) | Exists(_, body, hint):
            return (hint, *_binder_hints(body))
        case Imp(a, b) | And(a, b) | Or(a, b):
            return _binder_hints(a) + _binder_hints(b)
    return ()


def _sorts_in(x) -> frozenset[str]:
    """Sort variables mentioned anywhere in a rule side."""
    out: set[str] = set()
    match x:
        case Var(_, s):
            out |= sort_vars(s)
        case App(sym, args) | Atom(sym, args):
            for i in sym.indices:
                out |= sort_vars(i)
            for a in args:
                out |= _sorts_in(a)
        case Imp(a, b) | And(a, b) | Or(a, b):
            out |= _sorts_in(a) | _sorts_in(b)
        case Forall(s, body, _) | Exists(s, body, _):
            out |= sort_vars(s) | _sorts_in(body)
    return frozenset(out)


def _sym_sorts(x) -> frozenset[str]:
    out: set[str] = set()
    if isinstance(x, (App, Atom)):
        for i in x.sym.indices:
            out |= sort_vars(i)
        for a in x.args:
            out |= _sym_sorts(a)
    return frozenset(out)


@dataclass(frozen=True)
class RewriteRule:
    """``lhs -> rhs``; a prop-rule when ``lhs`` is an atom, a term-rule otherwise.

    Binders in the rhs are nameless, so each application introduces bound
    variables that cannot clash with anything; ``fresh`` lists their
    printing hints.
    """

    lhs: Union[App, Atom]
    rhs: Expr
    name: str = ""

    def __post_init__(self):
        if isinstance(self.lhs, Atom):
            if not isinstance(self.rhs, (Atom, Top, Bot, Imp, And, Or, Forall, Exists)):
                raise RuleError("a prop-rule must rewrite to a proposition")
        elif isinstance(self.lhs, App):
            if not isinstance(self.rhs, (Var, App, BVar)):
                raise RuleError("a term-rule must rewrite to a term")
        else:
            raise RuleError("rule lhs must be an atomic proposition or a non-variable term")
        extra = free_vars(self.rhs) - free_vars(self.lhs)
        if extra:
            names = ", ".join(sorted(v.name for v in extra))
            raise RuleError(f"rhs variables not bound by lhs: {names}")
        loose = _sorts_in(self.rhs) | _sorts_in(self.lhs)
        if not loose <= _sym_sorts(self.lhs):
            raise RuleError("every sort parameter must be fixed by a symbol index in the lhs")

    @property
    def kind(self) -> str:
        return "prop" if isinstance(self.lhs, Atom) else "term"

    @property
    def fresh(self) -> tuple[str, ...]:
        return _binder_hints(self.rhs)

    @property
    def sortvars(self) -> tuple[str, ...]:
        return tuple(sorted(_sym_sorts(self.lhs)))

    def check(self, sig: Signature) -> None:
        """Raise SortError unless both sides are well sorted (and agree, for terms)."""
        if self.kind == "term":
            ls = well_sorted(sig, self.lhs)
            rs = well_sorted(sig, self.rhs)
            if ls != rs:
                raise SortError(f"rule {self.name or ''}: lhs sort {ls} differs from rhs sort {rs}")
        else:
            check_prop(sig, self.lhs)
            check_prop(sig, self.rhs)


@dataclass(frozen=True)
class RewriteSystem:
    rules: tuple[RewriteRule, ...]
    confluent: bool = True

    def __post_init__(self):
        index: dict[str, list[RewriteRule]] = {}
        for r in self.rules:
            index.setdefault(r.lhs.sym.name, []).append(r)
        object.__setattr__(self, "_by_head", {k: tuple(v) for k, v in index.items()})

    def rules_for(self, head: str) -> tuple[RewriteRule, ...]:
        return self._by_head.get(head, ())

    def check(self, sig: Signature) -> None:
        for r in self.rules:
            r.check(sig)


# ---------------------------------------------------------------------------
# Matching


def _match(pat, subj, sub: dict[Var, Term], sorts: dict[str, Sort]) -> bool:
    match pat:
        case Var():
            prev = sub.get(pat)
            if prev is None:
                sub[pat] = subj
                return True
            return prev == subj
        case App(sym, args) | Atom(sym, args):
            if type(subj) is not type(pat) or subj.sym.name != sym.name:
                return False
            if len(subj.args) != len(args) or len(subj.sym.indices) != len(sym.indices):
                return False
            for ti, si in zip(sym.indices, subj.sym.indices):
                if not match_sort(ti, si, sorts):
                    return False
            return all(_match(p, s, sub, sorts) for p, s in zip(args, subj.args))
    return pat == subj


def match_with_sorts(pattern, subject) -> Optional[tuple[dict[Var, Term], dict[str, Sort]]]:
    sub: dict[Var, Term] = {}
    sorts: dict[str, Sort] = {}
    if _match(pattern, subject, sub, sorts):
        return sub, sorts
    return None


def match(pattern, subject) -> Optional[dict[Var, Term]]:
    """First-order matching; ``None`` when ``subject`` is not an instance."""
    if isinstance(pattern, Var):
        raise RuleError("a bare variable is not a legal pattern")
    found = match_with_sorts(pattern, subject)
    return None if found is None else found[0]


def _instantiate(x, sub: Mapping[Var, Term], sorts: Mapping[str, Sort], depth: int = 0):
    match x:
        case Var():
            val = sub.get(x)
            if val is None:
                return Var(x.name, subst_sort(x.sort, sorts))
            return shift(val, depth)
        case BVar():
            return x
        case App(sym, args) | Atom(sym, args):
            if sym.indices:
                sym = type(sym)(sym.name, tuple(subst_sort(i, sorts) for i in sym.indices))
            return type(x)(sym, tuple(_instantiate(a, sub, sorts, depth) for a in args))
        case Top() | Bot():
            return x
        case Imp(a, b) | And(a, b) | Or(a, b):
            return type(x)(_instantiate(a, sub, sorts, depth), _instantiate(b, sub, sorts, depth))
        case Forall(s, body, hint) | Exists(s, body, hint):
            return type(x)(subst_sort(s, sorts), _instantiate(body, sub, sorts, depth + 1), hint)
    raise TypeError(x)


def apply_rule(rule: RewriteRule, subject) -> Optional[Expr]:
    found = match_with_sorts(rule.lhs, subject)
    if found is None:
        return None
    return _instantiate(rule.rhs, *found)


# ---------------------------------------------------------------------------
# One-step reducts, leftmost-outermost order


def reducts(sys: RewriteSystem, x) -> Iterator[Expr]:
    """All one-step reducts of ``x``; the first one is the leftmost-outermost."""
    if isinstance(x, (App, Atom)):
        for rule in sys.rules_for(x.sym.name):
            if (rule.kind == "prop") == isinstance(x, Atom):
                r = apply_rule(rule, x)
                if r is not None:
                    yield r
        for i, a in enumerate(x.args):
            for r in reducts(sys, a):
                yield type(x)(x.sym, x.args[:i] + (r,) + x.args[i + 1:])
    elif isinstance(x, (Imp, And, Or)):
        for r in reducts(sys, x.left):
            yield type(x)(r, x.right)
        for r in reducts(sys, x.right):
            yield type(x)(x.left, r)
    elif isinstance(x, (Forall, Exists)):
        for r in reducts(sys, x.body):
            yield type(x)(x.sort, r, x.hint)


def rewrite_step(sys: RewriteSystem, x) -> Optional[Expr]:
    """Contract the leftmost-outermost redex, or return None for a normal form."""
    return next(reducts(sys, x), None)


def normalize_counting(sys: RewriteSystem, x, budget: Budget = DEFAULT_BUDGET) -> tuple[Expr, int]:
    """The normal form of ``x`` and the number of steps taken to reach it."""
    steps = 0
    while True:
        try:
            nxt = rewrite_step(sys, x)
        except RecursionError:
            # the reduct outgrew the interpreter stack; treat like running out of fuel
            raise FuelExhausted(x, steps) from None
        if nxt is None:
            return x, steps
        if steps >= budget.max_steps:
            raise FuelExhausted(x, steps)
        x = nxt
        steps += 1


def normal_form(sys: RewriteSystem, x, budget: Budget = DEFAULT_BUDGET):
    return normalize_counting(sys, x, budget)[0]


def _try_nf(sys, x, budget):
    try:
        return normal_form(sys, x, budget)
    except FuelExhausted:
        return None


_RIGID = (Top, Bot, Imp, And, Or, Forall, Exists)


def _atomic_closure(sys: RewriteSystem, x, budget: Budget) -> Optional[tuple[set, set]]:
    """Atoms reachable from ``x`` through atoms, and the rigid one-step exits.

    Rules rewrite atoms and terms, never a connective or quantifier node,
    so every reduct of ``x`` is one of these atoms or a reduct of an exit
    with the exit's root. None when the atoms do not saturate in budget.
    """
    if isinstance(x, _RIGID):
        return set(), {x}
    atoms, exits = {x}, set()
    todo = deque([x])
    steps = 0
    while todo:
        node = todo.popleft()
        try:
            found = list(reducts(sys, node))
        except RecursionError:
            return None
        for r in found:
            steps += 1
            if steps > budget.max_steps:
                return None
            if isinstance(r, Atom):
                if r not in atoms:
                    if len(atoms) >= budget.max_reducts:
                        return None
                    atoms.add(r)
                    todo.append(r)
            else:
                exits.add(r)
    return atoms, exits


def _combine(verdicts) -> Verdict:
    out = Verdict.YES
    for v in verdicts:
        if v is Verdict.NO:
            return Verdict.NO
        if v is Verdict.UNDECIDED:
            out = Verdict.UNDECIDED
    return out


def _prop_congruent(sys: RewriteSystem, a, b, budget: Budget, depth: int = 0) -> Verdict:
    """Structural decision for propositions, valid when ``sys`` is confluent.

    Two rigid propositions are congruent exactly when their roots agree and
    their components are congruent (common reducts keep the root). An atom
    meets another expression either in a shared reachable atom or through
    a pair of congruent rigid exits.
    """
    if a == b:
        return Verdict.YES
    if depth > 200:
        return Verdict.UNDECIDED
    if isinstance(a, _RIGID) and isinstance(b, _RIGID):
        if type(a) is not type(b):
            return Verdict.NO
        if isinstance(a, (Top, Bot)):
            return Verdict.YES
        if isinstance(a, (Forall, Exists)):
            if a.sort != b.sort:
                return Verdict.NO
            return _prop_congruent(sys, a.body, b.body, budget, depth + 1)
        left = _prop_congruent(sys, a.left, b.left, budget, depth + 1)
        if left is Verdict.NO:
            return left
        return _combine([left, _prop_congruent(sys, a.right, b.right, budget, depth + 1)])
    ca = _atomic_closure(sys, a, budget)
    cb = _atomic_closure(sys, b, budget) if ca is not None else None
    if ca is None or cb is None:
        return Verdict.UNDECIDED
    if ca[0] & cb[0]:
        return Verdict.YES
    pending = False
    for r in ca[1]:
        for t in cb[1]:
            if type(r) is not type(t):
                continue
            v = _prop_congruent(sys, r, t, budget, depth + 1)
            if v is Verdict.YES:
                return v
            pending = pending or v is Verdict.UNDECIDED
    return Verdict.UNDECIDED if pending else Verdict.NO


def _bfs_meet(sys: RewriteSystem, a, b, budget: Budget) -> tuple[bool, bool]:
    """Breadth-first search of both reduct sets: (met, overflowed)."""
    seen = ({a}, {b})
    frontier = (deque([a]), deque([b]))
    steps = 0
    overflow = False
    while frontier[0] or frontier[1]:
        for side in (0, 1):
            if not frontier[side]:
                continue
            node = frontier[side].popleft()
            try:
                found = list(reducts(sys, node))
            except RecursionError:
                overflow = True
                break
            for r in found:
                steps += 1
                if r in seen[1 - side]:
                    return True, False
                if r not in seen[side]:
                    if len(seen[side]) >= budget.max_reducts:
                        overflow = True
                    else:
                        seen[side].add(r)
                        frontier[side].append(r)
                if steps >= budget.max_steps:
                    overflow = True
                    break
            if overflow:
                break
        if overflow:
            break
    return False, overflow


def congruent(sys: RewriteSystem, a, b, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    """Decide ``a ≡ b``.

    For a confluent system, propositions go through a structural procedure
    first. Otherwise (or when that runs out of budget) both reduct sets are
    explored breadth first: YES is sound for the generated congruence, and
    for a confluent system NO is returned when both sets saturate without
    meeting. If the search
    overflows, the normal forms are compared as a fallback: equal ones give
    YES, and for a system flagged confluent distinct ones give NO.
    """
    if a == b:
        return Verdict.YES
    if sys.confluent and is_prop(a) and is_prop(b):
        v = _prop_congruent(sys, a, b, budget)
        if v is not Verdict.UNDECIDED:
            return v
    try:
        found_common, overflow = _bfs_meet(sys, a, b, budget)
    except RecursionError:
        # reducts too deep to hash or compare
        found_common, overflow = False, True
    if found_common:
        return Verdict.YES
    if not overflow:
        # joinability is the whole congruence only for a confluent system
        return Verdict.NO if sys.confluent else Verdict.UNDECIDED
    na = _try_nf(sys, a, budget)
    nb = _try_nf(sys, b, budget) if na is not None else None
    if na is not None and na == nb:
        return Verdict.YES
    if sys.confluent and na is not None and nb is not None and na != nb:
        return Verdict.NO
    return Verdict.UNDECIDED


# ---------------------------------------------------------------------------
# One-step expansions (rules read right to left)


def _has_bvar_below(x, depth: int) -> bool:
    match x:
        case BVar(i):
            return i < depth
        case App(_, args) | Atom(_, args):
            return any(_has_bvar_below(a, depth) for a in args)
    return False


def _match_rhs(pat, subj, sub: dict, sorts: dict, depth: int) -> bool:
    match pat:
        case Var():
            if not isinstance(subj, (Var, App, BVar)) or _has_bvar_below(subj, depth):
                return False
            val = shift(subj, -depth)
            prev = sub.get(pat)
            if prev is None:
                sub[pat] = val
                return True
            return prev == val
        case BVar():
            return pat == subj
        case App(sym, args) | Atom(sym, args):
            if type(subj) is not type(pat) or subj.sym.name != sym.name:
                return False
            if len(subj.args) != len(args) or len(subj.sym.indices) != len(sym.indices):
                return False
            if not all(match_sort(t, s, sorts) for t, s in zip(sym.indices, subj.sym.indices)):
                return False
            return all(_match_rhs(p, s, sub, sorts, depth) for p, s in zip(args, subj.args))
        case Top() | Bot():
            return pat == subj
        case Imp(a, b) | And(a, b) | Or(a, b):
            return (type(subj) is type(pat) and _match_rhs(a, subj.left, sub, sorts, depth)
                    and _match_rhs(b, subj.right, sub, sorts, depth))
        case Forall(s, body, _) | Exists(s, body, _):
            return (type(subj) is type(pat) and match_sort(s, subj.sort, sorts)
                    and _match_rhs(body, subj.body, sub, sorts, depth + 1))
    return False


def expansions(sys: RewriteSystem, x) -> Iterator[Expr]:
    """Expressions that rewrite to ``x`` in one step (outside binders).

    Rules whose lhs has variables missing from the rhs, or whose rhs is a
    bare variable, are skipped since their expansions are not determined.
    """
    for rule in sys.rules:
        if isinstance(rule.rhs, Var) or not free_vars(rule.lhs) <= free_vars(rule.rhs):
            continue
        if (rule.kind == "prop") != isinstance(x, (Atom, Top, Bot, Imp, And, Or, Forall, Exists)):
            continue
        sub: dict = {}
        sorts: dict = {}
        if _match_rhs(rule.rhs, x, sub, sorts, 0):
            yield _instantiate(rule.lhs, sub, sorts)
    if isinstance(x, (App, Atom)):
        for i, a in enumerate(x.args):
            for r in expansions(sys, a):
                yield type(x)(x.sym, x.args[:i] + (r,) + x.args[i + 1:])
    elif isinstance(x, (Imp, And, Or)):
        for r in expansions(sys, x.left):
            yield type(x)(r, x.right)
        for r in expansions(sys, x.right):
            yield type(x)(x.left, r)
