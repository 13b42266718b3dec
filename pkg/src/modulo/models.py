"""Finite B-valued structures, denotations and model checking."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

from .lang import (
    App, Atom, Bot, BVar, Exists, Forall, Imp, And, Or, Prop, Sequent, Sort,
    Sym, Term, Top, Var, free_vars, subst_sort, well_sorted,
)
from .rewriting import RewriteRule, _instantiate
from .tva import FiniteTva

Value = Hashable


class UnboundVariable(KeyError):
    pass


class MissingDomain(KeyError):
    """A quantifier or assignment needs a sort the structure did not build."""


def _identity(v, sort):
    return v


@dataclass
class FiniteStructure:
    """Domains per sort plus interpretations looked up by symbol occurrence.

    ``functions(sym)`` and ``predicates(sym)`` return Python callables
    taking the argument values. ``canon`` turns a value of a sort into
    its canonical comparable form (identity for first-order structures).
    """

    tva: FiniteTva
    domains: Mapping[Sort, tuple]
    functions: Callable[[Sym], Callable[..., Value]]
    predicates: Callable[[Sym], Callable[..., Value]]
    name: str = ""
    canon: Callable[[Value, Sort], Value] = _identity
    info: dict = field(default_factory=dict)
    # sorts that sort parameters of rule schemes range over; None means all domains
    param_sorts: Optional[tuple[Sort, ...]] = None
    # rule instances with more assignments than this are skipped and counted
    instance_cap: Optional[int] = None

    def domain(self, sort: Sort) -> tuple:
        try:
            return self.domains[sort]
        except KeyError:
            raise MissingDomain(sort) from None

    def has_domain(self, sort: Sort) -> bool:
        return sort in self.domains


def from_tables(
    tva: FiniteTva,
    domains: Mapping[Sort, Sequence],
    functions: Mapping[str, Mapping[tuple, Value]],
    predicates: Mapping[str, Mapping[tuple, Value]],
    name: str = "",
) -> FiniteStructure:
    """A first-order structure given by explicit finite tables."""

    def fun(sym: Sym):
        table = functions[sym.name]
        return lambda *args: table[args]

    def pred(sym: Sym):
        table = predicates[sym.name]
        return lambda *args: table[args]

    return FiniteStructure(
        tva, {s: tuple(d) for s, d in domains.items()}, fun, pred, name,
        info={"functions": functions, "predicates": predicates},
    )


# ---------------------------------------------------------------------------
# Denotation


def denote_term(s: FiniteStructure, phi: Mapping[Var, Value], t: Term, bound: tuple = ()) -> Value:
    match t:
        case Var():
            try:
                return phi[t]
            except KeyError:
                raise UnboundVariable(t) from None
        case BVar(i):
            return bound[i]
        case App(sym, args):
            vals = [denote_term(s, phi, a, bound) for a in args]
            return s.functions(sym)(*vals)
    raise TypeError(t)


def denote_prop(s: FiniteStructure, phi: Mapping[Var, Value], p: Prop, bound: tuple = ()) -> Optional[Value]:
    """Truth value of ``p``; None when a quantifier leaves its domain."""
    b = s.tva
    match p:
        case Atom(sym, args):
            vals = [denote_term(s, phi, a, bound) for a in args]
            return s.predicates(sym)(*vals)
        case Top():
            return b.top
        case Bot():
            return b.bot
        case Imp(l, r) | And(l, r) | Or(l, r):
            x = denote_prop(s, phi, l, bound)
            if x is None:
                return None
            y = denote_prop(s, phi, r, bound)
            if y is None:
                return None
            table = b.imp if isinstance(p, Imp) else b.conj if isinstance(p, And) else b.disj
            return table[(x, y)]
        case Forall(sort, body, _) | Exists(sort, body, _):
            vals = set()
            for d in s.domain(sort):
                v = denote_prop(s, phi, body, (d, *bound))
                if v is None:
                    return None
                vals.add(v)
            table = b.forall if isinstance(p, Forall) else b.exists
            return table.get(frozenset(vals))
    raise TypeError(p)


def denote_context(s: FiniteStructure, phi, context: Sequence[Prop]) -> Optional[Value]:
    """Right-nested conjunction; the empty context denotes top."""
    if not context:
        return s.tva.top
    acc = denote_prop(s, phi, context[-1])
    for a in reversed(context[:-1]):
        if acc is None:
            return None
        v = denote_prop(s, phi, a)
        if v is None:
            return None
        acc = s.tva.conj[(v, acc)]
    return acc


def denote_sequent(s: FiniteStructure, phi, seq: Sequent) -> Optional[Value]:
    c = denote_context(s, phi, seq.context)
    if c is None:
        return None
    g = denote_prop(s, phi, seq.goal)
    if g is None:
        return None
    return s.tva.imp[(c, g)]


def assignments(s: FiniteStructure, variables: Iterable[Var]) -> Iterator[dict[Var, Value]]:
    vs = sorted(set(variables), key=lambda v: (v.name, str(v.sort)))
    doms = [s.domain(v.sort) for v in vs]
    for combo in itertools.product(*doms):
        yield dict(zip(vs, combo))


# ---------------------------------------------------------------------------
# Model checking


def to_jsonable(v: Any) -> Any:
    if isinstance(v, tuple):
        return [to_jsonable(x) for x in v]
    if isinstance(v, (frozenset, set)):
        return sorted((to_jsonable(x) for x in v), key=repr)
    if callable(v):
        return "<function>"
    return v


def _witness(phi: Mapping[Var, Value]) -> dict:
    return {v.name: to_jsonable(x) for v, x in sorted(phi.items(), key=lambda kv: kv[0].name)}


@dataclass
class ModelEntry:
    kind: str  # "axiom" or "rule"
    name: str
    passed: bool
    reason: str = ""
    witness: Optional[dict] = None
    instances: int = 0
    skipped: int = 0

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "name": self.name, "passed": self.passed,
                               "instances": self.instances}
        if self.skipped:
            out["skipped_sort_instances"] = self.skipped
        if self.reason:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = self.witness
        return out


SCOPE_NOTE = (
    "congruence condition checked on every rewrite rule instance; by compositionality "
    "this covers all congruent pairs"
)


@dataclass
class ModelReport:
    structure: str
    theory: str
    entries: list[ModelEntry]

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_json(self) -> dict:
        return {
            "structure": self.structure,
            "theory": self.theory,
            "model": self.ok,
            "scope": SCOPE_NOTE,
            "entries": [e.to_json() for e in self.entries],
        }


def _check_axiom(s: FiniteStructure, name: str, ax: Prop) -> ModelEntry:
    entry = ModelEntry("axiom", name, True)
    for phi in assignments(s, free_vars(ax)):
        entry.instances += 1
        v = denote_prop(s, phi, ax)
        if v is None or v not in s.tva.positive:
            entry.passed = False
            entry.reason = "undefined" if v is None else f"value {to_jsonable(v)!r} is not positive"
            entry.witness = _witness(phi)
            break
    return entry


def _sort_instances(s: FiniteStructure, rule: RewriteRule) -> Iterator[dict[str, Sort]]:
    params = rule.sortvars
    if not params:
        yield {}
        return
    sorts = sorted(s.param_sorts if s.param_sorts is not None else s.domains, key=str)
    for combo in itertools.product(sorts, repeat=len(params)):
        yield dict(zip(params, combo))


def _binder_sorts(x) -> list[Sort]:
    match x:
        case Forall(sort, body, _) | Exists(sort, body, _):
            return [sort, *_binder_sorts(body)]
        case Imp(a, b) | And(a, b) | Or(a, b):
            return _binder_sorts(a) + _binder_sorts(b)
    return []


def _check_rule(s: FiniteStructure, sig, name: str, rule: RewriteRule) -> ModelEntry:
    entry = ModelEntry("rule", name, True)
    generic_vs = free_vars(rule.lhs)
    generic_result = None if rule.kind == "prop" else well_sorted(sig, rule.lhs)
    generic_needed = [v.sort for v in generic_vs] + _binder_sorts(rule.rhs)
    if generic_result is not None:
        generic_needed.append(generic_result)
    for binding in _sort_instances(s, rule):
        if not all(s.has_domain(subst_sort(x, binding)) for x in generic_needed):
            entry.skipped += 1
            continue
        if s.instance_cap is not None:
            count = 1
            for v in generic_vs:
                count *= len(s.domain(subst_sort(v.sort, binding)))
            if count > s.instance_cap:
                entry.skipped += 1
                continue
        lhs = _instantiate(rule.lhs, {}, binding)
        rhs = _instantiate(rule.rhs, {}, binding)
        vs = free_vars(lhs)
        result_sort = None if generic_result is None else subst_sort(generic_result, binding)
        for phi in assignments(s, vs):
            entry.instances += 1
            if rule.kind == "prop":
                lv, rv = denote_prop(s, phi, lhs), denote_prop(s, phi, rhs)
            else:
                lv = s.canon(denote_term(s, phi, lhs), result_sort)
                rv = s.canon(denote_term(s, phi, rhs), result_sort)
            if lv is None or rv is None or lv != rv:
                entry.passed = False
                entry.reason = "undefined" if lv is None or rv is None else (
                    f"lhs denotes {to_jsonable(lv)!r}, rhs denotes {to_jsonable(rv)!r}"
                )
                entry.witness = {"assignment": _witness(phi),
                                 "sorts": {k: str(v) for k, v in sorted(binding.items())}}
                return entry
    if entry.instances == 0:
        entry.reason = "no instance fits the materialized sorts"
    return entry


def check_model(s: FiniteStructure, theory) -> ModelReport:
    """Axioms valid and every rule instance denotes equally on both sides."""
    entries = [
        _check_axiom(s, f"axiom{i}", ax) for i, ax in enumerate(theory.axioms)
    ]
    for i, rule in enumerate(theory.system.rules):
        entries.append(_check_rule(s, theory.signature, rule.name or f"rule{i}", rule))
    return ModelReport(s.name, theory.name, entries)


@dataclass
class SoundnessReport:
    checked: int
    violations: list[dict]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_soundness_sample(s: FiniteStructure, theory, proofs: Iterable) -> SoundnessReport:
    """Every accepted proof's conclusion must denote a positive value."""
    checked = 0
    violations = []
    for k, proof in enumerate(proofs):
        seq = proof.concl
        for phi in assignments(s, free_vars(seq)):
            checked += 1
            v = denote_sequent(s, phi, seq)
            if v is None or v not in s.tva.positive:
                violations.append({"proof": k, "assignment": _witness(phi), "value": to_jsonable(v)})
                break
    return SoundnessReport(checked, violations)
