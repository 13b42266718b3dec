"""Theories: signature + rewrite system + axioms, their file format, and built-ins.

Theory file syntax::

    (theory NAME
      (sorts set)
      (fun f (iota iota) iota)              ; argument sorts, result sort
      (pred mem set set)
      (scheme-fun K (T U) () (-> T U T))    ; sort parameters, args, result
      (scheme-pred eq (T) T T)
      (vars (x set) (y set))                ; names usable as free variables
      (rule :name n :vars ((x T)) :sortvars (T) LHS RHS)
      (axiom :name a PROP)
      (confluent true))
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from . import sexpr
from .lang import (
    Arrow, Decl, IOTA, PROP, Prop, Signature, Sort, Sym,
    free_vars, sort_depth,
)
from .models import FiniteStructure
from .rewriting import RewriteRule, RewriteSystem
from .sexpr import ParseError, split_keywords
from .syntax import Printer, Scope, parse_expr, parse_prop, parse_sort
from .tva import FiniteTva


@dataclass(frozen=True)
class Theory:
    name: str
    signature: Signature
    system: RewriteSystem
    axioms: tuple[Prop, ...] = ()
    env: Mapping[str, Sort] = field(default_factory=dict)

    def scope(self, extra: Optional[Mapping[str, Sort]] = None) -> Scope:
        env = dict(self.env)
        env.update(extra or {})
        return Scope(self.signature, env)

    def printer(self, extra: Optional[Mapping[str, Sort]] = None) -> Printer:
        env = dict(self.env)
        env.update(extra or {})
        return Printer(self.signature, env)

    def check(self) -> None:
        self.system.check(self.signature)


TheoryBundle = Theory


# ---------------------------------------------------------------------------
# Reading theory files


def _sort_list(items, scope) -> tuple[Sort, ...]:
    if not isinstance(items, list):
        raise ParseError("expected a list of sorts")
    return tuple(parse_sort(x, scope) for x in items)


def _var_decls(items, scope) -> dict[str, Sort]:
    out = {}
    if not isinstance(items, list):
        raise ParseError("expected a list of (name sort) pairs")
    for it in items:
        if not (isinstance(it, list) and len(it) == 2 and isinstance(it[0], str)):
            raise ParseError(f"bad variable declaration {sexpr.dumps(it)}")
        out[it[0]] = parse_sort(it[1], scope)
    return out


def theory_from_sexpr(sx) -> Theory:
    if not (isinstance(sx, list) and len(sx) >= 2 and sx[0] == "theory" and isinstance(sx[1], str)):
        raise ParseError("a theory file must start with (theory NAME ...)")
    name = sx[1]
    sorts: list[str] = []
    decls: list[Decl] = []
    env: dict[str, Sort] = {}
    pending_rules, pending_axioms = [], []
    confluent = True
    for d in sx[2:]:
        if not isinstance(d, list) or not d:
            raise ParseError(f"bad declaration {sexpr.dumps(d)}")
        head = d[0]
        if head == "sorts":
            sorts.extend(d[1:])
        elif head in ("fun", "pred", "scheme-fun", "scheme-pred", "vars", "rule", "axiom", "confluent"):
            pass
        else:
            raise ParseError(f"unknown declaration {head}")
    base = Signature.build(sorts, [])
    plain = Scope(base)
    for d in sx[2:]:
        head = d[0]
        if head == "fun":
            decls.append(Decl(d[1], _sort_list(d[2], plain), parse_sort(d[3], plain)))
        elif head == "pred":
            decls.append(Decl(d[1], tuple(parse_sort(x, plain) for x in d[2:])))
        elif head == "scheme-fun":
            params = tuple(d[2])
            sc = Scope(base, sortvars=frozenset(params))
            decls.append(Decl(d[1], _sort_list(d[3], sc), parse_sort(d[4], sc), params))
        elif head == "scheme-pred":
            params = tuple(d[2])
            sc = Scope(base, sortvars=frozenset(params))
            decls.append(Decl(d[1], tuple(parse_sort(x, sc) for x in d[3:]), None, params))
        elif head == "vars":
            env.update(_var_decls(d[1:], plain))
        elif head == "rule":
            pending_rules.append(d[1:])
        elif head == "axiom":
            pending_axioms.append(d[1:])
        elif head == "confluent":
            confluent = d[1:] != ["false"]
    sig = Signature.build(sorts, decls)
    rules = []
    for i, body in enumerate(pending_rules):
        kw, pos = split_keywords(body)
        if len(pos) != 2:
            raise ParseError("rule needs exactly a lhs and a rhs")
        sortvars = frozenset(kw.get("sortvars", []))
        sc0 = Scope(sig, sortvars=sortvars)
        local = dict(env)
        local.update(_var_decls(kw.get("vars", []), sc0))
        sc = Scope(sig, local, sortvars)
        lhs = parse_expr(pos[0], sc)
        rhs = parse_expr(pos[1], sc)
        rules.append(RewriteRule(lhs, rhs, kw.get("name", f"rule{i}")))
    axioms = []
    for body in pending_axioms:
        kw, pos = split_keywords(body)
        local = dict(env)
        local.update(_var_decls(kw.get("vars", []), Scope(sig)))
        axioms.append(parse_prop(pos[0], Scope(sig, local)))
    th = Theory(name, sig, RewriteSystem(tuple(rules), confluent), tuple(axioms), env)
    th.check()
    return th


def parse_theory(text: str) -> Theory:
    return theory_from_sexpr(sexpr.read(text))


def load_theory(path) -> Theory:
    return parse_theory(Path(path).read_text())


# ---------------------------------------------------------------------------
# Writing theory files


def theory_to_sexpr(th: Theory) -> list:
    p = Printer()
    out: list = ["theory", th.name, ["sorts", *sorted(th.signature.sorts)]]
    for d in th.signature.decls.values():
        if d.params:
            if d.is_predicate:
                out.append(["scheme-pred", d.name, list(d.params), *(p.sort(a) for a in d.args)])
            else:
                out.append(["scheme-fun", d.name, list(d.params), [p.sort(a) for a in d.args], p.sort(d.result)])
        elif d.is_predicate:
            out.append(["pred", d.name, *(p.sort(a) for a in d.args)])
        else:
            out.append(["fun", d.name, [p.sort(a) for a in d.args], p.sort(d.result)])
    if th.env:
        out.append(["vars", *([k, p.sort(v)] for k, v in sorted(th.env.items()))])
    for r in th.system.rules:
        vs = sorted(free_vars(r.lhs), key=lambda v: v.name)
        local = {v.name: v.sort for v in vs}
        rp = Printer(th.signature, local)
        item: list = ["rule", ":name", r.name]
        if r.sortvars:
            item += [":sortvars", list(r.sortvars)]
        if vs:
            item += [":vars", [[v.name, p.sort(v.sort)] for v in vs]]
        item += [rp.expr(r.lhs), rp.expr(r.rhs)]
        out.append(item)
    for i, ax in enumerate(th.axioms):
        vs = sorted(free_vars(ax), key=lambda v: v.name)
        ap = Printer(th.signature, {v.name: v.sort for v in vs})
        item = ["axiom", ":name", f"axiom{i}"]
        if vs:
            item += [":vars", [[v.name, p.sort(v.sort)] for v in vs]]
        out.append(item + [ap.prop(ax)])
    if not th.system.confluent:
        out.append(["confluent", "false"])
    return out


def theory_to_text(th: Theory) -> str:
    sx = theory_to_sexpr(th)
    lines = [f"(theory {th.name}"]
    for item in sx[2:]:
        lines.append("  " + sexpr.dumps(item))
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Built-in theories

STT_TEXT = """
(theory stt
  (sorts iota o)
  (scheme-fun K (T U) () (-> T U T))
  (scheme-fun S (T U V) () (-> (-> T U V) (-> T U) T V))
  (fun dtop () o)
  (fun dbot () o)
  (fun dimp () (-> o o o))
  (fun dand () (-> o o o))
  (fun dor () (-> o o o))
  (scheme-fun dall (T) () (-> (-> T o) o))
  (scheme-fun dex (T) () (-> (-> T o) o))
  (scheme-fun alpha (T U) ((-> T U) T) U)
  (pred eps o)
  (vars (a iota) (b iota) (c iota) (p o) (q o) (r o) (f (-> iota o)) (g (-> iota o)))
  (rule :name S :sortvars (T U V) :vars ((x (-> T U V)) (y (-> T U)) (z T))
        (alpha (alpha (alpha {S T U V} x) y) z) (alpha (alpha x z) (alpha y z)))
  (rule :name K :sortvars (T U) :vars ((x T) (y U))
        (alpha (alpha {K T U} x) y) x)
  (rule :name eps-top (eps dtop) true)
  (rule :name eps-bot (eps dbot) false)
  (rule :name eps-imp :vars ((x o) (y o))
        (eps (alpha (alpha dimp x) y)) (=> (eps x) (eps y)))
  (rule :name eps-and :vars ((x o) (y o))
        (eps (alpha (alpha dand x) y)) (and (eps x) (eps y)))
  (rule :name eps-or :vars ((x o) (y o))
        (eps (alpha (alpha dor x) y)) (or (eps x) (eps y)))
  (rule :name eps-all :sortvars (T) :vars ((x (-> T o)))
        (eps (alpha {dall T} x)) (forall (y T) (eps (alpha x y))))
  (rule :name eps-ex :sortvars (T) :vars ((x (-> T o)))
        (eps (alpha {dex T} x)) (exists (y T) (eps (alpha x y)))))
"""

PIMPQ_TEXT = """
(theory pimpq
  (pred P)
  (pred Q)
  (rule :name P-unfold P (=> P Q)))
"""

QIMPP_TEXT = """
(theory qimpp
  (pred P)
  (pred Q)
  (rule :name P-unfold P (=> Q P)))
"""

SUBSET_TEXT = """
(theory subset
  (sorts set)
  (pred mem set set)
  (pred subset set set)
  (vars (x set) (y set) (z set) (a set) (b set))
  (rule :name subset-def (subset x y) (forall (z set) (=> (mem z x) (mem z y)))))
"""

_BUILTIN_TEXT = {"stt": STT_TEXT, "pimpq": PIMPQ_TEXT, "qimpp": QIMPP_TEXT, "subset": SUBSET_TEXT}
_cache: dict[str, Theory] = {}


def builtin(name: str) -> Theory:
    key = name.lower()
    if key not in _BUILTIN_TEXT:
        raise KeyError(f"no built-in theory {name!r}; known: {', '.join(sorted(_BUILTIN_TEXT))}")
    if key not in _cache:
        _cache[key] = parse_theory(_BUILTIN_TEXT[key])
    return _cache[key]


def builtin_names() -> list[str]:
    return sorted(_BUILTIN_TEXT)


def stt_theory() -> Theory:
    return builtin("stt")


def example_theories() -> list[Theory]:
    return [builtin("pimpq"), builtin("qimpp")]


def resolve_theory(ref: str) -> Theory:
    """A built-in by name, or a theory file path."""
    if ref.lower() in _BUILTIN_TEXT:
        return builtin(ref)
    return load_theory(ref)


# ---------------------------------------------------------------------------
# The finite model of simple type theory


class LazyFn:
    """A function value of a sort too large to tabulate."""

    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, x):
        return self.fn(x)


DEFAULT_DOMAIN_CAP = 10_000


@dataclass(frozen=True)
class SortDepthBound:
    depth: int = 2

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("sort depth bound must be at least 1")


class DomainTooLarge(ValueError):
    pass


def _stt_sorts(depth: int) -> list[Sort]:
    layers = [[IOTA, PROP]]
    seen = list(layers[0])
    for d in range(1, depth + 1):
        new = [Arrow(a, b) for a in seen for b in seen if max(sort_depth(a), sort_depth(b)) == d - 1]
        layers.append(new)
        seen = seen + new
    return seen


def build_stt_model(
    t: FiniteTva,
    bound: SortDepthBound | int = 2,
    cap: int = DEFAULT_DOMAIN_CAP,
    strict: bool = False,
) -> FiniteStructure:
    """The standard model: M_iota = {0}, M_o = B, M_{T->U} = all functions.

    Function spaces are tabulated as tuples indexed by the domain's order,
    for every sort within the depth bound whose size stays under ``cap``.
    Larger sorts are left out (or rejected when ``strict``); constants of
    such sorts are interpreted by :class:`LazyFn` closures. Sort parameters
    of rule schemes range over the materialized sorts of depth below the
    bound, so every variable of a checked instance still has a domain;
    instances with more than ``cap`` assignments are skipped and counted.
    """
    if not t.is_full():
        raise ValueError("the STT model needs a full truth values algebra")
    depth = bound.depth if isinstance(bound, SortDepthBound) else SortDepthBound(bound).depth

    domains: dict[Sort, tuple] = {IOTA: (0,), PROP: tuple(t.elements)}
    omitted: list[str] = []
    for s in _stt_sorts(depth):
        if s in domains:
            continue
        if s.dom not in domains or s.cod not in domains:
            omitted.append(str(s))
            continue
        n_dom, n_cod = len(domains[s.dom]), len(domains[s.cod])
        if n_dom * math.log(max(n_cod, 1)) > math.log(cap) + 1e-9:
            if strict:
                raise DomainTooLarge(f"M_{s} has {n_cod}^{n_dom} elements, above the cap {cap}")
            omitted.append(str(s))
            continue
        domains[s] = tuple(itertools.product(domains[s.cod], repeat=n_dom))
    params = tuple(s for s in domains if sort_depth(s) < depth)
    index = {s: {v: i for i, v in enumerate(d)} for s, d in domains.items()}

    def canon(v, sort):
        if isinstance(v, LazyFn) and isinstance(sort, Arrow) and sort in domains:
            return tuple(canon(v(d), sort.cod) for d in domains[sort.dom])
        return v

    def app(f, x, dom: Sort):
        if isinstance(f, tuple):
            return f[index[dom][canon(x, dom)]]
        return f(x)

    def rng(a, T: Sort) -> frozenset:
        if T not in domains:
            raise KeyError(T)
        return frozenset(app(a, d, T) for d in domains[T])

    def fun(sym: Sym):
        n, ix = sym.name, sym.indices
        if n == "K":
            return lambda: LazyFn(lambda a: LazyFn(lambda b: a))
        if n == "S":
            T, U, _ = ix
            return lambda: LazyFn(
                lambda a: LazyFn(lambda b: LazyFn(lambda c: app(app(a, c, T), app(b, c, T), U)))
            )
        if n == "alpha":
            T = ix[0]
            return lambda f, x: app(f, x, T)
        if n == "dtop":
            return lambda: t.top
        if n == "dbot":
            return lambda: t.bot
        if n in ("dimp", "dand", "dor"):
            table = {"dimp": t.imp, "dand": t.conj, "dor": t.disj}[n]
            return lambda: LazyFn(lambda a: LazyFn(lambda b: table[(a, b)]))
        if n == "dall":
            T = ix[0]
            return lambda: LazyFn(lambda a: t.forall[rng(a, T)])
        if n == "dex":
            T = ix[0]
            return lambda: LazyFn(lambda a: t.exists[rng(a, T)])
        raise KeyError(f"no interpretation for {n}")

    def pred(sym: Sym):
        if sym.name == "eps":
            return lambda a: a
        raise KeyError(f"no interpretation for {sym.name}")

    return FiniteStructure(
        t, domains, fun, pred, f"stt[{t.name or 'tva'},depth={depth}]", canon,
        info={"omitted_sorts": omitted, "cap": cap},
        param_sorts=params,
        instance_cap=cap,
    )
