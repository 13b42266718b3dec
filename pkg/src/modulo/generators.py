"""Seeded random generators: propositions, STT terms and checked proofs.

Proofs are built bottom-up, so every generated tree is valid by
construction; callers still run them through the kernel. Eliminations are
mostly placed over the matching introduction, which gives detours to
reduce, and goals are sometimes replaced by a congruent variant (one
rewrite step in either direction) so that redexes must be recognized
modulo the congruence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .kernel import Proof
from .lang import (
    IOTA, PROP, TOP, And, Base, App, Arrow, Atom, Imp, Or, Prop, Sequent, Sort, Sym, Term, Var,
    exists, forall, free_vars, fresh_name, subst1,
)
from .reduction import weaken
from .rewriting import expansions, reducts

# ---------------------------------------------------------------------------
# Vocabularies


@dataclass
class Vocabulary:
    """What random propositions of a theory are made of."""

    atoms: Callable[[random.Random, list[Var]], Prop]
    quant_sorts: tuple[Sort, ...] = ()
    terms: Optional[Callable[[random.Random, Sort, list[Var]], Term]] = None
    free: list[Var] = field(default_factory=list)


def _prop_atoms(rng: random.Random, vs) -> Prop:
    return Atom(Sym(rng.choice("PQ")))


SET = Base("set")


def _subset_atoms(rng: random.Random, vs) -> Prop:
    pick = [v for v in vs if v.sort == SET]
    u, w = rng.choice(pick), rng.choice(pick)
    return Atom(Sym(rng.choice(["mem", "mem", "subset"])), (u, w))


def _subset_terms(rng, sort, vs) -> Term:
    return rng.choice([v for v in vs if v.sort == sort])


def _alpha(f: Term, x: Term, dom: Sort, cod: Sort) -> App:
    return App(Sym("alpha", (dom, cod)), (f, x))


def minimal_term(sort: Sort, vs: list[Var]) -> Term:
    """Some inhabitant of ``sort``, built with K when no variable fits."""
    for v in vs:
        if v.sort == sort:
            return v
    if isinstance(sort, Arrow):
        # K{U,T} u : T -> U
        k = App(Sym("K", (sort.cod, sort.dom)))
        return _alpha(k, minimal_term(sort.cod, vs), sort.cod, sort)
    if sort == PROP:
        return App(Sym("dtop"))
    raise ValueError(f"no inhabitant for {sort}")


def stt_term(rng: random.Random, sort: Sort, vs: list[Var], size: int = 8) -> Term:
    """A random well-sorted STT term of the given sort."""
    if size <= 1:
        leaves = [v for v in vs if v.sort == sort]
        if sort == PROP:
            leaves += [App(Sym("dtop")), App(Sym("dbot"))]
        return rng.choice(leaves) if leaves else minimal_term(sort, vs)
    roll = rng.random()
    base = [IOTA, PROP]
    if sort == PROP and roll < 0.35:
        op = rng.choice(["dimp", "dand", "dor"])
        x = stt_term(rng, PROP, vs, size // 2)
        y = stt_term(rng, PROP, vs, size // 2)
        oo = Arrow(PROP, PROP)
        return _alpha(_alpha(App(Sym(op)), x, PROP, oo), y, PROP, PROP)
    if sort == PROP and roll < 0.5:
        q = rng.choice(["dall", "dex"])
        t = rng.choice([IOTA, PROP])
        body = stt_term(rng, Arrow(t, PROP), vs, size - 2)
        return _alpha(App(Sym(q, (t,))), body, Arrow(t, PROP), PROP)
    if roll < 0.65:
        # K redex: K{sort,U} x y
        u = rng.choice(base)
        x = stt_term(rng, sort, vs, size // 2)
        y = stt_term(rng, u, vs, size // 3)
        k = App(Sym("K", (sort, u)))
        return _alpha(_alpha(k, x, sort, Arrow(u, sort)), y, u, sort)
    if roll < 0.75:
        # S redex: S{T,U,sort} x y z
        t, u = rng.choice(base), rng.choice(base)
        x = stt_term(rng, Arrow(t, Arrow(u, sort)), vs, size // 3)
        y = stt_term(rng, Arrow(t, u), vs, size // 3)
        z = stt_term(rng, t, vs, size // 3)
        s = App(Sym("S", (t, u, sort)))
        tuv, tu, tv = Arrow(t, Arrow(u, sort)), Arrow(t, u), Arrow(t, sort)
        sx = _alpha(s, x, tuv, Arrow(tu, tv))
        return _alpha(_alpha(sx, y, tu, tv), z, t, sort)
    # plain application
    dom = rng.choice(base)
    f = stt_term(rng, Arrow(dom, sort), vs, size // 2)
    x = stt_term(rng, dom, vs, size // 2)
    return _alpha(f, x, dom, sort)


def stt_prop(rng: random.Random, vs: list[Var], size: int = 8) -> Prop:
    return Atom(Sym("eps"), (stt_term(rng, PROP, vs, size),))


def _stt_atoms(rng, vs) -> Prop:
    return stt_prop(rng, vs, rng.randint(1, 5))


def _stt_terms(rng, sort, vs) -> Term:
    return stt_term(rng, sort, vs, rng.randint(1, 4))


def _first_order(theory) -> Vocabulary:
    """Terms and atoms built from a first-order signature and the theory's variables."""
    decls = sorted(theory.signature.decls.values(), key=lambda d: d.name)
    if any(d.params or not all(isinstance(a, Base) for a in d.args) for d in decls):
        raise KeyError(f"no generator vocabulary for theory {theory.name}")
    funs = [d for d in decls if not d.is_predicate]
    preds = [d for d in decls if d.is_predicate]

    def term(rng, sort, vs, size: int = 3) -> Term:
        leaves: list[Term] = [v for v in vs if v.sort == sort]
        leaves += [App(Sym(d.name)) for d in funs if not d.args and d.result == sort]
        compound = [d for d in funs if d.args and d.result == sort]
        if compound and (size > 1 and rng.random() < 0.5 or not leaves):
            d = rng.choice(compound)
            return App(Sym(d.name), tuple(term(rng, a, vs, size - 1) for a in d.args))
        if not leaves:
            raise ValueError(f"no inhabitant for {sort}")
        return rng.choice(leaves)

    def atoms(rng, vs) -> Prop:
        d = rng.choice(preds)
        return Atom(Sym(d.name), tuple(term(rng, a, vs) for a in d.args))

    sorts = tuple(Base(n) for n in sorted(theory.signature.sorts))
    env = [Var(k, s) for k, s in sorted(theory.env.items())]
    return Vocabulary(atoms, sorts, lambda rng, sort, vs: term(rng, sort, vs), env)


def vocabulary(theory) -> Vocabulary:
    env = [Var(k, s) for k, s in sorted(theory.env.items())]
    match theory.name:
        case "pimpq" | "qimpp":
            return Vocabulary(_prop_atoms)
        case "subset":
            return Vocabulary(_subset_atoms, (SET,), _subset_terms, env)
        case "stt":
            return Vocabulary(_stt_atoms, (IOTA,), _stt_terms, env)
    return _first_order(theory)


def random_prop(rng: random.Random, voc: Vocabulary, depth: int, vs: Optional[list[Var]] = None) -> Prop:
    vs = voc.free if vs is None else vs
    if depth <= 0 or rng.random() < 0.3:
        return voc.atoms(rng, vs)
    roll = rng.random()
    if voc.quant_sorts and roll < 0.2:
        s = rng.choice(voc.quant_sorts)
        x = Var(fresh_name("w", {v.name for v in vs}), s)
        body = random_prop(rng, voc, depth - 1, vs + [x])
        return (forall if rng.random() < 0.5 else exists)(x, body)
    ctor = rng.choice([Imp, Imp, And, Or])
    return ctor(random_prop(rng, voc, depth - 1, vs), random_prop(rng, voc, depth - 1, vs))


# ---------------------------------------------------------------------------
# Proofs


class ProofGenerator:
    """Random valid proofs in one theory.

    ``depth`` bounds the height of every generated tree.
    """

    def __init__(self, theory, rng: random.Random, variant_rate: float = 0.3):
        self.theory = theory
        self.sys = theory.system
        self.voc = vocabulary(theory)
        self.rng = rng
        self.variant_rate = variant_rate
        self._counter = 0

    # -- helpers -----------------------------------------------------------

    def variant(self, p: Prop) -> Prop:
        """``p`` or a proposition one rewrite step away from it."""
        if self.rng.random() >= self.variant_rate:
            return p
        options = []
        for i, r in enumerate(reducts(self.sys, p)):
            options.append(r)
            if i >= 3:
                break
        for i, r in enumerate(expansions(self.sys, p)):
            options.append(r)
            if i >= 3:
                break
        return self.rng.choice(options) if options else p

    def fresh_var(self, sort: Sort, avoid) -> Var:
        self._counter += 1
        names = {v.name for v in free_vars(*avoid)} | set(self.theory.env)
        return Var(fresh_name(f"e{self._counter}", names), sort)

    def prop(self, ctx, depth: int = 2) -> Prop:
        vs = sorted(set(self.voc.free) | free_vars(ctx), key=lambda v: v.name)
        return random_prop(self.rng, self.voc, depth, vs)

    def context(self, size: int) -> tuple[Prop, ...]:
        return tuple(self.prop((), 1) for _ in range(size))

    # -- generation --------------------------------------------------------

    def leaf(self, ctx) -> Proof:
        if ctx and self.rng.random() < 0.85:
            i = self.rng.randrange(len(ctx))
            return Proof("axiom", Sequent(ctx, self.variant(ctx[i])), hyp=i)
        return Proof("topI", Sequent(ctx, self.variant(TOP)))

    def gen(self, ctx: tuple[Prop, ...], depth: int) -> Proof:
        if depth <= 1:
            return self.leaf(ctx)
        choices = ["leaf", "impI", "andI", "orI", "impE", "andE", "impE", "andE", "orE"]
        if self.voc.quant_sorts:
            choices += ["allI", "allE", "exI", "exE", "allE", "exE"]
        kind = self.rng.choice(choices)
        if depth < 3 and kind in ("impE", "andE", "orE", "allE", "exE"):
            kind = self.rng.choice(["impI", "andI", "orI", "leaf"])
        return getattr(self, "_" + kind)(ctx, depth)

    def _leaf(self, ctx, depth):
        return self.leaf(ctx)

    def _impI(self, ctx, depth):
        a = self.prop(ctx)
        pi = self.gen(ctx + (a,), depth - 1)
        return Proof("impI", Sequent(ctx, self.variant(Imp(a, pi.goal))), (pi,), a=a, b=pi.goal)

    def _andI(self, ctx, depth):
        p1, p2 = self.gen(ctx, depth - 1), self.gen(ctx, depth - 1)
        return Proof("andI", Sequent(ctx, self.variant(And(p1.goal, p2.goal))), (p1, p2),
                     a=p1.goal, b=p2.goal)

    def _orI(self, ctx, depth):
        pi = self.gen(ctx, depth - 1)
        other = self.prop(ctx)
        if self.rng.random() < 0.5:
            return Proof("orI1", Sequent(ctx, self.variant(Or(pi.goal, other))), (pi,),
                         a=pi.goal, b=other)
        return Proof("orI2", Sequent(ctx, self.variant(Or(other, pi.goal))), (pi,),
                     a=other, b=pi.goal)

    def _impE(self, ctx, depth):
        rho = self.gen(ctx, depth - 1)
        a = rho.goal
        pi = self.gen(ctx + (a,), depth - 2)
        b = pi.goal
        major = Proof("impI", Sequent(ctx, self.variant(Imp(a, b))), (pi,), a=a, b=b)
        return Proof("impE", Sequent(ctx, b), (major, rho), a=a, b=b)

    def _andE(self, ctx, depth):
        p1, p2 = self.gen(ctx, depth - 2), self.gen(ctx, depth - 2)
        a, b = p1.goal, p2.goal
        major = Proof("andI", Sequent(ctx, self.variant(And(a, b))), (p1, p2), a=a, b=b)
        if self.rng.random() < 0.5:
            return Proof("andE1", Sequent(ctx, a), (major,), a=a, b=b)
        return Proof("andE2", Sequent(ctx, b), (major,), a=a, b=b)

    def _orE(self, ctx, depth):
        pi = self.gen(ctx, depth - 2)
        left = self.rng.random() < 0.5
        other = pi.goal if self.rng.random() < 0.3 else self.prop(ctx)
        a, b = (pi.goal, other) if left else (other, pi.goal)
        major = Proof("orI1" if left else "orI2", Sequent(ctx, self.variant(Or(a, b))), (pi,),
                      a=a, b=b)
        if a == b and self.rng.random() < 0.5:
            k = len(ctx)
            s1 = Proof("axiom", Sequent(ctx + (a,), a), hyp=k)
            s2 = Proof("axiom", Sequent(ctx + (b,), b), hyp=k)
            c = a
        else:
            gamma = self.gen(ctx, depth - 1)
            c = gamma.goal
            s1 = weaken(gamma, len(ctx), (a,))
            s2 = weaken(gamma, len(ctx), (b,))
            if self.rng.random() < 0.5:
                s1 = self.gen(ctx + (a,), depth - 1)
                c = s1.goal
                s2 = self._prove_in(ctx + (b,), c, depth - 1) or s2
                if s2.goal != c:
                    s1 = weaken(gamma, len(ctx), (a,))
                    c = gamma.goal
        return Proof("orE", Sequent(ctx, c), (s1, s2, major), a=a, b=b)

    def _prove_in(self, ctx, goal, depth) -> Optional[Proof]:
        """A proof of ``goal`` when it is literally a hypothesis or ⊤-like."""
        for i in range(len(ctx) - 1, -1, -1):
            if ctx[i] == goal:
                return Proof("axiom", Sequent(ctx, goal), hyp=i)
        return None

    def _quant_sort(self) -> Sort:
        return self.rng.choice(self.voc.quant_sorts)

    def _term(self, sort: Sort, ctx) -> Term:
        vs = sorted(set(self.voc.free) | free_vars(ctx), key=lambda v: v.name)
        return self.voc.terms(self.rng, sort, vs)

    def _allI_node(self, ctx, depth) -> Proof:
        pi = self.gen(ctx, depth - 1)
        candidates = sorted(
            (v for v in free_vars(pi.goal) - free_vars(ctx) if v.sort in self.voc.quant_sorts),
            key=lambda v: v.name,
        )
        if candidates and self.rng.random() < 0.8:
            x = self.rng.choice(candidates)
        else:
            x = self.fresh_var(self._quant_sort(), (ctx, pi.goal))
        return Proof("allI", Sequent(ctx, self.variant(forall(x, pi.goal))), (pi,), a=pi.goal, x=x)

    def _allI(self, ctx, depth):
        return self._allI_node(ctx, depth)

    def _allE(self, ctx, depth):
        major = self._allI_node(ctx, depth - 1)
        t = self._term(major.x.sort, ctx)
        goal = self.variant(subst1(major.a, major.x, t))
        return Proof("allE", Sequent(ctx, goal), (major,), a=major.a, x=major.x, t=t)

    def _exI_node(self, ctx, depth) -> Proof:
        pi = self.gen(ctx, depth - 1)
        g = pi.goal
        occurring = sorted(
            (v for v in free_vars(g) if v.sort in self.voc.quant_sorts), key=lambda v: v.name
        )
        if occurring and self.rng.random() < 0.8:
            y = self.rng.choice(occurring)
            x = self.fresh_var(y.sort, (ctx, g))
            a, t = subst1(g, y, x), y
        else:
            x = self.fresh_var(self._quant_sort(), (ctx, g))
            a, t = g, self._term(x.sort, ctx)
        return Proof("exI", Sequent(ctx, self.variant(exists(x, a))), (pi,), a=a, x=x, t=t)

    def _exI(self, ctx, depth):
        return self._exI_node(ctx, depth)

    def _exE(self, ctx, depth):
        major = self._exI_node(ctx, depth - 1)
        x = self.fresh_var(major.x.sort, (ctx, major.concl, major.a))
        a = subst1(major.a, major.x, x)
        sigma = self.gen(ctx + (a,), depth - 1)
        if x in free_vars(sigma.goal):
            sigma = self.gen(ctx + (a,), 1)
            if x in free_vars(sigma.goal):
                sigma = Proof("topI", Sequent(ctx + (a,), TOP))
        return Proof("exE", Sequent(ctx, sigma.goal), (major, sigma), a=a, x=x)


def random_proofs(theory, n: int, seed: int, depth: int = 6, max_context: int = 2) -> list[Proof]:
    """``n`` random proofs of height at most ``depth``; some have an empty context."""
    rng = random.Random(seed)
    gen = ProofGenerator(theory, rng)
    out = []
    for _ in range(n):
        size = rng.choice([0, 0] + list(range(1, max_context + 1)))
        out.append(gen.gen(gen.context(size), rng.randint(2, depth)))
    return out
