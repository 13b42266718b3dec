"""Proof reduction: detour contractions and permutative conversions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .kernel import EIGEN, MAJOR, Checker, Proof, at, proof_free_vars, replace_at
from .lang import (
    Prop, Sequent, Term, Var, apply_subst, forall, fresh_name, free_vars, instantiate,
)
from .rewriting import DEFAULT_BUDGET, Budget, Verdict

MATCHING_INTRO = {
    "impE": ("impI",), "andE1": ("andI",), "andE2": ("andI",),
    "orE": ("orI1", "orI2"), "allE": ("allI",), "exE": ("exI",),
}


def _names(*xs) -> set[str]:
    return {v.name for v in free_vars(*xs)}


def _tree_names(p: Proof) -> set[str]:
    return {v.name for v in proof_free_vars(p)}


# ---------------------------------------------------------------------------
# Substitution and renaming on proofs


def _subst_bound(sigma: Mapping[Var, Term], x: Var, a: Prop) -> tuple[Var, Prop]:
    """Substitute into the quantified ``a`` (``x`` bound), renaming ``x`` if needed."""
    q = apply_subst(sigma, forall(x, a))
    nx = x
    if x in free_vars(q):
        nx = Var(fresh_name(x.name, _names(q)), x.sort)
    return nx, instantiate(q.body, nx)


def rename_eigen(n: Proof, new: Var) -> Proof:
    """Rename the eigenvariable of an allI/exE node inside its scope."""
    sigma = {n.x: new}
    if n.rule == "allI":
        prem = (subst_proof(n.premises[0], sigma),)
    else:
        prem = (n.premises[0], subst_proof(n.premises[1], sigma))
    return replace(n, x=new, a=apply_subst(sigma, n.a), premises=prem)


def subst_proof(p: Proof, sigma: Mapping[Var, Term]) -> Proof:
    """Apply a substitution to every sequent and instance datum of a proof.

    Eigenvariables are local to their scope: they are never substituted and
    are renamed when a substituted term mentions them.
    """
    sigma = {v: t for v, t in sigma.items() if v != t}
    if not sigma:
        return p
    concl = apply_subst(sigma, p.concl)
    if p.rule in EIGEN:
        inner = {v: t for v, t in sigma.items() if v != p.x}
        if p.x in free_vars(*inner.values()):
            avoid = _tree_names(p) | _names(*inner.values()) | {v.name for v in inner}
            p = rename_eigen(p, Var(fresh_name(p.x.name, avoid), p.x.sort))
        if p.rule == "allI":
            prem = (subst_proof(p.premises[0], inner),)
        else:
            prem = (subst_proof(p.premises[0], sigma), subst_proof(p.premises[1], inner))
        return replace(p, concl=concl, a=apply_subst(inner, p.a), premises=prem)
    x, a = p.x, p.a
    if p.rule in ("allE", "exI"):
        x, a = _subst_bound(sigma, p.x, p.a)
    elif a is not None:
        a = apply_subst(sigma, a)
    return replace(
        p,
        concl=concl,
        a=a,
        x=x,
        b=None if p.b is None else apply_subst(sigma, p.b),
        t=None if p.t is None else apply_subst(sigma, p.t),
        premises=tuple(subst_proof(q, sigma) for q in p.premises),
    )


def weaken(p: Proof, pos: int, props: tuple[Prop, ...]) -> Proof:
    """Insert ``props`` at position ``pos`` of every context in the tree."""
    if not props:
        return p
    k = len(props)
    avoid = _names(*props)

    def go(n: Proof) -> Proof:
        if n.rule in EIGEN and n.x.name in avoid:
            n = rename_eigen(n, Var(fresh_name(n.x.name, avoid | _tree_names(n)), n.x.sort))
        ctx = n.context
        concl = Sequent(ctx[:pos] + props + ctx[pos:], n.goal)
        hyp = n.hyp + k if n.hyp is not None and n.hyp >= pos else n.hyp
        return replace(n, concl=concl, hyp=hyp, premises=tuple(go(q) for q in n.premises))

    return go(p)


def reconclude(p: Proof, goal: Prop) -> Proof:
    """The same derivation ending in ``goal``, a proposition congruent to its goal.

    Introduction rules, axioms and the eliminations with a free goal just
    take the new goal; the others adjust their instance data or push the
    new goal into their branches.
    """
    if p.goal == goal:
        return p
    concl = Sequent(p.context, goal)
    match p.rule:
        case "impE":
            return replace(p, concl=concl, b=goal)
        case "andE1":
            return replace(p, concl=concl, a=goal)
        case "andE2":
            return replace(p, concl=concl, b=goal)
        case "orE":
            s1, s2, d = p.premises
            return replace(p, concl=concl, premises=(reconclude(s1, goal), reconclude(s2, goal), d))
        case "exE":
            if p.x in free_vars(goal):
                p = rename_eigen(p, Var(fresh_name(p.x.name, _tree_names(p) | _names(goal)), p.x.sort))
            d, s = p.premises
            return replace(p, concl=concl, premises=(d, reconclude(s, goal)))
    return replace(p, concl=concl)


def discharge(p: Proof, pos: int, rho: Proof) -> Proof:
    """Replace uses of hypothesis ``pos`` by ``rho`` and drop it from every context.

    ``rho`` proves the root context without position ``pos``. Hypotheses
    must be resolved (see :func:`resolve_hyps`).
    """
    base = len(rho.context)

    def go(n: Proof) -> Proof:
        ctx = n.context
        new_ctx = ctx[:pos] + ctx[pos + 1:]
        if n.rule == "axiom" and n.hyp == pos:
            return reconclude(weaken(rho, base, new_ctx[base:]), n.goal)
        hyp = n.hyp - 1 if n.hyp is not None and n.hyp > pos else n.hyp
        return replace(n, concl=Sequent(new_ctx, n.goal), hyp=hyp,
                       premises=tuple(go(q) for q in n.premises))

    return go(p)


def resolve_hyps(checker: Checker, p: Proof) -> Proof:
    """Fill in the hypothesis index of every axiom leaf (innermost match)."""
    if p.rule == "axiom":
        if p.hyp is not None or p.axiom is not None:
            return p
        h = checker.find_hyp(p.context, p.goal)
        if h is not None:
            return replace(p, hyp=h)
        for i, ax in enumerate(checker.theory.axioms):
            if checker.cong(ax, p.goal) is Verdict.YES:
                return replace(p, axiom=i)
        return p
    return replace(p, premises=tuple(resolve_hyps(checker, q) for q in p.premises))


def canonical(p: Proof, counter: Optional[list[int]] = None) -> Proof:
    """Rename eigenvariables in preorder so alpha-variant proofs coincide."""
    counter = counter if counter is not None else [0]
    if p.rule in EIGEN:
        p = rename_eigen(p, Var(f"#{counter[0]}", p.x.sort))
        counter[0] += 1
    if p.rule in ("allE", "exI"):
        p = replace(p, x=Var("#", p.x.sort), a=instantiate(forall(p.x, p.a).body, Var("#", p.x.sort)))
    return replace(p, premises=tuple(canonical(q, counter) for q in p.premises))


# ---------------------------------------------------------------------------
# Redexes


@dataclass(frozen=True)
class Redex:
    path: tuple[int, ...]
    kind: str  # detour | permutative
    rules: tuple[str, str]


def _connectives_match(checker: Checker, e: Proof, i: Proof) -> bool:
    if e.rule in ("allE", "exE"):
        return checker.cong(e.quantified(), i.quantified()) is Verdict.YES
    return (checker.cong(e.a, i.a) is Verdict.YES
            and checker.cong(e.b, i.b) is Verdict.YES)


def redex_kind(checker: Checker, n: Proof) -> Optional[str]:
    if n.rule not in MAJOR:
        return None
    major = n.premises[MAJOR[n.rule]]
    if major.rule in MATCHING_INTRO.get(n.rule, ()) and _connectives_match(checker, n, major):
        return "detour"
    if major.rule in ("orE", "exE"):
        return "permutative"
    return None


def find_redex(checker: Checker, p: Proof, detours_only: bool = False) -> Optional[Redex]:
    """Leftmost-outermost redex (preorder)."""
    for path, n in p.nodes():
        kind = redex_kind(checker, n)
        if kind is not None and (kind == "detour" or not detours_only):
            return Redex(path, kind, (n.rule, n.premises[MAJOR[n.rule]].rule))
    return None


def has_detour(checker: Checker, p: Proof) -> bool:
    return find_redex(checker, p, detours_only=True) is not None


# ---------------------------------------------------------------------------
# Contractions


def contract_detour(n: Proof) -> Proof:
    gamma = n.context
    k = len(gamma)
    major = n.premises[MAJOR[n.rule]]
    match n.rule:
        case "impE":
            (pi,) = major.premises
            return reconclude(discharge(pi, k, n.premises[1]), n.goal)
        case "andE1" | "andE2":
            pi = major.premises[0 if n.rule == "andE1" else 1]
            return reconclude(pi, n.goal)
        case "orE":
            (pi,) = major.premises
            branch = n.premises[0 if major.rule == "orI1" else 1]
            return discharge(branch, k, pi)
        case "allE":
            (pi,) = major.premises
            return reconclude(subst_proof(pi, {major.x: n.t}), n.goal)
        case "exE":
            (pi,) = major.premises
            sigma = subst_proof(n.premises[1], {n.x: major.t})
            return discharge(sigma, k, pi)
    raise ValueError(f"no detour contraction for {n.rule}")


def _fresh_eigen(e: Proof, avoid: set[str]) -> Proof:
    if e.rule in EIGEN and e.x.name in avoid:
        return rename_eigen(e, Var(fresh_name(e.x.name, avoid | _tree_names(e)), e.x.sort))
    return e


def _push_into(e: Proof, m_idx: int, branch: Proof, extra: Prop) -> Proof:
    """``e`` with its major premise replaced by ``branch`` under hypothesis ``extra``."""
    k = len(e.context)
    e = _fresh_eigen(e, _names(extra))
    prem = [
        branch if i == m_idx else weaken(q, k, (extra,))
        for i, q in enumerate(e.premises)
    ]
    return replace(e, concl=Sequent(e.context + (extra,), e.goal), premises=tuple(prem))


def contract_permutative(e: Proof) -> Proof:
    m_idx = MAJOR[e.rule]
    m = e.premises[m_idx]
    if m.rule == "exE":
        avoid = _tree_names(e) | {v.name for _, n in e.nodes() for v in ([n.x] if n.x else [])}
        m = rename_eigen(m, Var(fresh_name(m.x.name, avoid), m.x.sort))
        d, s = m.premises
        inner = _push_into(e, m_idx, s, m.a)
        return replace(m, concl=e.concl, premises=(d, inner))
    if m.rule == "orE":
        s1, s2, d = m.premises
        left = _push_into(e, m_idx, s1, m.a)
        right = _push_into(e, m_idx, s2, m.b)
        return replace(m, concl=e.concl, premises=(left, right, d))
    raise ValueError(f"no permutative conversion with major {m.rule}")


def reduce_step(theory, proof: Proof, budget: Budget = DEFAULT_BUDGET,
                checker: Optional[Checker] = None) -> Optional[Proof]:
    """Contract the leftmost-outermost redex; None when the proof is normal."""
    checker = checker or Checker(theory, budget)
    proof = resolve_hyps(checker, proof)
    rx = find_redex(checker, proof)
    if rx is None:
        return None
    node = at(proof, rx.path)
    new = contract_detour(node) if rx.kind == "detour" else contract_permutative(node)
    return replace_at(proof, rx.path, new)


# ---------------------------------------------------------------------------
# Normalization


class Status(enum.Enum):
    NORMAL_FORM = "NormalForm"
    FUEL_EXHAUSTED = "FuelExhausted"
    CYCLE_DETECTED = "CycleDetected"


DEFAULT_FUEL = 1000


@dataclass
class ReductionTrace:
    proofs: list[Proof]
    status: Status
    repeat_index: Optional[int] = None
    redexes: list[Redex] = field(default_factory=list)

    @property
    def result(self) -> Proof:
        return self.proofs[-1]

    @property
    def steps(self) -> int:
        return len(self.proofs) - 1


def normalize(theory, proof: Proof, budget: Budget = DEFAULT_BUDGET,
              fuel: int = DEFAULT_FUEL) -> ReductionTrace:
    """Iterate :func:`reduce_step` until normal, cyclic or out of fuel.

    A cycle is reported when a reduct is identical, up to eigenvariable
    names, to an earlier proof of the trace; the number of proofs
    remembered for this is bounded by ``budget.max_reducts``.
    """
    checker = Checker(theory, budget)
    current = resolve_hyps(checker, proof)
    proofs = [current]
    redexes: list[Redex] = []
    seen = {canonical(current): 0}
    while True:
        rx = find_redex(checker, current)
        if rx is None:
            return ReductionTrace(proofs, Status.NORMAL_FORM, None, redexes)
        if len(proofs) - 1 >= fuel:
            return ReductionTrace(proofs, Status.FUEL_EXHAUSTED, None, redexes)
        node = at(current, rx.path)
        new = contract_detour(node) if rx.kind == "detour" else contract_permutative(node)
        current = replace_at(current, rx.path, new)
        redexes.append(rx)
        proofs.append(current)
        key = canonical(current)
        if key in seen:
            return ReductionTrace(proofs, Status.CYCLE_DETECTED, seen[key], redexes)
        if len(seen) < budget.max_reducts:
            seen[key] = len(proofs) - 1
