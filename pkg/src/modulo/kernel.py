"""Natural deduction modulo: proof trees, the checker and the classifiers.

Every node stores its full conclusion sequent plus the instance data of
its rule: the propositions ``a`` and ``b`` (A and B of the side
conditions), the variable ``x`` of a quantifier rule and the witness term
``t``. For the quantifier rules ``a`` is the *open* body, in which ``x``
occurs free; the quantified proposition is ``forall(x, a)``.

Rule shapes (Γ is the conclusion context, ``concl.goal`` the conclusion):

========  =========================================  =========================
rule      premises                                   side conditions
========  =========================================  =========================
axiom     none                                       goal ≡ Γ[hyp] (or an axiom)
impI      Γ, a ⊢ b                                   goal ≡ a ⇒ b
impE      Γ ⊢ C ;  Γ ⊢ a                             C ≡ a ⇒ b, goal = b
andI      Γ ⊢ a ;  Γ ⊢ b                             goal ≡ a ∧ b
andE1/2   Γ ⊢ C                                      C ≡ a ∧ b, goal = a / b
orI1/2    Γ ⊢ a  /  Γ ⊢ b                            goal ≡ a ∨ b
orE       Γ, a ⊢ goal ;  Γ, b ⊢ goal ;  Γ ⊢ D        D ≡ a ∨ b
topI      none                                       goal ≡ ⊤
botE      Γ ⊢ B                                      B ≡ ⊥
allI      Γ ⊢ a                                      goal ≡ ∀x a, x ∉ FV(Γ)
allE      Γ ⊢ B                                      B ≡ ∀x a, goal ≡ (t/x)a
exI       Γ ⊢ C                                      C ≡ (t/x)a, goal ≡ ∃x a
exE       Γ ⊢ C ;  Γ, a ⊢ goal                       C ≡ ∃x a, x ∉ FV(Γ, goal)
========  =========================================  =========================
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from .lang import (
    BOT, TOP, And, Imp, Or, Prop, Sequent, SortError, Term, Var,
    check_prop, check_sequent, exists, forall, free_vars, subst1, well_sorted,
)
from .rewriting import DEFAULT_BUDGET, Budget, Verdict, congruent

PREMISES = {
    "axiom": 0, "impI": 1, "impE": 2, "andI": 2, "andE1": 1, "andE2": 1,
    "orI1": 1, "orI2": 1, "orE": 3, "topI": 0, "botE": 1,
    "allI": 1, "allE": 1, "exI": 1, "exE": 2,
}
INTRO = frozenset({"impI", "andI", "orI1", "orI2", "topI", "allI", "exI"})
ELIM = frozenset({"impE", "andE1", "andE2", "orE", "botE", "allE", "exE"})
NEUTRAL = frozenset({"axiom"}) | ELIM
MAJOR = {"impE": 0, "andE1": 0, "andE2": 0, "allE": 0, "botE": 0, "orE": 2, "exE": 0}
# rules whose instance data must include these fields
NEEDS = {
    "impI": "ab", "impE": "ab", "andI": "ab", "andE1": "ab", "andE2": "ab",
    "orI1": "ab", "orI2": "ab", "orE": "ab",
    "allI": "xa", "allE": "xat", "exI": "xat", "exE": "xa",
}
EIGEN = frozenset({"allI", "exE"})


class ProofError(ValueError):
    pass


@dataclass(frozen=True)
class Proof:
    rule: str
    concl: Sequent
    premises: tuple["Proof", ...] = ()
    a: Optional[Prop] = None
    b: Optional[Prop] = None
    x: Optional[Var] = None
    t: Optional[Term] = None
    hyp: Optional[int] = None
    axiom: Optional[int] = None

    def __post_init__(self):
        if self.rule not in PREMISES:
            raise ProofError(f"unknown rule {self.rule}")
        if len(self.premises) != PREMISES[self.rule]:
            raise ProofError(
                f"{self.rule} takes {PREMISES[self.rule]} premises, got {len(self.premises)}"
            )
        for f in NEEDS.get(self.rule, ""):
            if getattr(self, f) is None:
                raise ProofError(f"{self.rule} needs instance data {f!r}")

    @property
    def context(self) -> tuple[Prop, ...]:
        return self.concl.context

    @property
    def goal(self) -> Prop:
        return self.concl.goal

    def quantified(self) -> Prop:
        """``forall x a`` or ``exists x a`` for the quantifier rules."""
        if self.rule in ("allI", "allE"):
            return forall(self.x, self.a)
        return exists(self.x, self.a)

    def instance(self) -> Prop:
        """The connective proposition named by the side condition."""
        match self.rule:
            case "impI" | "impE":
                return Imp(self.a, self.b)
            case "andI" | "andE1" | "andE2":
                return And(self.a, self.b)
            case "orI1" | "orI2" | "orE":
                return Or(self.a, self.b)
            case "allI" | "allE" | "exI" | "exE":
                return self.quantified()
            case "topI":
                return TOP
            case "botE":
                return BOT
        raise ProofError(f"{self.rule} has no connective instance")

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def depth(self) -> int:
        return 1 + max((p.depth() for p in self.premises), default=0)

    def nodes(self, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], "Proof"]]:
        """Preorder traversal with node paths."""
        yield path, self
        for i, p in enumerate(self.premises):
            yield from p.nodes(path + (i,))


def at(proof: Proof, path: tuple[int, ...]) -> Proof:
    for i in path:
        proof = proof.premises[i]
    return proof


def replace_at(proof: Proof, path: tuple[int, ...], new: Proof) -> Proof:
    if not path:
        return new
    i, rest = path[0], path[1:]
    prem = list(proof.premises)
    prem[i] = replace_at(prem[i], rest, new)
    return replace(proof, premises=tuple(prem))


def proof_free_vars(proof: Proof) -> frozenset[Var]:
    """Every variable with a free occurrence anywhere in the tree."""
    out: set[Var] = set()
    for _, n in proof.nodes():
        out |= free_vars(n.concl, n.a, n.b, n.t)
        if n.x is not None:
            out.add(n.x)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Classifiers


def is_neutral(proof: Proof) -> bool:
    return proof.rule in NEUTRAL


def is_cut_free(proof: Proof) -> bool:
    if proof.rule == "axiom":
        return True
    if proof.rule in INTRO:
        return all(is_cut_free(p) for p in proof.premises)
    major = MAJOR[proof.rule]
    return all(
        is_cut_free(p) and (i != major or is_neutral(p))
        for i, p in enumerate(proof.premises)
    )


def classify(proof: Proof) -> dict:
    return {"rule": proof.rule, "neutral": is_neutral(proof), "cut_free": is_cut_free(proof)}


# ---------------------------------------------------------------------------
# Checking


@dataclass(frozen=True)
class Failure:
    path: tuple[int, ...]
    rule: str
    condition: str
    kind: str  # structure | sort | mismatch | freshness | no | undecided

    def to_json(self) -> dict:
        return {"path": list(self.path), "rule": self.rule,
                "condition": self.condition, "kind": self.kind}


@dataclass
class CheckReport:
    accepted: bool
    failures: list[Failure] = field(default_factory=list)
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.accepted

    def to_json(self) -> dict:
        return {
            "verdict": "accepted" if self.accepted else "rejected",
            "nodes": self.nodes,
            "failures": [f.to_json() for f in self.failures],
        }


class Checker:
    """Checks proofs against one theory; remembers congruence answers."""

    def __init__(self, theory, budget: Budget = DEFAULT_BUDGET):
        self.theory = theory
        self.budget = budget
        self._memo: dict[tuple, Verdict] = {}

    def cong(self, a: Prop, b: Prop) -> Verdict:
        if a == b:
            return Verdict.YES
        key = (a, b)
        v = self._memo.get(key)
        if v is None:
            v = congruent(self.theory.system, a, b, self.budget)
            self._memo[key] = v
            self._memo[(b, a)] = v
        return v

    def find_hyp(self, context: tuple[Prop, ...], goal: Prop) -> Optional[int]:
        """Innermost hypothesis congruent to ``goal``."""
        for i in range(len(context) - 1, -1, -1):
            if context[i] == goal:
                return i
        for i in range(len(context) - 1, -1, -1):
            if self.cong(context[i], goal) is Verdict.YES:
                return i
        return None

    def check(self, proof: Proof) -> CheckReport:
        failures: list[Failure] = []
        count = 0
        for path, node in proof.nodes():
            count += 1
            failures.extend(self._node(path, node))
        failures.sort(key=lambda f: (f.path, f.condition))
        return CheckReport(not failures, failures, count)

    # -- per node --------------------------------------------------------

    def _node(self, path, n: Proof) -> list[Failure]:
        out: list[Failure] = []
        sig = self.theory.signature

        def fail(cond, kind):
            out.append(Failure(path, n.rule, cond, kind))

        def need(cond, a, b):
            v = self.cong(a, b)
            if v is Verdict.NO:
                fail(cond, "no")
            elif v is Verdict.UNDECIDED:
                fail(cond, "undecided")

        try:
            check_sequent(sig, n.concl)
            for p in (n.a, n.b):
                if p is not None:
                    check_prop(sig, p)
            if n.x is not None and n.t is not None and well_sorted(sig, n.t) != n.x.sort:
                fail("witness sort equals the bound variable's sort", "sort")
        except SortError as e:
            fail(f"well sorted: {e}", "sort")
            return out

        gamma, goal, ps = n.context, n.goal, n.premises

        def prem(i, ctx, g=None, what="premise"):
            p = ps[i]
            if p.context != ctx:
                fail(f"{what} {i} context", "structure")
            if g is not None and p.goal != g:
                fail(f"{what} {i} conclusion", "mismatch")

        match n.rule:
            case "axiom":
                if n.axiom is not None:
                    axioms = self.theory.axioms
                    if not 0 <= n.axiom < len(axioms):
                        fail("axiom index in range", "structure")
                    else:
                        need("goal ≡ theory axiom", goal, axioms[n.axiom])
                elif n.hyp is not None:
                    if not 0 <= n.hyp < len(gamma):
                        fail("hypothesis index in range", "structure")
                    else:
                        need("goal ≡ hypothesis", goal, gamma[n.hyp])
                else:
                    found = self.find_hyp(gamma, goal)
                    if found is None:
                        undecided = any(self.cong(h, goal) is Verdict.UNDECIDED for h in gamma)
                        for i, ax in enumerate(self.theory.axioms):
                            if self.cong(ax, goal) is Verdict.YES:
                                break
                            undecided |= self.cong(ax, goal) is Verdict.UNDECIDED
                        else:
                            fail("goal ≡ some hypothesis", "undecided" if undecided else "no")
            case "impI":
                prem(0, gamma + (n.a,), n.b)
                need("goal ≡ A ⇒ B", goal, Imp(n.a, n.b))
            case "impE":
                prem(0, gamma)
                prem(1, gamma, n.a)
                need("C ≡ A ⇒ B", ps[0].goal, Imp(n.a, n.b))
                if goal != n.b:
                    fail("goal = B", "mismatch")
            case "andI":
                prem(0, gamma, n.a)
                prem(1, gamma, n.b)
                need("goal ≡ A ∧ B", goal, And(n.a, n.b))
            case "andE1" | "andE2":
                prem(0, gamma)
                need("C ≡ A ∧ B", ps[0].goal, And(n.a, n.b))
                want = n.a if n.rule == "andE1" else n.b
                if goal != want:
                    fail("goal = A" if n.rule == "andE1" else "goal = B", "mismatch")
            case "orI1" | "orI2":
                prem(0, gamma, n.a if n.rule == "orI1" else n.b)
                need("goal ≡ A ∨ B", goal, Or(n.a, n.b))
            case "orE":
                prem(0, gamma + (n.a,), goal)
                prem(1, gamma + (n.b,), goal)
                prem(2, gamma)
                need("D ≡ A ∨ B", ps[2].goal, Or(n.a, n.b))
            case "topI":
                need("goal ≡ ⊤", goal, TOP)
            case "botE":
                prem(0, gamma)
                need("B ≡ ⊥", ps[0].goal, BOT)
            case "allI":
                prem(0, gamma, n.a)
                need("goal ≡ ∀x A", goal, forall(n.x, n.a))
                if n.x in free_vars(gamma):
                    fail("x ∉ FV(Γ)", "freshness")
                elif n.x in free_vars(self.theory.axioms):
                    fail("x ∉ FV(axioms)", "freshness")
            case "allE":
                prem(0, gamma)
                need("B ≡ ∀x A", ps[0].goal, forall(n.x, n.a))
                need("goal ≡ (t/x)A", goal, subst1(n.a, n.x, n.t))
            case "exI":
                prem(0, gamma)
                need("C ≡ (t/x)A", ps[0].goal, subst1(n.a, n.x, n.t))
                need("goal ≡ ∃x A", goal, exists(n.x, n.a))
            case "exE":
                prem(0, gamma)
                prem(1, gamma + (n.a,), goal)
                need("C ≡ ∃x A", ps[0].goal, exists(n.x, n.a))
                if n.x in free_vars(gamma, goal):
                    fail("x ∉ FV(Γ, B)", "freshness")
                elif n.x in free_vars(self.theory.axioms):
                    fail("x ∉ FV(axioms)", "freshness")
        return out


def check(theory, proof: Proof, budget: Budget = DEFAULT_BUDGET) -> CheckReport:
    return Checker(theory, budget).check(proof)
