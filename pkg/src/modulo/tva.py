"""Finite truth values algebras and finite Heyting algebras.

Elements are arbitrary hashable labels (ints or strings in practice).
Every check here is exhaustive over the finite carrier and the stored
quantifier domains, and every failure carries a witness that can be
replayed with :func:`condition_holds`.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from typing import Any, Hashable, Iterable, Iterator, Mapping, Optional

Elem = Hashable

CONDITIONS = {
    1: "if a => b and a are positive then b is positive",
    2: "a => b => a is positive",
    3: "(a => b => c) => (a => b) => a => c is positive",
    4: "top is positive",
    5: "bot => a is positive",
    6: "a => b => (a and b) is positive",
    7: "(a and b) => a is positive",
    8: "(a and b) => b is positive",
    9: "a => (a or b) is positive",
    10: "b => (a or b) is positive",
    11: "(a or b) => (a => c) => (b => c) => c is positive",
    12: "a => A and E => a belong to the forall domain",
    13: "forall A is positive when every element of A is",
    14: "forall (a => A) => a => forall A is positive",
    15: "(forall A) => a is positive for a in A",
    16: "a => (exists E) is positive for a in E",
    17: "(exists E) => forall (E => a) => a is positive",
}


def powerset(elements: Iterable[Elem]) -> list[frozenset]:
    items = list(elements)
    return [
        frozenset(c)
        for r in range(len(items) + 1)
        for c in itertools.combinations(items, r)
    ]


@dataclass(frozen=True)
class FiniteTva:
    elements: tuple
    positive: frozenset
    top: Elem
    bot: Elem
    imp: Mapping[tuple, Elem]
    conj: Mapping[tuple, Elem]
    disj: Mapping[tuple, Elem]
    forall: Mapping[frozenset, Elem]
    exists: Mapping[frozenset, Elem]
    order: Optional[frozenset] = None
    name: str = ""

    def __post_init__(self):
        carrier = set(self.elements)
        if len(carrier) != len(self.elements):
            raise ValueError("duplicate elements in carrier")
        if not self.positive <= carrier:
            raise ValueError("positive set is not a subset of the carrier")
        for c in (self.top, self.bot):
            if c not in carrier:
                raise ValueError(f"constant {c!r} is not in the carrier")
        for label, table in (("imp", self.imp), ("conj", self.conj), ("disj", self.disj)):
            for a in self.elements:
                for b in self.elements:
                    if table.get((a, b), _MISSING) not in carrier:
                        raise ValueError(f"{label} table is not total on ({a!r}, {b!r})")
        for label, table in (("forall", self.forall), ("exists", self.exists)):
            for s, v in table.items():
                if not s <= carrier or v not in carrier:
                    raise ValueError(f"{label} table has an entry outside the carrier")
        if self.order is not None:
            for a, b in self.order:
                if a not in carrier or b not in carrier:
                    raise ValueError("order mentions elements outside the carrier")
        object.__setattr__(self, "_pos", {e: i for i, e in enumerate(self.elements)})

    # --- helpers ---------------------------------------------------------

    @property
    def forall_domain(self) -> list[frozenset]:
        return sorted(self.forall, key=self.set_key)

    @property
    def exists_domain(self) -> list[frozenset]:
        return sorted(self.exists, key=self.set_key)

    def set_key(self, s: frozenset) -> tuple:
        idx = sorted(self._pos[e] for e in s)
        return (len(idx), idx)

    def sorted_set(self, s: Iterable[Elem]) -> list:
        return sorted(set(s), key=self._pos.__getitem__)

    def is_full(self) -> bool:
        n = len(self.elements)
        every = 2 ** n
        return len(self.forall) == every and len(self.exists) == every

    def leq(self, a: Elem, b: Elem) -> bool:
        if self.order is None:
            raise ValueError("algebra carries no order")
        return (a, b) in self.order

    def i(self, a: Elem, b: Elem) -> Elem:
        return self.imp[(a, b)]

    def imp_set(self, a: Elem, s: Iterable[Elem]) -> frozenset:
        return frozenset(self.imp[(a, e)] for e in s)

    def set_imp(self, s: Iterable[Elem], a: Elem) -> frozenset:
        return frozenset(self.imp[(e, a)] for e in s)


_MISSING = object()


# ---------------------------------------------------------------------------
# The seventeen closure conditions


def _instances(t: FiniteTva, k: int) -> Iterator[dict]:
    el = t.elements
    if k == 4:
        yield {}
    elif k == 5:
        for a in el:
            yield {"a": a}
    elif k in (1, 2, 6, 7, 8, 9, 10):
        for a in el:
            for b in el:
                yield {"a": a, "b": b}
    elif k in (3, 11):
        for a in el:
            for b in el:
                for c in el:
                    yield {"a": a, "b": b, "c": c}
    elif k == 12:
        for a in el:
            for s in t.forall_domain:
                yield {"a": a, "A": s}
        for a in el:
            for s in t.exists_domain:
                yield {"a": a, "E": s}
    elif k == 13:
        for s in t.forall_domain:
            yield {"A": s}
    elif k in (14, 15):
        for a in el:
            for s in t.forall_domain:
                yield {"a": a, "A": s}
    elif k in (16, 17):
        for a in el:
            for s in t.exists_domain:
                yield {"a": a, "E": s}
    else:
        raise ValueError(f"no condition {k}")


def condition_holds(t: FiniteTva, k: int, w: Mapping[str, Any]) -> Optional[bool]:
    """Evaluate condition ``k`` at one instance.

    Returns None when the instance is vacuous because a set it needs lies
    outside the forall domain; condition 12 is the one that reports that.
    """
    P = t.positive
    i = t.i
    a, b, c = w.get("a"), w.get("b"), w.get("c")
    if k == 1:
        return not (i(a, b) in P and a in P) or b in P
    if k == 2:
        return i(a, i(b, a)) in P
    if k == 3:
        return i(i(a, i(b, c)), i(i(a, b), i(a, c))) in P
    if k == 4:
        return t.top in P
    if k == 5:
        return i(t.bot, a) in P
    if k == 6:
        return i(a, i(b, t.conj[(a, b)])) in P
    if k == 7:
        return i(t.conj[(a, b)], a) in P
    if k == 8:
        return i(t.conj[(a, b)], b) in P
    if k == 9:
        return i(a, t.disj[(a, b)]) in P
    if k == 10:
        return i(b, t.disj[(a, b)]) in P
    if k == 11:
        return i(t.disj[(a, b)], i(i(a, c), i(i(b, c), c))) in P
    if k == 12:
        if "A" in w:
            return t.imp_set(a, w["A"]) in t.forall
        return t.set_imp(w["E"], a) in t.forall
    if k == 13:
        return not w["A"] <= P or t.forall[w["A"]] in P
    if k == 14:
        shifted = t.imp_set(a, w["A"])
        if shifted not in t.forall:
            return None
        return i(t.forall[shifted], i(a, t.forall[w["A"]])) in P
    if k == 15:
        return a not in w["A"] or i(t.forall[w["A"]], a) in P
    if k == 16:
        return a not in w["E"] or i(a, t.exists[w["E"]]) in P
    if k == 17:
        shifted = t.set_imp(w["E"], a)
        if shifted not in t.forall:
            return None
        return i(t.exists[w["E"]], i(t.forall[shifted], a)) in P
    raise ValueError(f"no condition {k}")


@dataclass
class ConditionResult:
    index: int
    passed: bool
    witness: Optional[dict] = None
    instances: int = 0
    vacuous: int = 0

    def to_json(self, t: FiniteTva) -> dict:
        out: dict[str, Any] = {
            "condition": self.index,
            "passed": self.passed,
            "instances": self.instances,
        }
        if self.vacuous:
            out["vacuous"] = self.vacuous
        if self.witness is not None:
            out["witness"] = _witness_json(t, self.witness)
        return out


def _witness_json(t: FiniteTva, w: Mapping[str, Any]) -> dict:
    out = {}
    for k in sorted(w):
        v = w[k]
        out[k] = t.sorted_set(v) if isinstance(v, frozenset) else v
    return out


def check_condition(t: FiniteTva, k: int) -> ConditionResult:
    res = ConditionResult(k, True)
    for w in _instances(t, k):
        res.instances += 1
        ok = condition_holds(t, k, w)
        if ok is None:
            res.vacuous += 1
        elif not ok:
            res.passed = False
            res.witness = w
            break
    return res


# ---------------------------------------------------------------------------
# Order and completeness


@dataclass
class Verdict:
    name: str
    passed: bool
    witness: Optional[dict] = None

    def to_json(self, t: FiniteTva) -> dict:
        out: dict[str, Any] = {"check": self.name, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = _witness_json(t, self.witness)
        return out


def _first(name: str, pairs: Iterable[tuple[bool, dict]]) -> Verdict:
    for ok, w in pairs:
        if not ok:
            return Verdict(name, False, w)
    return Verdict(name, True)


def set_leq(t: FiniteTva, s1: frozenset, s2: frozenset) -> bool:
    """Egli-Milner lifting of the order to sets of truth values.

    Equivalent to: the two sets are ranges of functions f, g on a common
    domain with f pointwise below g.
    """
    return all(any(t.leq(x, y) for y in s2) for x in s1) and all(
        any(t.leq(x, y) for x in s1) for y in s2
    )


def validate_order(t: FiniteTva) -> list[Verdict]:
    if t.order is None:
        raise ValueError("algebra carries no order")
    el = t.elements
    le = t.leq
    pairs = [(a, b) for a in el for b in el if le(a, b)]
    out = [
        _first("reflexive", ((le(a, a), {"a": a}) for a in el)),
        _first(
            "antisymmetric",
            ((not (le(a, b) and le(b, a)) or a == b, {"a": a, "b": b}) for a in el for b in el),
        ),
        _first(
            "transitive",
            ((le(a, c), {"a": a, "b": b, "c": c}) for a, b in pairs for b2, c in pairs if b == b2),
        ),
        _first(
            "positive-upward-closed",
            ((b in t.positive, {"a": a, "b": b}) for a, b in pairs if a in t.positive),
        ),
        _first(
            "top-maximal",
            ((b == t.top, {"b": b}) for a, b in pairs if a == t.top),
        ),
        _first(
            "bot-minimal",
            ((a == t.bot, {"a": a}) for a, b in pairs if b == t.bot),
        ),
    ]
    for name, table in (("conj-monotone", t.conj), ("disj-monotone", t.disj)):
        out.append(
            _first(
                name,
                (
                    (le(table[(a, b)], table[(a2, b2)]), {"a": a, "a2": a2, "b": b, "b2": b2})
                    for a, a2 in pairs
                    for b, b2 in pairs
                ),
            )
        )
    out.append(
        _first(
            "imp-left-antitone",
            ((le(t.i(a2, b), t.i(a, b)), {"a": a, "a2": a2, "b": b}) for a, a2 in pairs for b in el),
        )
    )
    out.append(
        _first(
            "imp-right-monotone",
            ((le(t.i(a, b), t.i(a, b2)), {"a": a, "b": b, "b2": b2}) for a in el for b, b2 in pairs),
        )
    )
    for name, table, dom in (
        ("forall-monotone", t.forall, t.forall_domain),
        ("exists-monotone", t.exists, t.exists_domain),
    ):
        out.append(
            _first(
                name,
                (
                    (le(table[s1], table[s2]), {"A": s1, "A2": s2})
                    for s1 in dom
                    for s2 in dom
                    if set_leq(t, s1, s2)
                ),
            )
        )
    return out


def glb(t: FiniteTva, s: Iterable[Elem]) -> Optional[Elem]:
    s = list(s)
    lower = [x for x in t.elements if all(t.leq(x, y) for y in s)]
    for g in lower:
        if all(t.leq(x, g) for x in lower):
            return g
    return None


def validate_complete(t: FiniteTva) -> Verdict:
    if t.order is None:
        raise ValueError("algebra carries no order")
    for s in powerset(t.elements):
        if glb(t, s) is None:
            return Verdict("complete", False, {"S": s})
    return Verdict("complete", True)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class TvaReport:
    name: str
    conditions: list[ConditionResult]
    full: bool
    order: Optional[list[Verdict]] = None
    complete: Optional[Verdict] = None

    @property
    def failed(self) -> list[int]:
        return [c.index for c in self.conditions if not c.passed]

    @property
    def is_tva(self) -> bool:
        return not self.failed

    @property
    def ordered(self) -> Optional[bool]:
        return None if self.order is None else all(v.passed for v in self.order)

    @property
    def ok(self) -> bool:
        return self.is_tva and self.ordered is not False and (
            self.complete is None or self.complete.passed
        )

    def to_json(self, t: FiniteTva) -> dict:
        out: dict[str, Any] = {
            "algebra": self.name,
            "truth_values_algebra": self.is_tva,
            "conditions": [c.to_json(t) for c in self.conditions],
            "full": self.full,
        }
        if self.order is not None:
            out["ordered"] = self.ordered
            out["order"] = [v.to_json(t) for v in self.order]
        if self.complete is not None:
            out["complete"] = self.complete.to_json(t)
        return out


def validate_tva(t: FiniteTva) -> TvaReport:
    conds = [check_condition(t, k) for k in range(1, 18)]
    report = TvaReport(t.name, conds, t.is_full())
    if t.order is not None:
        report.order = validate_order(t)
        report.complete = validate_complete(t)
    return report


# ---------------------------------------------------------------------------
# Heyting algebras


def _closure(elements: tuple, pairs: Iterable[tuple]) -> frozenset:
    le = {(a, a) for a in elements} | set(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(le):
            for b2, c in list(le):
                if b == b2 and (a, c) not in le:
                    le.add((a, c))
                    changed = True
    return frozenset(le)


@dataclass(frozen=True)
class FiniteHeyting:
    """A finite lattice whose order admits an arrow; rejects anything else."""

    elements: tuple
    leq: frozenset
    name: str = ""
    top: Elem = field(init=False)
    bot: Elem = field(init=False)
    meet: Mapping[tuple, Elem] = field(init=False)
    join: Mapping[tuple, Elem] = field(init=False)
    arrow: Mapping[tuple, Elem] = field(init=False)

    def __post_init__(self):
        el = self.elements
        le = lambda a, b: (a, b) in self.leq
        for a in el:
            for b in el:
                if a != b and le(a, b) and le(b, a):
                    raise ValueError(f"order is not antisymmetric at {a!r}, {b!r}")
        for a in el:
            for b in el:
                for c in el:
                    if le(a, b) and le(b, c) and not le(a, c):
                        raise ValueError("order is not transitive")

        def greatest(cands):
            for g in cands:
                if all(le(x, g) for x in cands):
                    return g
            return None

        def least(cands):
            for g in cands:
                if all(le(g, x) for x in cands):
                    return g
            return None

        top = greatest(list(el))
        bot = least(list(el))
        if top is None or bot is None:
            raise ValueError("lattice needs a top and a bottom")
        meet, join, arrow = {}, {}, {}
        for a in el:
            for b in el:
                m = greatest([x for x in el if le(x, a) and le(x, b)])
                j = least([x for x in el if le(a, x) and le(b, x)])
                if m is None or j is None:
                    raise ValueError(f"no meet or join for {a!r}, {b!r}")
                meet[(a, b)], join[(a, b)] = m, j
        for a in el:
            for b in el:
                r = greatest([c for c in el if le(meet[(c, a)], b)])
                if r is None:
                    raise ValueError(f"no relative pseudo-complement for {a!r} => {b!r}")
                arrow[(a, b)] = r
        for a in el:
            for b in el:
                for c in el:
                    if le(c, arrow[(a, b)]) != le(meet[(c, a)], b):
                        raise ValueError("residuation law fails")
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bot", bot)
        object.__setattr__(self, "meet", meet)
        object.__setattr__(self, "join", join)
        object.__setattr__(self, "arrow", arrow)

    @classmethod
    def from_pairs(cls, elements: Iterable[Elem], pairs: Iterable[tuple], name: str = "") -> "FiniteHeyting":
        elements = tuple(elements)
        return cls(elements, _closure(elements, pairs), name)

    def le(self, a: Elem, b: Elem) -> bool:
        return (a, b) in self.leq

    def glb(self, s: Iterable[Elem]) -> Elem:
        out = self.top
        for x in s:
            out = self.meet[(out, x)]
        return out

    def lub(self, s: Iterable[Elem]) -> Elem:
        out = self.bot
        for x in s:
            out = self.join[(out, x)]
        return out


def heyting_to_tva(h: FiniteHeyting) -> FiniteTva:
    subsets = powerset(h.elements)
    return FiniteTva(
        elements=h.elements,
        positive=frozenset([h.top]),
        top=h.top,
        bot=h.bot,
        imp=dict(h.arrow),
        conj=dict(h.meet),
        disj=dict(h.join),
        forall={s: h.glb(s) for s in subsets},
        exists={s: h.lub(s) for s in subsets},
        order=h.leq,
        name=h.name,
    )


def chain(n: int) -> FiniteHeyting:
    el = tuple(range(n))
    return FiniteHeyting.from_pairs(el, [(i, i + 1) for i in range(n - 1)], f"chain{n}")


def product(h1: FiniteHeyting, h2: FiniteHeyting) -> FiniteHeyting:
    el = tuple(f"{a}{b}" for a in h1.elements for b in h2.elements)
    back = {f"{a}{b}": (a, b) for a in h1.elements for b in h2.elements}
    if len(back) != len(el):
        raise ValueError("product labels collide")
    pairs = [
        (x, y)
        for x in el
        for y in el
        if h1.le(back[x][0], back[y][0]) and h2.le(back[x][1], back[y][1])
    ]
    return FiniteHeyting(el, frozenset(pairs), f"{h1.name}x{h2.name}")


def add_top(h: FiniteHeyting, label: Elem = "T") -> FiniteHeyting:
    if label in h.elements:
        raise ValueError(f"label {label!r} already used")
    pairs = set(h.leq) | {(x, label) for x in h.elements} | {(label, label)}
    return FiniteHeyting((*h.elements, label), frozenset(pairs), f"{h.name}+top")


def add_bottom(h: FiniteHeyting, label: Elem = "B") -> FiniteHeyting:
    if label in h.elements:
        raise ValueError(f"label {label!r} already used")
    pairs = set(h.leq) | {(label, x) for x in h.elements} | {(label, label)}
    return FiniteHeyting((label, *h.elements), frozenset(pairs), f"bot+{h.name}")


def bool2() -> FiniteTva:
    t = heyting_to_tva(chain(2))
    return replace(t, name="bool2")


def small_heyting_algebras() -> list[FiniteHeyting]:
    """Chains of size 2 to 6 and four non-chain distributive lattices."""
    square = product(chain(2), chain(2))
    return [
        *(chain(n) for n in range(2, 7)),
        square,
        add_top(square),
        add_bottom(square),
        product(chain(2), chain(3)),
    ]


# ---------------------------------------------------------------------------
# Mutations


def single_entry_mutations(t: FiniteTva) -> Iterator[tuple[str, FiniteTva]]:
    """Every algebra differing from ``t`` in exactly one table entry."""
    el = t.elements
    for e in el:
        flipped = t.positive ^ {e}
        yield f"positive toggles {e!r}", replace(t, positive=flipped)
    for field_name in ("top", "bot"):
        for e in el:
            if e != getattr(t, field_name):
                yield f"{field_name} := {e!r}", replace(t, **{field_name: e})
    for field_name in ("imp", "conj", "disj"):
        table = getattr(t, field_name)
        for a in el:
            for b in el:
                for e in el:
                    if e != table[(a, b)]:
                        new = dict(table)
                        new[(a, b)] = e
                        yield f"{field_name}({a!r},{b!r}) := {e!r}", replace(t, **{field_name: new})
    for field_name in ("forall", "exists"):
        table = getattr(t, field_name)
        dom = sorted(table, key=t.set_key)
        for s in dom:
            for e in el:
                if e != table[s]:
                    new = dict(table)
                    new[s] = e
                    yield f"{field_name}({t.sorted_set(s)}) := {e!r}", replace(t, **{field_name: new})
        for s in dom:
            new = {k: v for k, v in table.items() if k != s}
            yield f"{field_name} domain drops {t.sorted_set(s)}", replace(t, **{field_name: new})


# ---------------------------------------------------------------------------
# JSON files


def _table(t_el: tuple, rows: list, label: str) -> dict:
    if len(rows) != len(t_el) or any(len(r) != len(t_el) for r in rows):
        raise ValueError(f"{label} must be a {len(t_el)}x{len(t_el)} matrix")
    return {(a, b): rows[i][j] for i, a in enumerate(t_el) for j, b in enumerate(t_el)}


def _quant(spec, elements: tuple, order, kind: str) -> dict:
    if isinstance(spec, str):
        if order is None:
            raise ValueError(f"{kind}: {spec!r} needs an order")
        h = FiniteHeyting(elements, order)
        fn = {"glb": h.glb, "lub": h.lub}.get(spec)
        if fn is None:
            raise ValueError(f"{kind}: unknown shorthand {spec!r}")
        return {s: fn(s) for s in powerset(elements)}
    return {frozenset(entry["set"]): entry["value"] for entry in spec}


def tva_from_json(data: Mapping[str, Any]) -> FiniteTva:
    el = tuple(data["elements"])
    order = None
    if "order" in data:
        order = _closure(el, [tuple(p) for p in data["order"]]) if data.get("order_closure", True) else frozenset(
            tuple(p) for p in data["order"]
        )
    return FiniteTva(
        elements=el,
        positive=frozenset(data["positive"]),
        top=data["top"],
        bot=data["bot"],
        imp=_table(el, data["imp"], "imp"),
        conj=_table(el, data["and"], "and"),
        disj=_table(el, data["or"], "or"),
        forall=_quant(data["forall"], el, order, "forall"),
        exists=_quant(data["exists"], el, order, "exists"),
        order=order,
        name=data.get("name", ""),
    )


def tva_to_json(t: FiniteTva) -> dict:
    el = t.elements

    def matrix(table):
        return [[table[(a, b)] for b in el] for a in el]

    def quant(table):
        return [{"set": t.sorted_set(s), "value": table[s]} for s in sorted(table, key=t.set_key)]

    out: dict[str, Any] = {
        "name": t.name,
        "elements": list(el),
        "positive": t.sorted_set(t.positive),
        "top": t.top,
        "bot": t.bot,
        "imp": matrix(t.imp),
        "and": matrix(t.conj),
        "or": matrix(t.disj),
        "forall": quant(t.forall),
        "exists": quant(t.exists),
    }
    if t.order is not None:
        pos = {e: i for i, e in enumerate(el)}
        out["order"] = [list(p) for p in sorted(t.order, key=lambda p: (pos[p[0]], pos[p[1]]))]
    return out


def heyting_from_json(data: Mapping[str, Any]) -> FiniteHeyting:
    return FiniteHeyting.from_pairs(
        data["elements"], [tuple(p) for p in data["order"]], data.get("name", "")
    )


def load_tva(path) -> FiniteTva:
    with open(path) as fh:
        return tva_from_json(json.load(fh))


def load_heyting(path) -> FiniteHeyting:
    with open(path) as fh:
        return heyting_from_json(json.load(fh))
