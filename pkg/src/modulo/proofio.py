"""Proof files.

A proof is a tree of rule nodes::

    (impE :concl (|- () Q) :A P :B Q
      (impI :concl (|- () (=> P Q)) :A P :B Q ...)
      (impI :concl (|- () P) :A P :B Q ...))

Keywords: ``:concl`` (required), ``:A``, ``:B``, ``:x (name sort)``,
``:t term``, ``:hyp index``, ``:axiom index``. Premises follow in rule
order. The optional wrapper ``(proof :vars ((x T) ...) TREE)`` declares
free variables beyond those of the theory.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

from . import sexpr
from .kernel import PREMISES, Proof, ProofError, proof_free_vars
from .lang import Sort, Var
from .sexpr import ParseError, split_keywords
from .syntax import Printer, Scope, parse_prop, parse_sequent, parse_sort, parse_term

_KEYS = {"concl", "A", "B", "x", "t", "hyp", "axiom"}


def _int(sx, what: str) -> int:
    if not isinstance(sx, str) or not sx.lstrip("-").isdigit():
        raise ParseError(f"{what} must be an integer")
    return int(sx)


def _tree(sx, theory, env: dict[str, Sort]) -> Proof:
    if not (isinstance(sx, list) and sx and isinstance(sx[0], str)):
        raise ParseError(f"bad proof node {sexpr.dumps(sx)[:60]}")
    rule = sx[0]
    if rule not in PREMISES:
        raise ParseError(f"unknown rule {rule}")
    kw, premises = split_keywords(sx[1:])
    unknown = set(kw) - _KEYS
    if unknown:
        raise ParseError(f"unknown keys for {rule}: {', '.join(sorted(unknown))}")
    if "concl" not in kw:
        raise ParseError(f"{rule} node without :concl")
    sig = theory.signature
    scope = Scope(sig, env)
    x = None
    inner_env = env
    if "x" in kw:
        xs = kw["x"]
        if not (isinstance(xs, list) and len(xs) == 2 and isinstance(xs[0], str)):
            raise ParseError(":x expects (name sort)")
        x = Var(xs[0], parse_sort(xs[1], scope))
        inner_env = {**env, x.name: x.sort}
    inner = Scope(sig, inner_env)
    a = parse_prop(kw["A"], inner) if "A" in kw else None
    b = parse_prop(kw["B"], scope) if "B" in kw else None
    t = parse_term(kw["t"], scope) if "t" in kw else None
    concl = parse_sequent(kw["concl"], scope)
    sub_env = inner_env if rule in ("allI", "exE") else env
    prems = tuple(_tree(p, theory, sub_env) for p in premises)
    try:
        return Proof(
            rule, concl, prems, a=a, b=b, x=x, t=t,
            hyp=_int(kw["hyp"], ":hyp") if "hyp" in kw else None,
            axiom=_int(kw["axiom"], ":axiom") if "axiom" in kw else None,
        )
    except ProofError as e:
        raise ParseError(str(e)) from e


def proof_from_sexpr(sx, theory) -> Proof:
    env = dict(theory.env)
    if isinstance(sx, list) and sx and sx[0] == "proof":
        kw, rest = split_keywords(sx[1:])
        if len(rest) != 1:
            raise ParseError("(proof ...) wraps exactly one tree")
        for item in kw.get("vars", []):
            if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], str)):
                raise ParseError(f"bad variable declaration {sexpr.dumps(item)}")
            env[item[0]] = parse_sort(item[1], Scope(theory.signature))
        sx = rest[0]
    return _tree(sx, theory, env)


def parse_proof(text: str, theory) -> Proof:
    return proof_from_sexpr(sexpr.read(text), theory)


def load_proof(path, theory) -> Proof:
    return parse_proof(Path(path).read_text(), theory)


# ---------------------------------------------------------------------------
# Printing


def _declared(proof: Proof, base: Mapping[str, Sort]) -> dict[str, Sort]:
    """Free variables that can be declared once by name."""
    by_name: dict[str, set[Sort]] = {}
    for v in proof_free_vars(proof):
        by_name.setdefault(v.name, set()).add(v.sort)
    out = {}
    for name, sorts in sorted(by_name.items()):
        if len(sorts) == 1 and name not in base:
            out[name] = next(iter(sorts))
    return out


def proof_to_sexpr(proof: Proof, theory) -> list:
    extra = _declared(proof, theory.env)
    pr = Printer(theory.signature, {**theory.env, **extra})

    def node(n: Proof) -> list:
        out: list = [n.rule, ":concl", pr.sequent(n.concl)]
        if n.x is not None:
            out += [":x", [n.x.name, pr.sort(n.x.sort)]]
        if n.a is not None:
            out += [":A", pr.prop(n.a)]
        if n.b is not None:
            out += [":B", pr.prop(n.b)]
        if n.t is not None:
            out += [":t", pr.term(n.t)]
        if n.hyp is not None:
            out += [":hyp", str(n.hyp)]
        if n.axiom is not None:
            out += [":axiom", str(n.axiom)]
        return out + [node(p) for p in n.premises]

    tree = node(proof)
    if not extra:
        return tree
    return ["proof", ":vars", [[k, pr.sort(s)] for k, s in extra.items()], tree]


def proof_to_text(proof: Proof, theory, width: int = 100) -> str:
    return sexpr.pretty(proof_to_sexpr(proof, theory), width)


def proof_to_line(proof: Proof, theory) -> str:
    return sexpr.dumps(proof_to_sexpr(proof, theory))
