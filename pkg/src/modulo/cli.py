"""Command-line front end.

Exit status: 0 for accepted / valid / yes outcomes, 1 for rejections and
failures, 2 for usage or input errors. ``--json`` prints a machine
report with sorted keys; file arguments that do not exist are looked up
in the bundled corpus.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .generators import random_proofs
from .kernel import Checker, check, classify, is_cut_free
from .lang import Prop, SortError, check_prop, free_vars, well_sorted
from .models import check_model, denote_prop, to_jsonable
from .proofio import load_proof, parse_proof, proof_to_text
from .reduction import DEFAULT_FUEL, Status, has_detour, normalize
from .rewriting import Budget, FuelExhausted, RuleError, congruent, normalize_counting
from .sexpr import ParseError
from .structures import BUNDLED_ALGEBRAS, data_path, load_json, load_structure, resolve_tva
from .syntax import parse_expr, parse_prop, show
from .theories import builtin, builtin_names, resolve_theory, theory_to_text
from .tva import heyting_from_json, heyting_to_tva, tva_to_json, validate_tva


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    fuel: Optional[int]
    json: bool
    seed: int = 0
    extra: dict = field(default_factory=dict)


def _corpus(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = data_path(path)
    if bundled.exists():
        return bundled
    raise UsageError(f"no such file: {path}")


def _theory(ref: str):
    if ref.lower() in builtin_names():
        return builtin(ref)
    return resolve_theory(str(_corpus(ref)))


def _text_or_file(arg: str) -> str:
    p = Path(arg)
    if not arg.lstrip().startswith("(") and p.suffix and p.exists():
        return p.read_text()
    return arg


def _sorted(th, x):
    """Reject ill-sorted input before it reaches the rewriter or a model."""
    if isinstance(x, Prop):
        check_prop(th.signature, x)
    else:
        well_sorted(th.signature, x)
    return x


def _budget(cfg: RunConfig) -> Budget:
    return Budget(max_steps=cfg.fuel) if cfg.fuel else Budget()


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


# ---------------------------------------------------------------------------
# Verbs; each returns (exit code, JSON report, human text)


def cmd_rewrite(cfg: RunConfig, args) -> tuple[int, dict, str]:
    th = _theory(args.theory)
    scope = th.scope()
    show_ = lambda x: show(x, th.signature, th.env)  # noqa: E731
    if args.mode == "nf":
        x = _sorted(th, parse_expr(_text_or_file(args.expr), scope))
        try:
            nf, steps = normalize_counting(th.system, x, _budget(cfg))
            rep = {"theory": th.name, "input": show_(x), "status": "NormalForm",
                   "result": show_(nf), "steps": steps}
            return 0, rep, show_(nf)
        except FuelExhausted as e:
            rep = {"theory": th.name, "input": show_(x), "status": "FuelExhausted",
                   "last": show_(e.last), "steps": e.steps}
            return 1, rep, f"FuelExhausted after {e.steps} steps; last reduct {show_(e.last)}"
    if len(args.exprs) != 2:
        raise UsageError("rewrite cong needs two expressions")
    a = _sorted(th, parse_expr(_text_or_file(args.exprs[0]), scope))
    b = _sorted(th, parse_expr(_text_or_file(args.exprs[1]), scope))
    v = congruent(th.system, a, b, _budget(cfg))
    rep = {"theory": th.name, "left": show_(a), "right": show_(b), "verdict": v.value}
    return (0 if v else 1), rep, v.value


def cmd_check(cfg: RunConfig, args) -> tuple[int, dict, str]:
    th = _theory(args.theory)
    proof = load_proof(_corpus(args.proof), th)
    rep = check(th, proof, _budget(cfg))
    out = {"theory": th.name, "proof": args.proof, **rep.to_json()}
    lines = [f"{args.proof}: {'accepted' if rep.accepted else 'rejected'} ({rep.nodes} nodes)"]
    for f in rep.failures:
        lines.append(f"  at {'.'.join(map(str, f.path)) or 'root'} [{f.rule}] {f.condition}: {f.kind}")
    return (0 if rep.accepted else 1), out, "\n".join(lines)


def _guess_theory(text: str):
    for name in ("pimpq", "qimpp", "subset", "stt"):
        try:
            return builtin(name), parse_proof(text, builtin(name))
        except (ParseError, SortError):
            continue
    raise UsageError("the proof does not parse in any built-in theory; pass --theory")


def cmd_classify(cfg: RunConfig, args) -> tuple[int, dict, str]:
    text = _corpus(args.proof).read_text()
    if args.theory:
        th = _theory(args.theory)
        proof = parse_proof(text, th)
    else:
        th, proof = _guess_theory(text)
    rep = {"proof": args.proof, "theory": th.name, "nodes": proof.size(), **classify(proof)}
    human = f"root {proof.rule}: neutral={rep['neutral']} cut_free={rep['cut_free']}"
    return 0, rep, human


def cmd_normalize(cfg: RunConfig, args) -> tuple[int, dict, str]:
    th = _theory(args.theory)
    proof = load_proof(_corpus(args.proof), th)
    budget = Budget()
    fuel = cfg.fuel if cfg.fuel else DEFAULT_FUEL
    tr = normalize(th, proof, budget, fuel)
    printed = [proof_to_text(p, th) for p in tr.proofs]
    rep = {
        "theory": th.name,
        "proof": args.proof,
        "status": tr.status.value,
        "repeat_index": tr.repeat_index,
        "steps": tr.steps,
        "fuel": fuel,
        "result_cut_free": is_cut_free(tr.result),
        "redexes": [{"path": list(r.path), "kind": r.kind, "rules": list(r.rules)} for r in tr.redexes],
    }
    if args.trace:
        trace = {"status": tr.status.value, "repeat_index": tr.repeat_index, "proofs": printed}
        Path(args.trace).write_text(_dump(trace) + "\n")
    human = f"{tr.status.value} after {tr.steps} steps"
    if tr.repeat_index is not None:
        human += f" (repeats proof {tr.repeat_index})"
    return (0 if tr.status is Status.NORMAL_FORM else 1), rep, human + "\n" + printed[-1]


def cmd_tva(cfg: RunConfig, args) -> tuple[int, dict, str]:
    if args.mode == "validate":
        t = resolve_tva(args.algebra if args.algebra in BUNDLED_ALGEBRAS else str(_corpus(args.algebra)))
        rep = validate_tva(t)
        out = rep.to_json(t)
        lines = [f"{t.name or args.algebra}: conditions failing {rep.failed or 'none'}, full={rep.full}"]
        if rep.order is not None:
            lines.append(f"ordered={rep.ordered} complete={rep.complete.passed}")
        return (0 if rep.ok else 1), out, "\n".join(lines)
    h = heyting_from_json(load_json(_corpus(args.algebra)))
    t = heyting_to_tva(h)
    rep = validate_tva(t)
    out = {"algebra": tva_to_json(t), "report": rep.to_json(t)}
    return (0 if rep.ok else 1), out, _dump(tva_to_json(t))


def cmd_model(cfg: RunConfig, args) -> tuple[int, dict, str]:
    if args.mode == "check":
        th = _theory(args.theory)
        s, _ = load_structure(_corpus(args.structure))
        rep = check_model(s, th)
        lines = [f"{s.name}: {'model' if rep.ok else 'not a model'} of {th.name}"]
        for e in rep.entries:
            if not e.passed:
                lines.append(f"  {e.kind} {e.name}: {e.reason} {e.witness}")
        return (0 if rep.ok else 1), rep.to_json(), "\n".join(lines)
    s, th = load_structure(_corpus(args.structure))
    env = dict(th.env)
    values = {}
    for item in args.assign or []:
        name, _, raw = item.partition("=")
        try:
            values[name] = json.loads(raw)
        except json.JSONDecodeError:
            values[name] = raw
    p = _sorted(th, parse_prop(_text_or_file(args.prop), th.scope()))
    phi = {}
    for v in sorted(free_vars(p), key=lambda v: v.name):
        if v.name not in values:
            raise UsageError(f"no value for free variable {v.name}; use --assign {v.name}=...")
        phi[v] = values[v.name]
    val = denote_prop(s, phi, p)
    rep = {"structure": s.name, "prop": show(p, th.signature, env), "defined": val is not None,
           "value": to_jsonable(val), "positive": val in s.tva.positive if val is not None else False}
    return (0 if val is not None else 1), rep, "undefined" if val is None else repr(to_jsonable(val))


def cmd_theory(cfg: RunConfig, args) -> tuple[int, dict, str]:
    th = _theory(args.name)
    text = theory_to_text(th)
    rep = {"name": th.name, "rules": [r.name for r in th.system.rules],
           "axioms": len(th.axioms), "text": text}
    return 0, rep, text.rstrip("\n")


def cmd_sample(cfg: RunConfig, args) -> tuple[int, dict, str]:
    """Generate seeded random proofs, check them and normalize them."""
    th = _theory(args.theory)
    fuel = cfg.fuel if cfg.fuel else DEFAULT_FUEL
    proofs = random_proofs(th, args.count, cfg.seed, args.depth)
    checker = Checker(th)
    rows = []
    problems = 0
    for i, p in enumerate(proofs):
        accepted = checker.check(p).accepted
        tr = normalize(th, p, fuel=fuel)
        res = tr.result
        res_ok = checker.check(res).accepted and res.concl == p.concl
        cut_free = is_cut_free(res)
        row = {"index": i, "accepted": accepted, "depth": p.depth(), "nodes": p.size(),
               "status": tr.status.value, "steps": tr.steps, "result_accepted": res_ok,
               "result_cut_free": cut_free}
        if tr.status is Status.NORMAL_FORM and has_detour(checker, res):
            row["detour_left"] = True
            problems += 1
        problems += (not accepted) + (not res_ok)
        rows.append(row)
    statuses: dict[str, int] = {}
    for r in rows:
        statuses[r["status"]] = statuses.get(r["status"], 0) + 1
    rep = {"theory": th.name, "seed": cfg.seed, "count": args.count, "depth": args.depth,
           "fuel": fuel, "statuses": statuses, "problems": problems, "proofs": rows}
    human = f"{args.count} proofs in {th.name}: {statuses}; problems: {problems}"
    return (0 if problems == 0 else 1), rep, human


# ---------------------------------------------------------------------------


def _env_fuel() -> Optional[int]:
    raw = os.environ.get("MODULO_FUEL")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"MODULO_FUEL must be an integer, got {raw!r}") from None
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=argparse.SUPPRESS,
                        help="step limit (rewriting steps or proof reductions); default from MODULO_FUEL")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print a JSON report")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")

    parser = argparse.ArgumentParser(prog="modulo", parents=[common],
                                     description="Deduction modulo toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rewrite", parents=[common], help="normal forms and congruence")
    p.add_argument("mode", choices=["nf", "cong"])
    p.add_argument("theory")
    p.add_argument("exprs", nargs="+")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("check", parents=[common], help="check a proof")
    p.add_argument("theory")
    p.add_argument("proof")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", parents=[common], help="neutral / cut-free classification")
    p.add_argument("proof")
    p.add_argument("--theory")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("normalize", parents=[common], help="reduce a proof")
    p.add_argument("theory")
    p.add_argument("proof")
    p.add_argument("--trace", help="write the reduction trace as JSON")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("tva", parents=[common], help="truth values algebras")
    p.add_argument("mode", choices=["validate", "from-heyting"])
    p.add_argument("algebra")
    p.set_defaults(func=cmd_tva)

    p = sub.add_parser("model", parents=[common], help="finite structures")
    p.add_argument("mode", choices=["check", "eval"])
    p.add_argument("args", nargs=2, metavar="ARG",
                   help="check: THEORY STRUCTURE; eval: STRUCTURE PROP")
    p.add_argument("--assign", action="append", metavar="x=d")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("theory", parents=[common], help="print a theory")
    p.add_argument("action", choices=["show"])
    p.add_argument("name")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("sample", parents=[common], help="random proofs: check and normalize")
    p.add_argument("theory")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        fuel = getattr(args, "fuel", None)
        if fuel is None:
            fuel = _env_fuel()
        if fuel is not None and fuel <= 0:
            raise UsageError("--fuel must be positive")
        if args.command == "rewrite":
            args.expr = args.exprs[0]
            if args.mode == "nf" and len(args.exprs) != 1:
                raise UsageError("rewrite nf takes one expression")
        if args.command == "model":
            if args.mode == "check":
                args.theory, args.structure = args.args
            else:
                args.structure, args.prop = args.args
        cfg = RunConfig(args.command, [], fuel, getattr(args, "json", False), getattr(args, "seed", 0))
        code, report, human = args.func(cfg, args)
    except (UsageError, ParseError, SortError, RuleError, KeyError, ValueError, OSError) as e:
        msg = f"missing entry {e.args[0]!r}" if type(e) is KeyError and e.args else (
            e.args[0] if isinstance(e, KeyError) and e.args else str(e))
        print(f"modulo: error: {msg}", file=sys.stderr)
        return 2
    if cfg.json:
        print(_dump(report))
    else:
        print(human)
    return code


if __name__ == "__main__":
    sys.exit(main())
