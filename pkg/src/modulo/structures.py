"""Structure files and the bundled corpus.

A structure file is JSON::

    {"name": "...", "theory": "subset", "tva": "bool2",
     "domains": {"set": [0, 1]},
     "functions": {"e": 0, "op": [[[0, 0], 0], [[0, 1], 1], ...]},
     "predicates": {"P": 1, "mem": [[[0, 0], 1], ...]}}

Nullary symbols may be given by their value alone. ``tva`` is the name
of a bundled algebra, a path (relative to the structure file) or an
inline algebra object. The STT model is requested with
``{"theory": "stt", "tva": ..., "stt_model": {"depth": 2, "cap": 10000}}``.
"""

from __future__ import annotations

import json
from importlib.resources import files
from pathlib import Path
from typing import Any, Mapping, Optional

from .lang import Base
from .models import FiniteStructure, from_tables
from .theories import DEFAULT_DOMAIN_CAP, Theory, build_stt_model, resolve_theory
from .tva import FiniteTva, tva_from_json

DATA = files("modulo") / "data"

BUNDLED_ALGEBRAS = ("bool2", "chain3")


def data_path(name: str) -> Path:
    return Path(str(DATA / name))


def load_json(path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def resolve_tva(ref, base: Optional[Path] = None) -> FiniteTva:
    if isinstance(ref, Mapping):
        return tva_from_json(ref)
    if ref in BUNDLED_ALGEBRAS:
        return tva_from_json(load_json(data_path(f"{ref}.json")))
    path = Path(ref)
    if base is not None and not path.is_absolute() and (base / path).exists():
        path = base / path
    return tva_from_json(load_json(path))


def _table(spec) -> dict[tuple, Any]:
    if not isinstance(spec, list):
        return {(): spec}
    return {tuple(args): value for args, value in spec}


def structure_from_json(data: Mapping[str, Any], base: Optional[Path] = None) -> tuple[FiniteStructure, Theory]:
    theory = resolve_theory(data["theory"]) if not (
        base is not None and (base / str(data["theory"])).exists()
    ) else resolve_theory(str(base / data["theory"]))
    t = resolve_tva(data["tva"], base)
    if "stt_model" in data:
        opts = data["stt_model"] or {}
        s = build_stt_model(t, opts.get("depth", 2), opts.get("cap", DEFAULT_DOMAIN_CAP))
        if data.get("name"):
            s.name = data["name"]
        return s, theory
    domains = {Base(k): v for k, v in data.get("domains", {}).items()}
    funs = {k: _table(v) for k, v in data.get("functions", {}).items()}
    preds = {k: _table(v) for k, v in data.get("predicates", {}).items()}
    missing = [n for n, d in theory.signature.decls.items()
               if (n not in preds if d.is_predicate else n not in funs)]
    if missing:
        raise ValueError(f"no interpretation for {', '.join(sorted(missing))}")
    return from_tables(t, domains, funs, preds, data.get("name", "")), theory


def load_structure(path) -> tuple[FiniteStructure, Theory]:
    path = Path(path)
    return structure_from_json(load_json(path), path.parent)


def bundled_corpus() -> list[str]:
    """Names of the files shipped with the package."""
    return sorted(p.name for p in DATA.iterdir() if p.is_file() or p.is_dir())
