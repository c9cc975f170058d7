"""Run configuration, JSON reports, text summaries and the result cache.

Reports are deterministic functions of the presentation and the
configuration: wall-clock timings never enter them (they go to stderr), so
a cached report and a fresh one are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .algebra.poly import NCPoly, Q, deglex
from .algebra.store import RelationStore
from .engine import FundamentalMatrix, PipelineConfig, PipelineResult
from .recognize import StructureReport, zero_pattern
from .wreath import WreathSuite

SCHEMA_ID = "qig-report/1"


@dataclass
class RunConfig:
    degree_bound: int = 6
    rounds: int = 8
    relation_cap: int = 200_000
    expansion_cap: int = 6
    oracle_check: bool = False
    cache_dir: Path | None = None
    workers: int = 1  # results do not depend on it, so it is not part of the digest

    def __post_init__(self):
        for name in ("degree_bound", "rounds", "relation_cap", "expansion_cap", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def canonical(self) -> dict[str, Any]:
        return {"degree_bound": self.degree_bound, "rounds": self.rounds,
                "relation_cap": self.relation_cap, "expansion_cap": self.expansion_cap,
                "oracle_check": self.oracle_check}

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(degree_bound=self.degree_bound, rounds=self.rounds,
                              relation_cap=self.relation_cap, expansion_cap=self.expansion_cap,
                              workers=self.workers)

    def cache(self) -> Path:
        if self.cache_dir is not None:
            return Path(self.cache_dir)
        env = os.environ.get("QIG_CACHE")
        if env:
            return Path(env)
        return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "qig"


def digest(presentation_text: str, config: RunConfig) -> str:
    blob = presentation_text + "\n" + json.dumps(config.canonical(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


# -- relation serialization ---------------------------------------------------------

def coef_str(c) -> str:
    c = Q(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def relation_json(p: NCPoly, F: FundamentalMatrix) -> list[dict[str, Any]]:
    out = []
    for m, c in p.sorted_terms():
        mono = []
        for a in m:
            r, col = F.symbol_entry(a >> 1)
            mono.append([r, col, a & 1])
        out.append({"coef": coef_str(c), "mono": mono})
    return out


def relation_from_json(terms: list[dict[str, Any]], F: FundamentalMatrix) -> NCPoly:
    sym = {rc: k for k, rc in enumerate(F.symbols)}
    t: dict = {}
    for term in terms:
        m = tuple(2 * sym[(r, c)] + s for r, c, s in term["mono"])
        t[m] = t.get(m, 0) + Q(term["coef"])
    return NCPoly(t)


def basis_json(store: RelationStore, F: FundamentalMatrix) -> list[dict[str, Any]]:
    out = []
    for lm in sorted(store.rules, key=deglex):
        r = store.rules[lm]
        p = r.poly()
        out.append({"relation": p.to_str(F.alphabet), "origin": r.origin, "unit": r.unit,
                    "terms": relation_json(p, F)})
    return out


def store_from_json(entries: list[dict[str, Any]], F: FundamentalMatrix, normal: list[str]) -> RelationStore:
    st = RelationStore.from_rules(F.alphabet, [(relation_from_json(e["terms"], F), e["origin"], e["unit"])
                                               for e in entries])
    names = F.alphabet.names
    st.normal = {names.index(n) for n in normal}
    return st


# -- derive reports -----------------------------------------------------------------

def structure_json(rep: StructureReport, F: FundamentalMatrix) -> dict[str, Any]:
    return {
        "kind": rep.kind,
        "certification": rep.certification,
        "witnesses": [{"label": c.label, "sigma": [F.s_names[i] for i in c.sigma]} for c in rep.witnesses],
        "conditions": [{
            "name": c.name,
            "passed": c.passed,
            "failures": list(c.failures),
            "notes": list(c.notes),
            "certificates": [{"label": k.label, "relation": k.poly.to_str(F.alphabet),
                              "holds": k.holds, "assumed": k.assumed} for k in c.certificates],
        } for c in rep.conditions],
        "assumptions_used": list(rep.assumptions_used),
        "notes": list(rep.notes),
    }


def _stage_json(name: str, s) -> dict[str, Any]:
    return {"stage": name, "complete": s.complete, "rounds": s.rounds, "parked": s.parked,
            "firings": {k: s.firings[k] for k in sorted(s.firings)}}


def derive_report(res: PipelineResult, structure: StructureReport, config: RunConfig,
                  text: str, oracle=None) -> dict[str, Any]:
    F = res.matrix
    p = res.presentation
    names = F.alphabet.names
    pat = zero_pattern(res.store, F)
    stages = ["units", "relators", "assumptions"]
    out: dict[str, Any] = {
        "schema": SCHEMA_ID,
        "command": "derive",
        "digest": digest(text, config),
        "config": config.canonical(),
        "presentation": {"name": p.name, "text": text, "generators": list(p.names), "s_letters": list(F.s_names)},
        "matrix": {
            "size": F.size,
            "symbols": [{"name": names[k], "row": r, "col": c, "entry": F.entry_name(r, c)}
                        for k, (r, c) in enumerate(F.symbols)],
            "entries": F.render(),
            "reduced": F.render(res.store.is_zero_atom),
        },
        "zero_pattern": [list(row) for row in pat.zero],
        "zero_symbols": [names[s] for s in sorted(res.store.zero_symbols())],
        "derived_zero_symbols": [names[s] for s in sorted(res.derived.zero_symbols())],
        "normal": [names[s] for s in sorted(res.store.normal)],
        "derived_normal": [names[s] for s in sorted(res.derived.normal)],
        "saturation": {
            "complete": res.complete,
            "stages": [_stage_json(stages[k], s) for k, s in enumerate(res.saturations)],
            "incomplete": list(res.store.incomplete),
        },
        "auxiliary_relators": [[" ".join(F.s_names[i] for i in a) or "1",
                                " ".join(F.s_names[i] for i in b) or "1"] for a, b in res.aux],
        "derived_relations": basis_json(res.derived, F),
        "assumptions": [{"relation": a.text or a.relation.to_str(F.alphabet), "provenance": a.provenance,
                         "terms": relation_json(a.relation, F)} for a in res.store.assumptions],
        "assumed_relations": basis_json(res.store, F) if res.store.assumptions else [],
        "structure": structure_json(structure, F),
        "oracle": None,
    }
    if oracle is not None:
        out["oracle"] = [{"radius": c.radius, "slack": c.slack, "agree": c.agree,
                          "backend_size": c.backend_size, "oracle_size": c.oracle_size,
                          "mismatches": list(c.mismatches)} for c in oracle]
    return out


def _block(rows: list[list[str]]) -> list[str]:
    w = max(len(x) for row in rows for x in row)
    return ["[ " + "  ".join(x.rjust(w) for x in row) + " ]" for row in rows]


def text_summary(report: dict[str, Any]) -> str:
    """Human-readable summary; the matrix is printed in block layout."""
    if report["command"] == "wreath-check":
        return _wreath_text(report)
    pr = report["presentation"]
    st = report["structure"]
    lines = [f"group {pr['name']}  digest {report['digest'][:16]}",
             "S = " + ", ".join(pr["s_letters"]), "", "fundamental matrix:"]
    lines += ["  " + l for l in _block(report["matrix"]["entries"])]
    lines += ["", "reduced matrix:"]
    lines += ["  " + l for l in _block(report["matrix"]["reduced"])]
    lines += ["", "zero entries:   " + (" ".join(report["zero_symbols"]) or "none"),
              "normal entries: " + (" ".join(report["normal"]) or "none"),
              f"saturation complete: {'yes' if report['saturation']['complete'] else 'no'}",
              f"derived relations: {len(report['derived_relations'])}"]
    if report["assumptions"]:
        lines.append("declared assumptions (not derived):")
        for a in report["assumptions"]:
            lines.append(f"  {a['relation']}   [{a['provenance']}]")
        lines.append(f"relations with assumptions: {len(report['assumed_relations'])}")
    lines += ["", f"structure: {st['kind']} ({st['certification']})"]
    for w in st["witnesses"]:
        lines.append(f"  witness {w['label']}")
    for c in st["conditions"]:
        lines.append(f"  {'pass' if c['passed'] else 'FAIL'}  {c['name']} ({len(c['certificates'])} certificates)")
        for f in c["failures"][:5]:
            lines.append(f"        {f}")
    if st["assumptions_used"]:
        lines.append("  rests on: " + "; ".join(st["assumptions_used"]))
    for n in st["notes"]:
        lines.append(f"  note: {n}")
    if report["oracle"] is not None:
        for o in report["oracle"]:
            lines.append(f"oracle r={o['radius']}: {'agree' if o['agree'] else 'DISAGREE'} "
                         f"({o['backend_size']} elements, slack {o['slack']})")
    return "\n".join(lines) + "\n"


# -- wreath reports -----------------------------------------------------------------

def wreath_report(suite: WreathSuite, degree_bound: int) -> dict[str, Any]:
    return {
        "schema": SCHEMA_ID,
        "command": "wreath-check",
        "s": suite.s,
        "n": suite.n,
        "degree_bound": degree_bound,
        "caveat": suite.caveat,
        "passed": suite.passed,
        "counts": dict(suite.counts),
        "checks": {name: {"status": v.status, "witnesses": list(v.witnesses), "notes": list(v.notes),
                          "certificates": [{"label": l, "holds": ok} for l, _, ok in v.certificates]}
                   for name, v in suite.checks.items()},
        "notes": list(suite.notes),
    }


def _wreath_text(report: dict[str, Any]) -> str:
    lines = [f"wreath check s={report['s']} n={report['n']} (degree bound {report['degree_bound']})"]
    if report["caveat"]:
        lines.append("caveat: " + report["caveat"])
    for name, v in report["checks"].items():
        lines.append(f"  {v['status']:>12}  {name} ({len(v['certificates'])} certificates)")
        for w in v["witnesses"][:5]:
            lines.append(f"                witness {w}")
    for n in report["notes"]:
        lines.append("  note: " + n)
    lines.append("all checks pass" if report["passed"] else "not all checks pass")
    return "\n".join(lines) + "\n"


# -- cache --------------------------------------------------------------------------

def atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class Cache:
    root: Path

    def path(self, key: str, suffix: str = ".json") -> Path:
        return self.root / f"{key}{suffix}"

    def get(self, key: str, suffix: str = ".json") -> str | None:
        p = self.path(key, suffix)
        return p.read_text(encoding="utf-8") if p.exists() else None

    def put(self, key: str, data: str, suffix: str = ".json") -> Path:
        p = self.path(key, suffix)
        atomic_write(p, data)
        return p

    def find(self, prefix: str) -> list[Path]:
        if not self.root.exists():
            return []
        return sorted(p for p in self.root.glob(prefix + "*.json") if len(p.stem) == 64)
