"""``qig`` command line: derive, recognize, wreath-check."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from .algebra.store import Assumption
from .engine import FundamentalMatrix, run_pipeline
from .groups import BackendMismatch, BudgetExceeded, WordProblem, compare_ball
from .presentation import ParseError, PresentationError, parse_presentation
from .recognize import AutomorphismCandidate, CandidateError, parse_candidate, recognize, describe_sigma
from .report import (SCHEMA_ID, Cache, RunConfig, derive_report, dumps, digest, relation_from_json,
                     store_from_json, structure_json, text_summary, wreath_report, atomic_write)
from .wreath import wreath_suite

EXIT_OK, EXIT_PARSE, EXIT_BACKEND, EXIT_BUDGET, EXIT_CACHE, EXIT_CANDIDATE = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _err(*parts) -> None:
    print(*parts, file=sys.stderr)


def cmd_derive(path: str, cfg: RunConfig, verbose: bool = False) -> tuple[str, dict]:
    """Run (or fetch from cache) the full pipeline; returns the JSON text and the report."""
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(EXIT_PARSE, f"{path}: {e.strerror}")
    try:
        p = parse_presentation(source)
    except ParseError as e:
        raise CliError(EXIT_PARSE, f"{path}:{e.line}:{e.col}: {e.message}")
    except PresentationError as e:
        raise CliError(EXIT_PARSE, f"{path}: {e}")
    text = p.render()
    key = digest(text, cfg)
    cache = Cache(cfg.cache())
    hit = cache.get(key)
    if hit is not None:
        if verbose:
            _err(f"cache hit {key}")
        return hit, json.loads(hit)
    t0 = time.perf_counter()
    try:
        pc = cfg.pipeline()
        wp = WordProblem(p, radius_cap=max(pc.expansion_cap, 3))
        log = (lambda ev: _err(json.dumps(ev, default=str))) if verbose else None
        res = run_pipeline(p, pc, log=log, word_problem=wp)
        structure = recognize(res.store, res.matrix, wp, baseline=res.derived,
                              config=pc.saturation_config())
        oracle = [compare_ball(p, wp, r) for r in (1, 2, 3)] if cfg.oracle_check else None
    except BackendMismatch as e:
        raise CliError(EXIT_BACKEND, f"{path}: backend mismatch: {e}")
    except BudgetExceeded as e:
        raise CliError(EXIT_BUDGET, f"{path}: budget exceeded: {e}")
    report = derive_report(res, structure, cfg, text, oracle)
    blob = dumps(report)
    cache.put(key, blob)
    if verbose:
        timing = {k: round(v, 3) for k, v in res.timing.items()}
        _err(f"derived {key} in {time.perf_counter() - t0:.2f}s {timing}")
    return blob, report


def _load(cache: Cache, prefix: str) -> dict:
    found = cache.find(prefix)
    if not found:
        raise CliError(EXIT_CACHE, f"no cached derive report matches {prefix!r} in {cache.root}")
    if len(found) > 1:
        raise CliError(EXIT_CACHE, f"digest prefix {prefix!r} is ambiguous ({len(found)} reports)")
    return json.loads(found[0].read_text(encoding="utf-8"))


def _with_compositions(cands: list[AutomorphismCandidate], F, wp) -> list[AutomorphismCandidate]:
    """Pinned candidates plus their valid pairwise compositions."""
    from .recognize import validate_candidate
    out = list(cands)
    seen = {c.sigma for c in out}
    for a in cands:
        for b in cands:
            s = a.compose(b)
            if s in seen or s == tuple(range(F.size)) or validate_candidate(s, F, wp) is not None:
                continue
            seen.add(s)
            out.append(AutomorphismCandidate(s, describe_sigma(s, F)))
    return out


def cmd_recognize(prefix: str, pins: Sequence[str], cfg: RunConfig) -> tuple[str, dict]:
    """Re-run the recognizers on a cached derive report."""
    rep = _load(Cache(cfg.cache()), prefix)
    cfg = RunConfig(**rep["config"], cache_dir=cfg.cache_dir, workers=cfg.workers)
    p = parse_presentation(rep["presentation"]["text"])
    F = FundamentalMatrix(p)
    wp = WordProblem(p, radius_cap=max(cfg.expansion_cap, 3))
    derived = store_from_json(rep["derived_relations"], F, rep["derived_normal"])
    if rep["assumptions"]:
        store = store_from_json(rep["assumed_relations"], F, rep["normal"])
        store.assumptions = [Assumption(relation_from_json(a["terms"], F), a["provenance"], a["relation"])
                             for a in rep["assumptions"]]
    else:
        store = derived
    pinned = None
    if pins:
        try:
            pinned = _with_compositions([parse_candidate(t, F, wp) for t in pins], F, wp)
        except CandidateError as e:
            raise CliError(EXIT_CANDIDATE, f"rejected candidate: {e}")
    structure = recognize(store, F, wp, baseline=derived, pinned=pinned, config=cfg.pipeline().saturation_config())
    out = {"schema": SCHEMA_ID, "command": "recognize", "digest": rep["digest"],
           "pinned": [c.label for c in pinned] if pinned is not None else None,
           "structure": structure_json(structure, F)}
    return dumps(out), out


def _recognize_text(out: dict) -> str:
    st = out["structure"]
    lines = [f"structure: {st['kind']} ({st['certification']})"]
    lines += [f"  witness {w['label']}" for w in st["witnesses"]]
    lines += [f"  {'pass' if c['passed'] else 'FAIL'}  {c['name']}" for c in st["conditions"]]
    lines += [f"  note: {n}" for n in st["notes"]]
    return "\n".join(lines) + "\n"


def cmd_wreath_check(s: int, n: int, cfg: RunConfig) -> tuple[str, dict]:
    try:
        suite = wreath_suite(s, n, cfg.degree_bound, cfg.pipeline())
    except ValueError as e:
        raise CliError(EXIT_PARSE, str(e))
    except BudgetExceeded as e:
        raise CliError(EXIT_BUDGET, f"budget exceeded: {e}")
    rep = wreath_report(suite, cfg.degree_bound)
    return dumps(rep), rep


def _config(args) -> RunConfig:
    return RunConfig(degree_bound=args.degree_bound, rounds=args.rounds, relation_cap=args.relation_cap,
                     expansion_cap=args.expansion_cap, oracle_check=getattr(args, "oracle_check", False),
                     cache_dir=Path(args.cache_dir) if args.cache_dir else None,
                     workers=getattr(args, "workers", 1))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qig", description="Quantum isometry groups of finitely presented groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--degree-bound", type=int, default=6)
        sp.add_argument("--rounds", type=int, default=8)
        sp.add_argument("--relation-cap", type=int, default=200_000)
        sp.add_argument("--expansion-cap", type=int, default=6)
        sp.add_argument("--cache-dir", default=None, help="overrides QIG_CACHE")
        sp.add_argument("--json", default=None, metavar="OUT", help="also write the JSON report here")
        sp.add_argument("-q", "--quiet", action="store_true", help="no text summary on stdout")
        sp.add_argument("-v", "--verbose", action="store_true", help="progress and timings on stderr")

    d = sub.add_parser("derive", help="run the pipeline on a presentation file")
    d.add_argument("file")
    d.add_argument("--oracle-check", action="store_true", help="compare the backend ball with the relator oracle")
    d.add_argument("--workers", type=int, default=1)
    common(d)

    r = sub.add_parser("recognize", help="re-run structure recognition on a cached report")
    r.add_argument("digest", help="digest or unique prefix")
    r.add_argument("--pin", action="append", default=[], metavar="PERM",
                   help='automorphism candidate such as "g->g^-1, h->h" (repeatable)')
    common(r)

    w = sub.add_parser("wreath-check", help="verify the free wreath product isomorphism")
    w.add_argument("--s", type=int, required=True)
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--workers", type=int, default=1)
    common(w)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "derive":
            blob, rep = cmd_derive(args.file, cfg, args.verbose)
            text = text_summary(rep)
        elif args.command == "recognize":
            blob, rep = cmd_recognize(args.digest, args.pin, cfg)
            text = _recognize_text(rep)
        else:
            blob, rep = cmd_wreath_check(args.s, args.n, cfg)
            text = text_summary(rep)
    except CliError as e:
        _err(f"qig: {e}")
        return e.code
    except ValueError as e:
        _err(f"qig: {e}")
        return EXIT_PARSE
    if args.json:
        atomic_write(Path(args.json), blob)
    if not args.quiet:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
