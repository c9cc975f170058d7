"""Bounded-degree saturation of a relation store.

One round gathers candidate relations from the current basis (overlaps,
adjoint and antipode images, partition-of-unity multiplications, positivity,
normality and normal-pair annihilation), then inserts them in generation
order.  Rounds repeat until nothing changes or a cap is hit.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .poly import Q, NCPoly, Mono, Terms, adjoint_mono, antipode, deglex
from .store import Inconsistent, RelationStore

ONE: Mono = ()


@dataclass
class SaturationConfig:
    degree_bound: int = 6
    rounds: int = 8
    relation_cap: int = 200_000
    overlaps: bool = True
    adjoint: bool = True
    antipode: bool = True
    partition: bool = True
    sandwich: bool = True
    double_partition: bool = True
    positivity: bool = True
    positivity_degree: int = 2
    sparse_terms: int = 3
    first_stage: int = 3
    normality: bool = True
    annihilation: bool = True
    time_limit: float | None = None


@dataclass
class SaturationResult:
    store: RelationStore
    rounds: int
    complete: bool
    firings: Counter = field(default_factory=Counter)
    parked: int = 0
    events: list[dict] = field(default_factory=list)
    seconds: float = 0.0


def _mono_poly(m: Mono) -> NCPoly:
    return NCPoly._raw({m: Q(1)})


def _is_hermitian_square(m: Mono) -> Mono | None:
    """``m = w w*`` for some ``w``; returns ``w``."""
    n = len(m)
    if n == 0 or n % 2:
        return None
    h = n // 2
    w = m[:h]
    return w if m[h:] == adjoint_mono(w) else None


class Saturator:
    def __init__(self, store: RelationStore, partition_sums: Sequence[NCPoly] = (),
                 config: SaturationConfig | None = None,
                 log: Callable[[dict], None] | None = None):
        self.store = store
        self.cfg = config or SaturationConfig()
        self.sums = [s for s in partition_sums]
        self.log = log
        self.firings: Counter = Counter()
        self.parked: set[tuple[Mono, Mono, int]] = set()
        self.events: list[dict] = []
        self._seen_pairs: set[tuple[Mono, Mono, int]] = set()
        self._closed: set[tuple[str, Mono, tuple]] = set()
        self.D = self.cfg.degree_bound
        self.deferred: list[tuple[NCPoly, str]] = []

    def _event(self, **kw) -> None:
        self.events.append(kw)
        if self.log is not None:
            self.log(kw)

    # -- candidate generators ------------------------------------------------

    def _overlaps(self, new: list[Mono]) -> list[tuple[NCPoly, str]]:
        S = self.store
        rules = S.rules
        D = self.D
        by_prefix: dict[Mono, list[Mono]] = {}
        by_suffix: dict[Mono, list[Mono]] = {}
        for lm in sorted(rules, key=deglex):
            for k in range(1, len(lm)):
                by_prefix.setdefault(lm[:k], []).append(lm)
                by_suffix.setdefault(lm[-k:], []).append(lm)
        out = []
        newset = set(new)

        def spoly(l1: Mono, l2: Mono, k: int):
            # l1 = x s, l2 = s y with |s| = k
            key = (l1, l2, k)
            if key in self._seen_pairs:
                return
            deg = len(l1) + len(l2) - k
            if deg > D:
                self.parked.add(key)
                return
            self._seen_pairs.add(key)
            r1, r2 = rules[l1], rules[l2]
            x, y = l1[:-k], l2[k:]
            t: Terms = {}
            for m, c in r1.tail.items():
                mm = m + y
                t[mm] = t.get(mm, 0) + c
            for m, c in r2.tail.items():
                mm = x + m
                v = t.get(mm, 0) - c
                if v:
                    t[mm] = v
                else:
                    t.pop(mm, None)
            t = {m: c for m, c in t.items() if c}
            red = S.reduce_terms(t)
            if red:
                out.append((NCPoly._raw(red), "overlap"))

        replay = sorted((k for k in self.parked if len(k[0]) + len(k[1]) - k[2] <= D),
                        key=lambda k: (deglex(k[0]), deglex(k[1]), k[2]))
        for key in replay:
            self.parked.discard(key)
            if key[0] in rules and key[1] in rules:
                spoly(*key)
        for l1 in sorted(newset, key=deglex):
            if l1 not in rules:
                continue
            for k in range(1, len(l1)):
                for l2 in by_prefix.get(l1[-k:], ()):
                    spoly(l1, l2, k)
                for l0 in by_suffix.get(l1[:k], ()):
                    if l0 not in newset:
                        spoly(l0, l1, k)
        return out

    def _closures(self, new: list[Mono]) -> list[tuple[NCPoly, str]]:
        S = self.store
        out = []
        for lm in sorted(new, key=deglex):
            r = S.rules.get(lm)
            if r is None:
                continue
            p = r.poly()
            if self.cfg.adjoint:
                q = S.reduce(p.adjoint())
                if q:
                    out.append((q, "adjoint"))
            if self.cfg.antipode and S.alphabet.antipode_table is not None:
                q = S.reduce(antipode(p, S.alphabet))
                if q:
                    out.append((q, "antipode"))
        return out

    def _live_atoms(self) -> list[int]:
        S = self.store
        return [a for a in range(S.alphabet.n_atoms) if not S.is_zero_atom(a)]

    def _partition(self) -> list[tuple[NCPoly, str]]:
        S = self.store
        cfg = self.cfg
        out = []
        atoms = self._live_atoms()
        sums = [S.reduce(s, units=False) for s in self.sums]
        sums = [s for s in dict.fromkeys(sums) if s]
        right: dict[int, list[NCPoly]] = {}
        for a in atoms:
            x = _mono_poly((a,))
            xr = S.reduce(x)
            rs = []
            for s in sums:
                q = S.reduce(x * s, units=False)
                rs.append(q)
                c = S.reduce(q - xr)
                if c:
                    out.append((c, "partition"))
                q2 = S.reduce(s * x, units=False)
                c = S.reduce(q2 - xr)
                if c:
                    out.append((c, "partition"))
            right[a] = rs
        if cfg.double_partition:
            for a in atoms:
                xr = S.reduce(_mono_poly((a,)))
                for q in right[a]:
                    if len(q.terms) > cfg.sparse_terms or q.degree > self.D - 2:
                        continue
                    for s in sums:
                        c = S.reduce(S.reduce(q * s, units=False) - xr)
                        if c:
                            out.append((c, "double_partition"))
        if cfg.sandwich:
            sparse = [s for s in sums if len(s.terms) <= cfg.sparse_terms]
            for a in atoms:
                for b in atoms:
                    xy = S.reduce(_mono_poly((a, b)))
                    for s in sparse:
                        q = S.reduce(_mono_poly((a,)) * s * _mono_poly((b,)), units=False)
                        c = S.reduce(q - xy)
                        if c:
                            out.append((c, "sandwich"))
        return out

    def _positivity(self) -> list[tuple[NCPoly, str]]:
        S = self.store
        out = []
        atoms = self._live_atoms()
        monos: list[Mono] = [(a,) for a in atoms]
        if self.cfg.positivity_degree >= 2:
            monos += [(a, b) for a in atoms for b in atoms if S.reduce_terms({(a, b): Q(1)})]
        for m in monos:
            if not S.reduce_terms({m: Q(1)}):
                continue
            w = adjoint_mono(m)
            if not S.reduce_terms({m + w: Q(1)}) or not S.reduce_terms({w + m: Q(1)}):
                out.append((_mono_poly(m), "positivity"))
        # a basis element that is a positive combination of hermitian squares
        for lm in sorted(S.rules, key=deglex):
            p = S.rules[lm].poly()
            if ONE in p.terms:
                continue
            sign = None
            roots = []
            for m, c in p.terms.items():
                w = _is_hermitian_square(m)
                s = c > 0
                if w is None or (sign is not None and s != sign):
                    roots = None
                    break
                sign = s
                roots.append(w)
            if roots:
                for w in roots:
                    out.append((_mono_poly(w), "positivity"))
        return out

    def _normality(self) -> list[tuple[NCPoly, str]]:
        S = self.store
        out = []
        for s in range(len(S.alphabet)):
            if s in S.normal:
                continue
            x = 2 * s
            if S.is_zero_atom(x):
                S.normal.add(s)
                continue
            xs = x + 1
            comm = {(x, xs): Q(1), (xs, x): Q(-1)}
            ok = not S.reduce_terms(comm)
            if not ok:
                c1 = S.reduce_terms({(x, x, xs): Q(1), (x,): Q(-1)})
                c2 = S.reduce_terms({(xs, x, x): Q(1), (x,): Q(-1)})
                ok = not c1 and not c2
            if ok:
                S.normal.add(s)
                self._event(event="normal", symbol=S.alphabet.names[s])
                out.append((NCPoly._raw(comm), "normality"))
        return out

    def _annihilation(self) -> list[tuple[NCPoly, str]]:
        S = self.store
        out = []
        atoms = [a for a in self._live_atoms() if (a >> 1) in S.normal]
        for u in atoms:
            for v in atoms:
                if S.reduce_terms({(u, v): Q(1)}):
                    continue
                key = ("ann", (u, v), ())
                if key in self._closed:
                    continue
                self._closed.add(key)
                us, vs = u ^ 1, v ^ 1
                for m in ((us, v), (v, us), (vs, u), (u, vs), (v, u)):
                    if S.reduce_terms({m: Q(1)}):
                        out.append((_mono_poly(m), "annihilation"))
        return out

    # -- driver --------------------------------------------------------------

    def _echelon(self, cands: list[tuple[NCPoly, str]]) -> list[tuple[Terms, str]]:
        """Reduce against the frozen basis, then eliminate linearly among the results."""
        S = self.store
        pivots: dict[Mono, tuple[Terms, str]] = {}
        for p, origin in cands:
            row = S.reduce_terms(p.terms)
            if row and max(len(m) for m in row) > self.D:
                self.deferred.append((NCPoly._raw(row), origin))
                continue
            while row:
                hits = [m for m in row if m in pivots]
                if not hits:
                    break
                m = max(hits, key=deglex)
                c = row[m]
                prow = pivots[m][0]
                for k, v in prow.items():
                    x = row.get(k, 0) - c * v
                    if x:
                        row[k] = x
                    else:
                        row.pop(k, None)
            if not row:
                continue
            lm = max(row, key=deglex)
            c = row[lm]
            pivots[lm] = ({k: v / c for k, v in row.items()}, origin)
        return [pivots[m] for m in sorted(pivots, key=deglex)]

    def _insert(self, cands: list[tuple[NCPoly, str]]) -> list[Mono]:
        S = self.store
        new: list[Mono] = []
        for terms, origin in self._echelon(cands):
            before = S.version
            added = S.add(NCPoly._raw(terms), origin)
            if S.version != before:
                self.firings[origin] += 1
            new.extend(added)
            if len(S) > self.cfg.relation_cap:
                break
        return [m for m in dict.fromkeys(new) if m in S.rules]

    def _round(self, new: list[Mono]) -> list[Mono]:
        cfg = self.cfg
        cands: list[tuple[NCPoly, str]] = []
        if self.deferred:
            cands, self.deferred = self.deferred, []
        cands += self._closures(new)
        if cfg.overlaps:
            cands += self._overlaps(new)
        if cfg.partition and self.sums:
            cands += self._partition()
        if cfg.positivity:
            cands += self._positivity()
        if cfg.normality:
            cands += self._normality()
        if cfg.annihilation:
            cands += self._annihilation()
        out = self._insert(cands)
        self._last_candidates = len(cands)
        return out

    def run(self) -> SaturationResult:
        """Degree-staged rounds: each stage bound runs to a fixpoint before the next."""
        S = self.store
        cfg = self.cfg
        t0 = time.perf_counter()
        new = sorted(S.rules, key=deglex)
        rounds = 0
        complete = True
        capped = False
        stages = list(range(min(cfg.first_stage, cfg.degree_bound), cfg.degree_bound + 1))
        for D in stages:
            self.D = D
            reached = False
            for r in range(1, cfg.rounds + 1):
                rounds += 1
                version = S.version
                new = self._round(new)
                self._event(event="round", stage=D, round=r, candidates=self._last_candidates,
                            new=len(new), basis=len(S), zeros=len(S.zero_symbols()),
                            seconds=round(time.perf_counter() - t0, 3))
                if len(S) > cfg.relation_cap:
                    S.incomplete.append(f"relation cap {cfg.relation_cap} exceeded")
                    capped = True
                    break
                if cfg.time_limit is not None and time.perf_counter() - t0 > cfg.time_limit:
                    S.incomplete.append("time limit reached")
                    capped = True
                    break
                if S.version == version:
                    reached = True
                    break
            if capped:
                complete = False
                break
            if not reached:
                complete = False
                S.incomplete.append(f"round cap {cfg.rounds} reached at degree {D}")
        S.interreduce_tails()
        self.parked = {k for k in self.parked if k[0] in S.rules and k[1] in S.rules}
        return SaturationResult(S, rounds, complete, self.firings, len(self.parked) + len(self.deferred),
                                self.events, time.perf_counter() - t0)


def saturate(store: RelationStore, partition_sums: Sequence[NCPoly] = (),
             config: SaturationConfig | None = None, log=None) -> SaturationResult:
    """Saturate ``store`` in place and return it with diagnostics."""
    try:
        return Saturator(store, partition_sums, config, log).run()
    except Inconsistent as exc:
        store.incomplete.append(f"inconsistent: {exc}")
        raise
