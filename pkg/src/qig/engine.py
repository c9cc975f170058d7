"""Fundamental unitary, alpha expansion and the derivation pipeline.

The action is ``alpha(l_g) = sum_j l_{s_j} (x) u_{g j}`` for ``g`` in S.  Row
``i`` of the matrix belongs to the S-element with index ``i``; the rows of
``a^-1`` and the conjugate columns of involutive rows are aliases, so only
canonical symbols enter the alphabet.
"""

from __future__ import annotations

import dataclasses
import re
import string
import time
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .algebra.poly import Q, Alphabet, Mono, NCPoly, Terms, add_terms, parse_relations
from .algebra.saturate import SaturationConfig, SaturationResult, saturate
from .algebra.store import Assumption, RelationStore
from .groups.core import BudgetExceeded, WordProblem
from .presentation import FreeWord, GroupPresentation, symmetric_index


@dataclass
class PipelineConfig:
    degree_bound: int = 6
    rounds: int = 8
    relation_cap: int = 200_000
    expansion_cap: int = 6
    aux_short: int = 2
    aux_length: int | None = None  # None: derived from the relator lengths
    term_budget: int = 2_000_000
    unit_stage_degree: int = 3
    workers: int = 1
    saturation: SaturationConfig | None = None

    def saturation_config(self) -> SaturationConfig:
        base = self.saturation or SaturationConfig()
        base.degree_bound = self.degree_bound
        base.rounds = self.rounds
        base.relation_cap = self.relation_cap
        return base


def _letter_names(n: int) -> list[str]:
    if n <= 26:
        return list(string.ascii_uppercase[:n])
    return [f"X{k}" for k in range(n)]


class FundamentalMatrix:
    """Entries ``u_ij`` as atoms of an :class:`Alphabet` over canonical symbols."""

    def __init__(self, p: GroupPresentation, names: Sequence[str] | None = None):
        self.presentation = p
        self.index = symmetric_index(p)
        N = self.size = len(self.index)
        inv = self.inv = self.index.inv
        self.s_names = []
        for g, e in self.index.letters:
            nm = p.names[g]
            self.s_names.append(nm if e == 1 else f"{nm}^-1")
        symbols: list[tuple[int, int]] = []
        for r in range(N):
            if not self.row_canonical(r):
                continue
            for c in range(N):
                if inv[r] == r and inv[c] != c and c > inv[c]:
                    continue
                symbols.append((r, c))
        self.symbols = symbols
        self._sym = {rc: k for k, rc in enumerate(symbols)}
        names = list(names) if names is not None else _letter_names(len(symbols))
        self._entry = [[self._resolve(r, c) for c in range(N)] for r in range(N)]
        table = []
        for k, (r, c) in enumerate(symbols):
            table.append(self._entry[c][r] ^ 1)  # u_rc -> u_cr*
            table.append(self._entry[c][r])      # u_rc* -> u_cr
        self.alphabet = Alphabet(names, antipode=table, resolver=self._lookup_token)

    def row_canonical(self, r: int) -> bool:
        return self.inv[r] == r or r < self.inv[r]

    def _resolve(self, r: int, c: int) -> int:
        inv = self.inv
        if not self.row_canonical(r):
            return self._resolve(inv[r], inv[c]) ^ 1
        if inv[r] == r and inv[c] != c and c > inv[c]:
            return self._resolve(r, inv[c]) ^ 1
        return 2 * self._sym[(r, c)]

    def entry(self, i: int, j: int) -> int:
        """Atom of ``u_ij`` (possibly a starred canonical symbol)."""
        return self._entry[i][j]

    def entry_poly(self, i: int, j: int) -> NCPoly:
        return NCPoly.mono((self._entry[i][j],))

    def symbol_entry(self, s: int) -> tuple[int, int]:
        return self.symbols[s]

    def entry_name(self, i: int, j: int) -> str:
        return f"u({self.s_names[i]},{self.s_names[j]})"

    _TOK = re.compile(r"u\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)$")

    def _s_lookup(self, text: str) -> int | None:
        t = text.replace(" ", "")
        for k, nm in enumerate(self.s_names):
            if nm == t or (nm.endswith("^-1") and t == nm[:-3] + "^{-1}"):
                return k
        return None

    def _lookup_token(self, token: str) -> int | None:
        m = self._TOK.match(token)
        if not m:
            return None
        i, j = self._s_lookup(m.group(1)), self._s_lookup(m.group(2))
        if i is None or j is None:
            return None
        return self._entry[i][j]

    # -- fixed relations -----------------------------------------------------

    def structural_relations(self) -> list[NCPoly]:
        """``x = x*`` for entries of involutive rows at self-inverse columns."""
        out = []
        for s, (r, c) in enumerate(self.symbols):
            if self.inv[r] == r and self.inv[c] == c:
                out.append(NCPoly({(2 * s + 1,): 1, (2 * s,): -1}))
        return out

    def _sum(self, pairs: Iterable[tuple[int, int]]) -> NCPoly:
        t: Terms = {}
        for a, b in pairs:
            m = (a, b)
            t[m] = t.get(m, 0) + 1
        return NCPoly(t)

    def unitarity(self) -> tuple[list[NCPoly], list[NCPoly]]:
        """Entrywise unitarity of U and of its transpose.

        Returns ``(diagonal sums, off-diagonal relations)``; a diagonal sum
        ``s`` stands for the identity ``s = 1``.
        """
        N = self.size
        e = self._entry
        diag: list[NCPoly] = []
        off: list[NCPoly] = []
        for i in range(N):
            for k in range(N):
                forms = [
                    self._sum((e[i][j], e[k][j] ^ 1) for j in range(N)),        # U U*
                    self._sum((e[j][i] ^ 1, e[j][k]) for j in range(N)),        # U* U
                    self._sum((e[j][i], e[j][k] ^ 1) for j in range(N)),        # U^t (U^t)*
                    self._sum((e[i][j] ^ 1, e[k][j]) for j in range(N)),        # (U^t)* U^t
                ]
                if i == k:
                    diag.extend(forms)
                else:
                    off.extend(forms)
        return list(dict.fromkeys(diag)), list(dict.fromkeys(off))

    def partition_identities(self) -> list[NCPoly]:
        return [s - NCPoly.const(1) for s in self.unitarity()[0]]

    def render(self, zero: Callable[[int], bool] | None = None) -> list[list[str]]:
        """Matrix of entry labels, ``0`` where ``zero(atom)`` holds."""
        out = []
        for i in range(self.size):
            row = []
            for j in range(self.size):
                a = self._entry[i][j]
                row.append("0" if zero is not None and zero(a) else self.alphabet.atom_name(a))
            out.append(row)
        return out


# -- expansion ------------------------------------------------------------------

@dataclass
class AlphaExpansion:
    word: tuple[int, ...]
    terms: dict[Hashable, NCPoly]


class Expander:
    """alpha on S-words, collected in the group-element basis."""

    def __init__(self, F: FundamentalMatrix, wp: WordProblem, term_budget: int = 2_000_000):
        self.F = F
        self.wp = wp
        self.term_budget = term_budget

    def s_word(self, w: FreeWord) -> tuple[int, ...]:
        p = self.F.presentation
        lookup = {l: i for i, l in enumerate(self.F.index.letters)}
        return tuple(lookup[(g, 1 if p.generators[g].involutive else e)] for g, e in w.letters)

    def expand(self, word: Sequence[int], store: RelationStore | None = None) -> AlphaExpansion:
        F, wp = self.F, self.wp
        N = F.size
        cur: dict[Hashable, Terms] = {wp.identity: {(): Q(1)}}
        for i in word:
            nxt: dict[Hashable, Terms] = {}
            row = [F.entry(i, j) for j in range(N)]
            live = [j for j in range(N) if store is None or not store.is_zero_atom(row[j])]
            count = 0
            for x, coeff in cur.items():
                for j in live:
                    a = row[j]
                    y = wp.mul(x, wp.s_elements[j])
                    acc = nxt.get(y)
                    if acc is None:
                        acc = nxt[y] = {}
                    for m, c in coeff.items():
                        mm = m + (a,)
                        v = acc.get(mm, 0) + c
                        if v:
                            acc[mm] = v
                        else:
                            acc.pop(mm, None)
                    count += len(coeff)
            if count > self.term_budget:
                raise BudgetExceeded(f"alpha expansion exceeded {self.term_budget} terms")
            if store is not None:
                nxt = {y: store.reduce_terms(t) for y, t in nxt.items()}
            cur = {y: t for y, t in nxt.items() if t}
        return AlphaExpansion(tuple(word), {y: NCPoly._raw(t) for y, t in cur.items()})

    def compare(self, w1: Sequence[int], w2: Sequence[int],
                store: RelationStore | None = None) -> list[tuple[Hashable, NCPoly]]:
        """Nonzero coefficient differences of ``alpha(w1) - alpha(w2)``."""
        e1 = self.expand(w1, store).terms
        e2 = self.expand(w2, store).terms
        out = []
        keys = list(e1) + [k for k in e2 if k not in e1]
        for k in keys:
            d = NCPoly._raw(add_terms(e1.get(k, NCPoly()).terms, e2.get(k, NCPoly()).terms, -1))
            if store is not None:
                d = store.reduce(d)
            if d:
                out.append((k, d))
        return out


def unit_relations(F: FundamentalMatrix, ex: Expander,
                   store: RelationStore | None = None) -> list[NCPoly]:
    """Coefficients of ``alpha(g) alpha(g^-1) = 1`` for every g in S."""
    out = []
    for i in range(F.size):
        for _, d in ex.compare((i, F.inv[i]), (), store):
            out.append(d)
    return out


def fit_to_cap(w1: tuple[int, ...], w2: tuple[int, ...], inv: Sequence[int],
               cap: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Rebalance ``w1 = w2`` as ``u = v`` with ``|u|, |v| <= cap`` when a side is too long.

    ``u v^-1`` is the free reduction of ``w1 w2^-1`` split at its middle, so
    the generated ideal is unchanged (modulo the unit relations).
    """
    if len(w1) <= cap and len(w2) <= cap:
        return w1, w2
    w: list[int] = []
    for i in w1 + tuple(inv[j] for j in reversed(w2)):
        if w and w[-1] == inv[i]:
            w.pop()
        else:
            w.append(i)
    h = (len(w) + 1) // 2
    u = tuple(w[:h])
    v = tuple(inv[j] for j in reversed(w[h:]))
    if len(u) > cap:
        raise BudgetExceeded(f"relator needs words of length {len(u)} > expansion cap {cap}")
    return u, v


_POOL_STATE: tuple | None = None


def _compare_job(pair):
    ex, store = _POOL_STATE
    return ex.compare(pair[0], pair[1], store)


def _compare_all(ex: Expander, pairs: list[tuple[tuple[int, ...], tuple[int, ...]]],
                 store: RelationStore | None, workers: int) -> list[list[tuple[Hashable, NCPoly]]]:
    """``ex.compare`` over ``pairs``; results come back in input order."""
    if workers <= 1 or len(pairs) < 2:
        return [ex.compare(w1, w2, store) for w1, w2 in pairs]
    import multiprocessing as mp
    global _POOL_STATE
    _POOL_STATE = (ex, store)
    try:
        ctx = mp.get_context("fork")
        with ctx.Pool(workers) as pool:
            return pool.map(_compare_job, pairs, chunksize=max(1, len(pairs) // (4 * workers)))
    finally:
        _POOL_STATE = None


def relator_relations(p: GroupPresentation, ex: Expander,
                      store: RelationStore | None = None,
                      extra: Sequence[tuple[tuple[int, ...], tuple[int, ...]]] = (),
                      cap: int | None = None, workers: int = 1) -> list[tuple[NCPoly, str]]:
    """Coefficient differences of both sides of every relator (and ``extra`` identity)."""
    inv = ex.F.inv
    jobs: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    labels: list[str] = []
    for r in p.relators:
        w1, w2 = ex.s_word(r.lhs), ex.s_word(r.rhs)
        if cap is not None:
            w1, w2 = fit_to_cap(w1, w2, inv, cap)
        jobs.append((w1, w2))
        labels.append(f"relator {p.render_word(r.lhs)} = {p.render_word(r.rhs)}")
    for w1, w2 in extra:
        jobs.append((w1, w2))
        labels.append("auxiliary " + _render_s(ex.F, w1) + " = " + _render_s(ex.F, w2))
    out = []
    for label, diffs in zip(labels, _compare_all(ex, jobs, store, workers)):
        out.extend((d, label) for _, d in diffs)
    return out


def _render_s(F: FundamentalMatrix, w: Sequence[int]) -> str:
    return " ".join(F.s_names[i] for i in w) or "1"


def default_aux_length(p: GroupPresentation, cap: int) -> int:
    """Two less than the longest relator that is not a power of one letter, at least 4."""
    longest = 0
    for r in p.relators:
        w = p.reduce(r.as_word())
        if len({g for g, _ in w.letters}) > 1:
            longest = max(longest, len(w))
    return max(4, min(cap, longest - 2))


def auxiliary_relators(F: FundamentalMatrix, wp: WordProblem, short: int = 2,
                       length: int = 4) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Backend-verified identities ``w1 = w2`` with ``|w1| <= short < |w2| <= length``.

    ``w1`` is the shortlex-first word of its element; both words are freely
    reduced S-words.
    """
    inv = F.inv
    N = F.size
    by_elem: dict[Hashable, list[tuple[int, ...]]] = {}
    layer: list[tuple[tuple[int, ...], Hashable]] = [((), wp.identity)]
    for L in range(length + 1):
        for w, x in layer:
            by_elem.setdefault(x, []).append(w)
        if L == length:
            break
        nxt = []
        for w, x in layer:
            for i in range(N):
                if w and inv[w[-1]] == i:
                    continue
                nxt.append((w + (i,), wp.mul(x, wp.s_elements[i])))
        layer = nxt
    out = []
    for x, words in by_elem.items():
        first = words[0]
        if len(first) > short:
            continue
        for w in words[1:]:
            if len(w) > short:
                out.append((first, w))
    out.sort(key=lambda pr: (len(pr[0]) + len(pr[1]), pr))
    return out


# -- pipeline -------------------------------------------------------------------

@dataclass
class PipelineResult:
    presentation: GroupPresentation
    matrix: FundamentalMatrix
    word_problem: WordProblem
    store: RelationStore
    derived: RelationStore
    partition_sums: list[NCPoly]
    emitted: list[tuple[NCPoly, str]]
    saturations: list[SaturationResult]
    aux: list[tuple[tuple[int, ...], tuple[int, ...]]]
    unit_stage: RelationStore | None = None
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return all(s.complete for s in self.saturations)


def parse_assumption(text: str, F: FundamentalMatrix) -> list[NCPoly]:
    return parse_relations(text, F.alphabet)


def run_pipeline(p: GroupPresentation, config: PipelineConfig | None = None,
                 log: Callable[[dict], None] | None = None,
                 word_problem: WordProblem | None = None) -> PipelineResult:
    """Unit relations, saturation, relator relations, saturation, then assumptions."""
    cfg = config or PipelineConfig()
    timing: dict[str, float] = {}
    t0 = time.perf_counter()
    wp = word_problem or WordProblem(p, radius_cap=cfg.expansion_cap)
    F = FundamentalMatrix(p)
    ex = Expander(F, wp, cfg.term_budget)
    store = RelationStore(F.alphabet)
    emitted: list[tuple[NCPoly, str]] = []

    def emit(poly: NCPoly, origin: str, unit: bool = False) -> None:
        emitted.append((poly, origin))
        store.add(poly, origin, unit)

    for r in F.structural_relations():
        emit(r, "structural")
    diag, off = F.unitarity()
    for s in diag:
        emit(s - NCPoly.const(1), "unitarity", unit=True)
    for r in off:
        emit(r, "unitarity")
    for r in unit_relations(F, ex):
        emit(r, "unit relation")
    timing["setup"] = time.perf_counter() - t0

    scfg = cfg.saturation_config()
    early = dataclasses.replace(scfg, degree_bound=min(cfg.unit_stage_degree, scfg.degree_bound))
    sats = [saturate(store, diag, early, log)]
    timing["saturate_units"] = sats[-1].seconds
    unit_stage = store.copy()

    t1 = time.perf_counter()
    aux_len = cfg.aux_length if cfg.aux_length is not None else default_aux_length(p, cfg.expansion_cap)
    aux = auxiliary_relators(F, wp, cfg.aux_short, aux_len)
    for poly, label in relator_relations(p, ex, store, aux, cfg.expansion_cap, cfg.workers):
        emit(poly, label)
    timing["relators"] = time.perf_counter() - t1

    sats.append(saturate(store, diag, scfg, log))
    timing["saturate_relators"] = sats[-1].seconds
    derived = store.copy()

    if p.assumptions:
        for spec in p.assumptions:
            for rel in parse_assumption(spec.relation, F):
                store.add_assumption(Assumption(rel, spec.provenance, spec.relation))
        sats.append(saturate(store, diag, scfg, log))
        timing["saturate_assumptions"] = sats[-1].seconds
    timing["total"] = time.perf_counter() - t0
    return PipelineResult(p, F, wp, store, derived, diag, emitted, sats, aux, unit_stage, timing)
