"""Presentation-only ball computation, used to cross-check the backends.

Words over S (as S-index tuples, freely reduced) up to a length bound are
joined whenever one is obtained from the other by replacing a piece of a
relator with the inverse of its complement.  The classes containing a word
of length ``<= r`` form the ball; a class's length is its shortest word.
Identifications that need a detour through longer words than the bound are
missed, so the bound must leave some slack above ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..presentation import FreeWord, GroupPresentation, symmetric_index


class OracleBudget(RuntimeError):
    pass


def _reduce(word: tuple[int, ...], inv: tuple[int, ...]) -> tuple[int, ...]:
    out: list[int] = []
    for i in word:
        if out and out[-1] == inv[i]:
            out.pop()
        else:
            out.append(i)
    return tuple(out)


def _cyclic_reduce(word: tuple[int, ...], inv) -> tuple[int, ...]:
    w = list(_reduce(word, inv))
    while len(w) >= 2 and w[0] == inv[w[-1]]:
        w = w[1:-1]
    return tuple(w)


def _to_s(w: FreeWord, p: GroupPresentation, idx) -> tuple[int, ...]:
    lookup = {l: i for i, l in enumerate(idx.letters)}
    out = []
    for g, e in w.letters:
        if p.generators[g].involutive:
            e = 1
        out.append(lookup[(g, e)])
    return tuple(out)


def substitution_rules(p: GroupPresentation) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    idx = symmetric_index(p)
    inv = idx.inv
    rules = set()
    for r in p.relators:
        cyc = _cyclic_reduce(_to_s(r.as_word(), p, idx), inv)
        if not cyc:
            continue
        inverse = tuple(inv[i] for i in reversed(cyc))
        for base in (cyc, inverse):
            n = len(base)
            for rot in range(n):
                w = base[rot:] + base[:rot]
                for k in range(1, n + 1):
                    lhs = w[:k]
                    rhs = tuple(inv[i] for i in reversed(w[k:]))
                    if lhs != rhs:
                        rules.add((lhs, rhs))
    return sorted(rules)


def bfs_oracle(p: GroupPresentation, r: int, slack: int = 3, max_words: int = 2_000_000):
    """Return ``{shortest word: length}`` with one representative word per
    group element of length ``<= r``, computed from the relators alone."""
    idx = symmetric_index(p)
    inv = idx.inv
    n = len(idx)
    bound = r + slack
    words: list[tuple[int, ...]] = [()]
    layer: list[tuple[int, ...]] = [()]
    for _ in range(bound):
        nxt = []
        for w in layer:
            for i in range(n):
                if w and w[-1] == inv[i]:
                    continue
                nxt.append(w + (i,))
        words.extend(nxt)
        layer = nxt
        if len(words) > max_words:
            raise OracleBudget(f"more than {max_words} words at length bound {bound}")
    pos = {w: k for k, w in enumerate(words)}
    parent = list(range(len(words)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        a, b = find(a), find(b)
        if a != b:
            if a > b:
                a, b = b, a
            parent[b] = a

    table: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for lhs, rhs in substitution_rules(p):
        table.setdefault(lhs, []).append(rhs)
    lengths = sorted({len(l) for l in table})
    for k, w in enumerate(words):
        L = len(w)
        for m in lengths:
            if m > L:
                break
            for start in range(L - m + 1):
                rhss = table.get(w[start:start + m])
                if rhss is None:
                    continue
                for rhs in rhss:
                    new = _reduce(w[:start] + rhs + w[start + m:], inv)
                    j = pos.get(new)
                    if j is not None:
                        union(k, j)
    classes: dict[int, tuple[int, ...]] = {}
    for k, w in enumerate(words):
        if len(w) <= r:
            root = find(k)
            best = classes.get(root)
            if best is None or (len(w), w) < (len(best), best):
                classes[root] = w
    return {w: len(w) for w in classes.values()}


@dataclass
class OracleComparison:
    radius: int
    slack: int
    backend_size: int
    oracle_size: int
    mismatches: list[str] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return not self.mismatches


def compare_ball(p: GroupPresentation, wp, r: int, slack: int = 3, max_slack: int = 6) -> OracleComparison:
    """Backend ball of radius ``r`` against :func:`bfs_oracle`: same elements, same lengths.

    The oracle never joins distinct elements, so when its only defect is a
    missed identification the word bound is raised, up to ``max_slack``.
    """
    while True:
        out = _compare_once(p, wp, r, slack)
        missed = all(m.startswith("oracle classes") or m.startswith("backend ball has") for m in out.mismatches)
        if out.agree or not missed or slack >= max_slack:
            return out
        slack += 1


def _compare_once(p: GroupPresentation, wp, r: int, slack: int) -> OracleComparison:
    oracle = bfs_oracle(p, r, slack)
    ball = {g.canonical: g.length for g in wp.ball(r)}
    seen: dict = {}
    bad: list[str] = []
    names = [p.names[g] + ("" if e == 1 or p.generators[g].involutive else "^-1")
             for g, e in symmetric_index(p).letters]
    for w, length in sorted(oracle.items(), key=lambda kv: (kv[1], kv[0])):
        text = " ".join(names[i] for i in w) or "1"
        x = wp.evaluate_s(w)
        if x in seen:
            bad.append(f"oracle classes {seen[x]} and {text} are one element")
            continue
        seen[x] = text
        if x not in ball:
            bad.append(f"{text} missing from the backend ball")
        elif ball[x] != length:
            bad.append(f"{text}: backend length {ball[x]}, oracle length {length}")
    if len(ball) != len(seen):
        bad.append(f"backend ball has {len(ball)} elements, oracle {len(seen)}")
    return OracleComparison(r, slack, len(ball), len(oracle), bad)
