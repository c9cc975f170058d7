"""Exact multiplication for the group families the engine needs.

Every backend works on its own *local* generators ``0 .. ngens-1`` and on
hashable canonical element data: two products are equal in the group iff
their canonical data compare equal.  The data formats are

* ``Cyclic``        -- an int modulo ``m`` (``m == 0`` is the integers)
* ``FreeProduct``   -- tuple of syllables ``(factor, element)``
* ``DirectProduct`` -- tuple of component elements
* ``Semidirect``    -- ``(x, y)`` standing for ``g^x h^y``
* ``Lamplighter``   -- ``(sorted lit positions, shift)``
* ``Braid``         -- ``(infimum, permutation braids)``, left-greedy
* ``Rewriting``     -- irreducible string
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Hashable, Sequence

Element = Hashable


class Backend:
    ngens: int = 0
    names: tuple[str, ...] | None = None

    def identity(self) -> Element:
        raise NotImplementedError

    def letter(self, k: int, e: int) -> Element:
        raise NotImplementedError

    def mul(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def leaves(self) -> list["Backend"]:
        return [self]

    def describe(self) -> str:
        raise NotImplementedError


class Cyclic(Backend):
    def __init__(self, m: int, names: Sequence[str] | None = None):
        if m < 0:
            raise ValueError("cyclic order must be >= 0")
        self.m = m
        self.ngens = 1
        self.names = tuple(names) if names else None

    def identity(self):
        return 0

    def letter(self, k, e):
        return e % self.m if self.m else e

    def mul(self, x, y):
        return (x + y) % self.m if self.m else x + y

    def describe(self):
        return f"cyclic({self.m})"


class FreeProduct(Backend):
    def __init__(self, factors: Sequence[Backend]):
        self.factors = list(factors)
        self.offsets = []
        off = 0
        for f in self.factors:
            self.offsets.append(off)
            off += f.ngens
        self.ngens = off
        self._ids = [f.identity() for f in self.factors]

    def leaves(self):
        return [leaf for f in self.factors for leaf in f.leaves()]

    def identity(self):
        return ()

    def _route(self, k: int) -> tuple[int, int]:
        for i in range(len(self.factors) - 1, -1, -1):
            if k >= self.offsets[i]:
                return i, k - self.offsets[i]
        raise IndexError(k)

    def letter(self, k, e):
        i, kk = self._route(k)
        x = self.factors[i].letter(kk, e)
        return () if x == self._ids[i] else ((i, x),)

    def mul(self, x, y):
        out = list(x)
        for syl in y:
            if out and out[-1][0] == syl[0]:
                i = syl[0]
                z = self.factors[i].mul(out[-1][1], syl[1])
                out.pop()
                if z != self._ids[i]:
                    out.append((i, z))
            else:
                out.append(syl)
        return tuple(out)

    def symmetric_merge_ok(self) -> bool:
        return True

    def describe(self):
        return "freeprod(" + ",".join(f.describe() for f in self.factors) + ")"


class DirectProduct(Backend):
    def __init__(self, factors: Sequence[Backend]):
        self.factors = list(factors)
        self.offsets = []
        off = 0
        for f in self.factors:
            self.offsets.append(off)
            off += f.ngens
        self.ngens = off

    def leaves(self):
        return [leaf for f in self.factors for leaf in f.leaves()]

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def letter(self, k, e):
        for i in range(len(self.factors) - 1, -1, -1):
            if k >= self.offsets[i]:
                comp = list(self.identity())
                comp[i] = self.factors[i].letter(k - self.offsets[i], e)
                return tuple(comp)
        raise IndexError(k)

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def describe(self):
        return "product(" + ",".join(f.describe() for f in self.factors) + ")"


class Semidirect(Backend):
    """``Z_m x| Z_n`` with ``h^-1 g h = g^u``; local generators ``g = 0, h = 1``."""

    def __init__(self, m: int, n: int, u: int, names: Sequence[str] | None = None):
        if m < 1 or n < 1:
            raise ValueError("semidirect orders must be positive")
        if pow(u, n, m) != 1 % m:
            raise ValueError(f"multiplier {u} does not satisfy u^{n} = 1 mod {m}")
        self.m, self.n, self.u = m, n, u
        self.v = pow(u, -1, m)  # h g h^-1 = g^v
        self.ngens = 2
        self.names = tuple(names) if names else None

    def identity(self):
        return (0, 0)

    def letter(self, k, e):
        return (e % self.m, 0) if k == 0 else (0, e % self.n)

    def mul(self, x, y):
        # h^y1 g^x2 = g^(x2 v^y1) h^y1
        x1, y1 = x
        x2, y2 = y
        return ((x1 + x2 * pow(self.v, y1, self.m)) % self.m, (y1 + y2) % self.n)

    def describe(self):
        return f"semidirect({self.m},{self.n},{self.u})"


class Lamplighter(Backend):
    """``Z_2 wr Z``; local generators ``lamp = 0``, ``shift = 1``."""

    def __init__(self, names: Sequence[str] | None = None):
        self.ngens = 2
        self.names = tuple(names) if names else None

    def identity(self):
        return ((), 0)

    def letter(self, k, e):
        return ((0,), 0) if k == 0 else ((), e)

    def mul(self, x, y):
        lamps1, p1 = x
        lamps2, p2 = y
        lit = set(lamps1)
        lit.symmetric_difference_update(q + p1 for q in lamps2)
        return (tuple(sorted(lit)), p1 + p2)

    def describe(self):
        return "lamplighter"


# -- braid groups via Garside normal form ------------------------------------

Perm = tuple[int, ...]


def _compose(p: Perm, q: Perm) -> Perm:
    return tuple(p[i] for i in q)


def _inversions(p: Perm) -> int:
    n = len(p)
    return sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])


@lru_cache(maxsize=None)
def _transposition(n: int, i: int) -> Perm:
    p = list(range(n))
    p[i], p[i + 1] = p[i + 1], p[i]
    return tuple(p)


@lru_cache(maxsize=None)
def _right_descents(p: Perm) -> frozenset[int]:
    # i is a right descent iff l(p s_i) < l(p)  <=>  p[i] > p[i+1]
    return frozenset(i for i in range(len(p) - 1) if p[i] > p[i + 1])


@lru_cache(maxsize=None)
def _left_descents(p: Perm) -> frozenset[int]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return _right_descents(tuple(inv))


class Braid(Backend):
    """Artin braid group ``B_n``; local generator ``k`` is ``sigma_{k+1}``.

    Elements are ``Delta^inf * x_1 ... x_r`` with each ``x_i`` a proper,
    non-trivial permutation braid and every pair ``(x_i, x_{i+1})``
    left-weighted.
    """

    def __init__(self, n: int, names: Sequence[str] | None = None):
        if n < 2:
            raise ValueError("braid group needs n >= 2")
        self.n = n
        self.ngens = n - 1
        self.names = tuple(names) if names else None
        self.delta: Perm = tuple(range(n - 1, -1, -1))
        self.e: Perm = tuple(range(n))

    def identity(self):
        return (0, ())

    def _tau(self, p: Perm) -> Perm:
        return _compose(_compose(self.delta, p), self.delta)

    def letter(self, k, e):
        s = _transposition(self.n, k)
        if e > 0:
            return (0, (s,))
        # sigma^-1 = Delta^-1 (Delta sigma^-1), and Delta s_k is a simple element
        return self._normalize(-1, [_compose(self.delta, s)])

    def mul(self, x, y):
        i1, l1 = x
        i2, l2 = y
        if i2 % 2:
            l1 = tuple(self._tau(p) for p in l1)
        return self._normalize(i1 + i2, list(l1) + list(l2))

    def _normalize(self, inf: int, factors: list[Perm]) -> tuple[int, tuple[Perm, ...]]:
        changed = True
        while changed:
            changed = False
            for k in range(len(factors) - 1):
                a, b = factors[k], factors[k + 1]
                moved = False
                while True:
                    movable = _left_descents(b) - _right_descents(a)
                    if not movable:
                        break
                    i = min(movable)
                    s = _transposition(self.n, i)
                    a = _compose(a, s)
                    b = _compose(s, b)
                    moved = True
                if moved:
                    factors[k], factors[k + 1] = a, b
                    changed = True
        out = [p for p in factors]
        while out and out[0] == self.delta:
            out.pop(0)
            inf += 1
        while out and out[-1] == self.e:
            out.pop()
        return (inf, tuple(out))

    def describe(self):
        return f"braid({self.n})"


# -- rewriting systems ---------------------------------------------------------

def _shortlex_key(order: dict[str, int]):
    return lambda w: (len(w), [order[c] for c in w])


def find_shortlex_order(rules: Sequence[tuple[str, str]]) -> dict[str, int] | None:
    """A letter order making every rule strictly shortlex-decreasing, if any."""
    letters = sorted({c for l, r in rules for c in l + r})
    if all(len(l) > len(r) for l, r in rules):
        return {c: i for i, c in enumerate(letters)}
    if len(letters) > 8:
        order = {c: i for i, c in enumerate(letters)}
        key = _shortlex_key(order)
        return order if all(key(l) > key(r) for l, r in rules) else None
    for perm in permutations(letters):
        order = {c: i for i, c in enumerate(perm)}
        key = _shortlex_key(order)
        if all(key(l) > key(r) for l, r in rules):
            return order
    return None


def rewrite(word: str, rules: Sequence[tuple[str, str]]) -> str:
    """Leftmost-innermost rewriting to an irreducible string."""
    while True:
        best = None
        for l, r in rules:
            i = word.find(l)
            if i >= 0 and (best is None or i < best[0]):
                best = (i, l, r)
        if best is None:
            return word
        i, l, r = best
        word = word[:i] + r + word[i + len(l):]


def kb_check(rules: Sequence[tuple[str, str]]) -> dict:
    """Critical-pair test of local confluence for a terminating string system.

    Returns ``{"confluent": bool, "terminating": bool, "pair": ...}`` where
    ``pair`` names the first unresolved overlap and its two normal forms.
    """
    rules = [(l, r) for l, r in rules]
    order = find_shortlex_order(rules)
    if order is None:
        return {"confluent": False, "terminating": False, "pair": None}
    for a, (l1, r1) in enumerate(rules):
        for b, (l2, r2) in enumerate(rules):
            # overlap: proper suffix of l1 equals prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    word = l1 + l2[k:]
                    x = rewrite(r1 + l2[k:], rules)
                    y = rewrite(l1[:-k] + r2, rules)
                    if x != y:
                        return {"confluent": False, "terminating": True, "pair": (word, x, y)}
            # inclusion: l2 inside l1
            if a != b and len(l2) <= len(l1):
                start = l1.find(l2)
                while start >= 0:
                    x = rewrite(r1, rules)
                    y = rewrite(l1[:start] + r2 + l1[start + len(l2):], rules)
                    if x != y:
                        return {"confluent": False, "terminating": True, "pair": (l1, x, y)}
                    start = l1.find(l2, start + 1)
    return {"confluent": True, "terminating": True, "pair": None}


class Rewriting(Backend):
    """Confluent shortlex rewriting; inverse of letter ``x`` is ``X``."""

    def __init__(self, rules: Sequence[tuple[str, str]], names: Sequence[str],
                 involutive: Sequence[bool] = ()):
        self.names = tuple(names)
        self.ngens = len(self.names)
        for nm in self.names:
            if len(nm) != 1 or not nm.islower():
                raise ValueError("rewriting backends need single lowercase-letter generators")
        full = list(rules)
        for k, nm in enumerate(self.names):
            if not (k < len(involutive) and involutive[k]):
                for l, r in ((nm + nm.upper(), ""), (nm.upper() + nm, "")):
                    if (l, r) not in full:
                        full.append((l, r))
        report = kb_check(full)
        if not report["confluent"]:
            raise ValueError(f"rewriting system rejected: {report}")
        self.rules = full
        self.involutive = tuple(involutive)

    def identity(self):
        return ""

    def letter(self, k, e):
        nm = self.names[k]
        return rewrite(nm if e > 0 else nm.upper(), self.rules)

    def mul(self, x, y):
        return rewrite(x + y, self.rules)

    def describe(self):
        return "rewriting{" + ", ".join(f'"{l}"->"{r}"' for l, r in self.rules) + "}"
