"""Relation basis with leading-monomial rewriting.

Each basis element is stored as a rule ``lm -> tail`` meaning ``lm - tail = 0``
with ``tail`` strictly below ``lm``.  Rules whose tail is empty are monomial
zeros.  Normal forms of monomials are memoized and the memo is dropped
whenever the basis changes.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable

from .poly import Q, Alphabet, Mono, NCPoly, Terms, add_terms, deglex

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

ONE: Mono = ()


@dataclass(frozen=True)
class Assumption:
    relation: NCPoly
    provenance: str
    text: str = ""

    def __post_init__(self):
        if not self.provenance:
            raise ValueError("assumption needs a provenance string")


@dataclass
class Rule:
    lm: Mono
    tail: Terms
    origin: str
    unit: bool = False

    def poly(self) -> NCPoly:
        t = {m: -c for m, c in self.tail.items()}
        t[self.lm] = Q(1)
        return NCPoly._raw(t)


class Inconsistent(RuntimeError):
    """The ideal contains 1."""


class RelationStore:
    """Two-sided ideal basis over an alphabet, plus normality and zero bookkeeping."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.rules: dict[Mono, Rule] = {}
        self.normal: set[int] = set()  # symbol indices
        self.assumptions: list[Assumption] = []
        self.incomplete: list[str] = []
        self.parked: set[Mono] = set()
        self._lengths: list[int] = []
        self._memo: dict[Mono, Terms] = {}
        self._memo_nu: dict[Mono, Terms] = {}
        self.version = 0

    # -- basis maintenance ---------------------------------------------------

    def _changed(self) -> None:
        self._memo.clear()
        self._memo_nu.clear()
        self._lengths = sorted({len(m) for m in self.rules})
        self.version += 1

    def copy(self) -> "RelationStore":
        out = RelationStore(self.alphabet)
        out.rules = {m: Rule(r.lm, dict(r.tail), r.origin, r.unit) for m, r in self.rules.items()}
        out.normal = set(self.normal)
        out.assumptions = list(self.assumptions)
        out.incomplete = list(self.incomplete)
        out.parked = set(self.parked)
        out._changed()
        return out

    @classmethod
    def from_rules(cls, alphabet: Alphabet, rules: Iterable[tuple[NCPoly, str, bool]]) -> "RelationStore":
        """Rebuild a store from an already reduced basis, rule for rule."""
        out = cls(alphabet)
        for p, origin, unit in rules:
            lm, c = p.leading()
            out.rules[lm] = Rule(lm, {m: -v / c for m, v in p.terms.items() if m != lm}, origin, unit)
        out._changed()
        return out

    def add(self, p: NCPoly, origin: str = "input", unit: bool = False) -> list[Mono]:
        """Insert ``p = 0``; returns the leading monomials of new rules.

        Rules made reducible by the new leading monomial are taken out and
        re-inserted, so the set of leading monomials stays an antichain.
        """
        new: list[Mono] = []
        queue: list[tuple[Terms, str, bool]] = [(p.terms, origin, unit)]
        while queue:
            terms, org, un = queue.pop()
            t = self.reduce_terms(terms)
            if not t:
                continue
            lm = max(t, key=deglex)
            if lm == ONE:
                raise Inconsistent(f"relation from {org} reduces to a nonzero constant")
            c = t[lm]
            tail = {m: -v / c for m, v in t.items() if m != lm}
            displaced = [m for m in self.rules if len(m) > len(lm) and _contains(m, lm)]
            for m in displaced:
                r = self.rules.pop(m)
                queue.append((r.poly().terms, r.origin, r.unit))
            self.rules[lm] = Rule(lm, tail, org, un)
            new.append(lm)
            self._changed()
        return [m for m in new if m in self.rules]

    def add_many(self, polys: Iterable[NCPoly], origin: str = "input", unit: bool = False) -> list[Mono]:
        out: list[Mono] = []
        for p in polys:
            out.extend(self.add(p, origin, unit))
        return [m for m in dict.fromkeys(out) if m in self.rules]

    def add_assumption(self, a: Assumption) -> None:
        self.assumptions.append(a)
        self.add(a.relation, origin="assumption: " + a.provenance)

    def interreduce_tails(self) -> None:
        """Rewrite every tail to normal form (leading monomials are untouched)."""
        for lm in sorted(self.rules, key=deglex):
            r = self.rules[lm]
            r.tail = self.reduce_terms(r.tail)
        self._changed()

    # -- reduction -----------------------------------------------------------

    def _nf_mono(self, m: Mono, units: bool) -> Terms:
        memo = self._memo if units else self._memo_nu
        hit = memo.get(m)
        if hit is not None:
            return hit
        rules = self.rules
        n = len(m)
        found = None
        for L in self._lengths:
            if L > n:
                break
            for i in range(n - L + 1):
                r = rules.get(m[i:i + L])
                if r is not None and (units or not r.unit):
                    found = (i, L, r)
                    break
            if found:
                break
        if found is None:
            out = {m: Q(1)}
        else:
            i, L, r = found
            pre, post = m[:i], m[i + L:]
            out = {}
            for tm, tc in r.tail.items():
                sub = self._nf_mono(pre + tm + post, units)
                for k, v in sub.items():
                    x = out.get(k, 0) + tc * v
                    if x:
                        out[k] = x
                    else:
                        out.pop(k, None)
        memo[m] = out
        return out

    def reduce_terms(self, terms: Terms, units: bool = True) -> Terms:
        out: Terms = {}
        for m, c in terms.items():
            for k, v in self._nf_mono(m, units).items():
                x = out.get(k, 0) + c * v
                if x:
                    out[k] = x
                else:
                    out.pop(k, None)
        return out

    def reduce(self, p: NCPoly, units: bool = True) -> NCPoly:
        """Normal form; with ``units=False`` rules flagged as unit identities are skipped."""
        return NCPoly._raw(self.reduce_terms(p.terms, units))

    def reduces_to_zero(self, p: NCPoly) -> bool:
        return not self.reduce_terms(p.terms)

    def is_reducible(self, m: Mono) -> bool:
        n = len(m)
        for L in self._lengths:
            if L > n:
                break
            for i in range(n - L + 1):
                if m[i:i + L] in self.rules:
                    return True
        return False

    # -- queries -------------------------------------------------------------

    def is_zero_atom(self, a: int) -> bool:
        return not self._nf_mono((a,), True)

    def zero_symbols(self) -> list[int]:
        return [s for s in range(len(self.alphabet)) if self.is_zero_atom(2 * s)]

    def basis(self) -> list[NCPoly]:
        """Basis polynomials in canonical order (by leading monomial)."""
        return [self.rules[m].poly() for m in sorted(self.rules, key=deglex)]

    def __len__(self) -> int:
        return len(self.rules)

    def describe(self, p: NCPoly) -> str:
        return p.to_str(self.alphabet)


def _contains(m: Mono, sub: Mono) -> bool:
    L = len(sub)
    for i in range(len(m) - L + 1):
        if m[i:i + L] == sub:
            return True
    return False


def add_polys(a: NCPoly, b: NCPoly) -> NCPoly:
    return NCPoly._raw(add_terms(a.terms, b.terms, 1))
