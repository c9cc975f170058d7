"""Noncommutative polynomials over an :class:`Alphabet` with rational coefficients.

Monomials are tuples of atom ids; atom ``2*s`` is symbol ``s`` and ``2*s+1``
is its adjoint.  Atom ids are assigned in symbol-key order, so comparing
``(len(m), m)`` is the degree-lexicographic monomial order.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable, Mapping, Sequence
from fractions import Fraction

from gmpy2 import mpq

Mono = tuple[int, ...]
Q = mpq
Coef = type(mpq())
_SCALARS = (int, Fraction, Coef)
Terms = dict[Mono, Coef]

ONE: Mono = ()


def deglex(m: Mono) -> tuple[int, Mono]:
    return (len(m), m)


class Alphabet:
    """Named *-symbols; optional antipode given as an atom -> atom table."""

    def __init__(self, names: Sequence[str], antipode: Sequence[int] | None = None,
                 resolver: Callable[[str], int | None] | None = None):
        self.names = list(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("symbol names must be unique")
        self._index = {n: i for i, n in enumerate(self.names)}
        self.antipode_table = list(antipode) if antipode is not None else None
        self.resolver = resolver

    def __len__(self) -> int:
        return len(self.names)

    @property
    def n_atoms(self) -> int:
        return 2 * len(self.names)

    def atom(self, name: str, star: bool = False) -> int:
        return 2 * self._index[name] + int(star)

    def atom_name(self, a: int) -> str:
        return self.names[a >> 1] + ("*" if a & 1 else "")

    def lookup(self, token: str) -> int | None:
        """Atom for a symbol token, consulting the resolver for aliases."""
        if token in self._index:
            return 2 * self._index[token]
        if self.resolver is not None:
            return self.resolver(token)
        return None

    def mono_str(self, m: Mono) -> str:
        return " ".join(self.atom_name(a) for a in m) if m else "1"

    def poly(self, text: str) -> "NCPoly":
        return parse_poly(text, self)

    def var(self, name: str, star: bool = False) -> "NCPoly":
        return NCPoly({(self.atom(name, star),): mpq(1)})


def star_atom(a: int) -> int:
    return a ^ 1


def adjoint_mono(m: Mono) -> Mono:
    return tuple(a ^ 1 for a in reversed(m))


class NCPoly:
    """Immutable polynomial; ``terms`` never stores zero coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Mono, mpq] | None = None):
        t = {}
        if terms:
            for m, c in terms.items():
                if c:
                    t[tuple(m)] = mpq(c)
        self.terms: Terms = t
        self._hash = None

    @classmethod
    def _raw(cls, terms: Terms) -> "NCPoly":
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "NCPoly":
        return cls({ONE: mpq(c)})

    @classmethod
    def mono(cls, m: Iterable[int], c=1) -> "NCPoly":
        return cls({tuple(m): mpq(c)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, _SCALARS):
            other = NCPoly.const(other)
        return isinstance(other, NCPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __add__(self, other: "NCPoly") -> "NCPoly":
        return NCPoly._raw(add_terms(self.terms, _terms(other), 1))

    __radd__ = __add__

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return NCPoly._raw(add_terms(self.terms, _terms(other), -1))

    def __rsub__(self, other) -> "NCPoly":
        return NCPoly._raw(add_terms(_terms(other), self.terms, -1))

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw({m: -c for m, c in self.terms.items()})

    def __mul__(self, other) -> "NCPoly":
        if isinstance(other, _SCALARS):
            return self.scale(other)
        return NCPoly._raw(mul_terms(self.terms, other.terms))

    def __rmul__(self, other) -> "NCPoly":
        if isinstance(other, _SCALARS):
            return self.scale(other)
        return NCPoly._raw(mul_terms(_terms(other), self.terms))

    def __pow__(self, k: int) -> "NCPoly":
        out = NCPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> "NCPoly":
        c = mpq(c)
        if not c:
            return NCPoly()
        return NCPoly._raw({m: v * c for m, v in self.terms.items()})

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[Mono, mpq]]:
        """Terms in descending monomial order."""
        return sorted(self.terms.items(), key=lambda mc: deglex(mc[0]), reverse=True)

    def leading(self) -> tuple[Mono, mpq]:
        m = max(self.terms, key=deglex)
        return m, self.terms[m]

    def monic(self) -> "NCPoly":
        if not self.terms:
            return self
        _, c = self.leading()
        return self.scale(1 / c)

    def adjoint(self) -> "NCPoly":
        return NCPoly._raw({adjoint_mono(m): c for m, c in self.terms.items()})

    def substitute(self, images: Callable[[int], "NCPoly"]) -> "NCPoly":
        """Algebra map sending atom ``a`` to ``images(a)``."""
        out: Terms = {}
        cache: dict[int, Terms] = {}
        for m, c in self.terms.items():
            acc: Terms = {ONE: c}
            for a in m:
                img = cache.get(a)
                if img is None:
                    img = cache[a] = images(a).terms
                acc = mul_terms(acc, img)
                if not acc:
                    break
            out = add_terms(out, acc, 1)
        return NCPoly._raw(out)

    def to_str(self, alphabet: Alphabet) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            body = alphabet.mono_str(m) if m else ""
            if c == 1 and m:
                s = f"+ {body}"
            elif c == -1 and m:
                s = f"- {body}"
            else:
                sign = "-" if c < 0 else "+"
                s = f"{sign} {abs(c)} {body}".rstrip()
            parts.append(s)
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    def __repr__(self) -> str:
        return f"NCPoly({self.terms!r})"


def _terms(x) -> Terms:
    if isinstance(x, NCPoly):
        return x.terms
    if isinstance(x, _SCALARS):
        return {ONE: mpq(x)} if x else {}
    raise TypeError(f"cannot treat {type(x).__name__} as a polynomial")


def add_terms(a: Terms, b: Terms, sign: int) -> Terms:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def mul_terms(a: Terms, b: Terms) -> Terms:
    out: Terms = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = m1 + m2
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def commutator(x: NCPoly, y: NCPoly) -> NCPoly:
    return x * y - y * x


def antipode(p: NCPoly, alphabet: Alphabet) -> NCPoly:
    """Anti-multiplicative map through the alphabet's atom table."""
    table = alphabet.antipode_table
    if table is None:
        raise ValueError("alphabet has no antipode")
    return NCPoly._raw({tuple(table[a] for a in reversed(m)): c for m, c in p.terms.items()})


# -- parsing ------------------------------------------------------------------

_PTOK = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*(?:\([^()]*\))?)|(?P<op>[-+*^()=]))")


def _ptokens(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _PTOK.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    out.append(("end", ""))
    return out


class _PolyParser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.toks = _ptokens(text)
        self.pos = 0
        self.alphabet = alphabet

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expr(self) -> NCPoly:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = self.term().scale(sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            s = 1 if self.take()[1] == "+" else -1
            acc = acc + self.term().scale(s)
        return acc

    def term(self) -> NCPoly:
        acc = NCPoly.const(1)
        seen = False
        while True:
            kind, val = self.peek()
            if kind == "num":
                self.take()
                acc = acc.scale(mpq(val))
            elif kind == "name" or (kind, val) == ("op", "("):
                acc = acc * self.factor()
            else:
                break
            seen = True
        if not seen:
            raise ValueError(f"expected a term, found {self.peek()[1]!r}")
        return acc

    def factor(self) -> NCPoly:
        kind, val = self.take()
        if kind == "name":
            a = self.alphabet.lookup(val)
            if a is None:
                raise ValueError(f"unknown symbol {val!r}")
            base = NCPoly.mono((a,))
        else:
            base = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError("missing ')'")
        while self.peek() in (("op", "*"), ("op", "^")):
            _, op = self.take()
            if op == "*":
                base = base.adjoint()
            else:
                kind, val = self.take()
                if kind != "num":
                    raise ValueError("exponent must be an integer")
                base = base ** int(val)
        return base


def parse_poly(text: str, alphabet: Alphabet) -> NCPoly:
    """Parse ``"A Q - Q A"``, ``"A* B + 2 C^2"`` or ``"lhs = rhs"`` (as lhs - rhs)."""
    if "=" in text:
        lhs, rhs = text.split("=", 1)
        return parse_poly(lhs, alphabet) - parse_poly(rhs, alphabet)
    p = _PolyParser(text, alphabet)
    out = p.expr()
    if p.peek()[0] != "end":
        raise ValueError(f"trailing input {p.peek()[1]!r}")
    return out


def parse_relations(text: str, alphabet: Alphabet) -> list[NCPoly]:
    """Comma-separated equations, chains allowed: ``"AJ = BI = 0"``."""
    out = []
    for chunk in text.split(","):
        sides = [s for s in chunk.split("=")]
        if len(sides) == 1:
            out.append(parse_poly(sides[0], alphabet))
            continue
        polys = [parse_poly(s, alphabet) for s in sides]
        for a, b in zip(polys, polys[1:]):
            out.append(a - b)
    return out
