"""Group presentations: the ``.grp`` DSL, free words and the symmetric index.

A presentation lists generators and relators ``w1 = w2``.  A generator is
*involutive* when an order-two relator ``g^2 = 1`` is declared; such a
generator contributes a single element to the symmetric generating set S,
every other generator contributes the pair ``g, g^-1``.

The DSL::

    group B4
    generators a b c
    relations a c = c a, a b a = b a b, c b c = b c b
    backend braid(4)
    assume rel "A Q = Q A" provenance "external lemma"

Statements end at a newline or ``;``.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Letter = tuple[int, int]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSymbol:
    name: str
    involutive: bool = False


@dataclass(frozen=True)
class FreeWord:
    """A word in the generators; letters are ``(generator index, +1 | -1)``."""

    letters: tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((g, -e) for g, e in reversed(self.letters)))

    @classmethod
    def of(cls, letters: Iterable[Letter]) -> "FreeWord":
        return cls(tuple((int(g), int(e)) for g, e in letters))


def free_reduce(w: FreeWord, involutive: Sequence[bool] = ()) -> FreeWord:
    """Cancel ``x x^-1`` pairs to a fixpoint; involutive letters get exponent +1."""
    out: list[Letter] = []
    for g, e in w.letters:
        if g < len(involutive) and involutive[g]:
            e = 1
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        elif out and out[-1] == (g, e) and g < len(involutive) and involutive[g]:
            out.pop()
        else:
            out.append((g, e))
    return FreeWord(tuple(out))


@dataclass(frozen=True)
class Relator:
    lhs: FreeWord
    rhs: FreeWord

    def as_word(self) -> FreeWord:
        """Single-word form ``lhs * rhs^-1`` (not reduced)."""
        return self.lhs * self.rhs.inverse()


@dataclass(frozen=True)
class AssumptionSpec:
    relation: str
    provenance: str


@dataclass(frozen=True)
class SymmetricIndex:
    """The ordering of S used for rows and columns of the fundamental matrix.

    ``letters[i]`` is the S-element at index ``i`` as ``(generator, exponent)``;
    ``inv[i]`` is the index of its inverse.
    """

    letters: tuple[Letter, ...]
    inv: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def index(self, letter: Letter) -> int:
        return self._lookup[letter]

    @property
    def _lookup(self) -> dict[Letter, int]:
        return {l: i for i, l in enumerate(self.letters)}


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[GeneratorSymbol, ...]
    relators: tuple[Relator, ...]
    backend: tuple | None = None
    name: str = "G"
    assumptions: tuple[AssumptionSpec, ...] = ()
    backend_text: str | None = field(default=None, compare=False)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @property
    def involutive(self) -> tuple[bool, ...]:
        return tuple(g.involutive for g in self.generators)

    def gen_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise PresentationError(f"undeclared generator {name!r}") from None

    def reduce(self, w: FreeWord) -> FreeWord:
        return free_reduce(w, self.involutive)

    def word(self, text: str) -> FreeWord:
        """Parse a word such as ``"a b^-1 a"`` against this presentation."""
        toks = _tokenize(text)
        pos = 0
        letters: list[Letter] = []
        while pos < len(toks) and toks[pos].kind != "EOF":
            tok = toks[pos]
            if tok.kind == "INT" and tok.text == "1":
                pos += 1
                continue
            if tok.kind != "IDENT":
                raise ParseError(f"unexpected {tok.text!r} in word", tok.line, tok.col)
            g = self.gen_index(tok.text)
            pos += 1
            power = 1
            if toks[pos].kind == "^":
                power = int(toks[pos + 1].text)
                pos += 2
            letters.extend([(g, 1 if power > 0 else -1)] * abs(power))
        return FreeWord(tuple(letters))

    def render_word(self, w: FreeWord) -> str:
        if not w.letters:
            return "1"
        parts = []
        for g, e in w.letters:
            parts.append(self.names[g] if e == 1 else f"{self.names[g]}^-1")
        return " ".join(parts)

    def render(self) -> str:
        """Canonical DSL text; ``parse_presentation`` reads it back unchanged."""
        lines = [f"group {self.name}", "generators " + " ".join(self.names)]
        if self.relators:
            rels = ", ".join(
                f"{self.render_word(r.lhs)} = {self.render_word(r.rhs)}" for r in self.relators
            )
            lines.append("relations " + rels)
        if self.backend_text:
            lines.append("backend " + self.backend_text)
        for a in self.assumptions:
            lines.append(f"assume rel {_quote(a.relation)} provenance {_quote(a.provenance)}")
        return "\n".join(lines) + "\n"


def symmetric_index(p: GroupPresentation) -> SymmetricIndex:
    """Non-involutive pairs ``(a_i, a_i^-1)`` first, then the involutive generators."""
    letters: list[Letter] = []
    inv: list[int] = []
    for g, sym in enumerate(p.generators):
        if not sym.involutive:
            k = len(letters)
            letters += [(g, 1), (g, -1)]
            inv += [k + 1, k]
    for g, sym in enumerate(p.generators):
        if sym.involutive:
            inv.append(len(letters))
            letters.append((g, 1))
    return SymmetricIndex(tuple(letters), tuple(inv))


# -- lexer ------------------------------------------------------------------

@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n|;)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<arrow>->)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[=,^()\[\]{}*])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind == "nl":
            toks.append(_Tok("NL", val, line, col))
            if val == "\n":
                line += 1
                line_start = m.end()
        elif kind == "string":
            toks.append(_Tok("STRING", _unquote(val), line, col))
        elif kind == "arrow":
            toks.append(_Tok("->", val, line, col))
        elif kind == "int":
            toks.append(_Tok("INT", val, line, col))
        elif kind == "ident":
            toks.append(_Tok("IDENT", val, line, col))
        elif kind == "punct":
            toks.append(_Tok(val, val, line, col))
        pos = m.end()
    toks.append(_Tok("EOF", "", line, pos - line_start + 1))
    return toks


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


# -- parser -----------------------------------------------------------------

_KEYWORDS = {"group", "generators", "relations", "backend", "assume"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> _Tok:
        t = self.tok
        if t.kind != kind:
            raise ParseError(f"expected {what or kind}, found {t.text or 'end of input'!r}", t.line, t.col)
        return self.next()

    def at_end_of_stmt(self) -> bool:
        return self.tok.kind in ("NL", "EOF")

    def parse(self) -> GroupPresentation:
        name = "G"
        gens: list[tuple[str, _Tok]] = []
        raw_rels: list[tuple[list, list, _Tok]] = []
        backend = None
        backend_text = None
        assumptions: list[AssumptionSpec] = []
        seen_header = False
        while self.tok.kind != "EOF":
            if self.tok.kind == "NL":
                self.next()
                continue
            kw = self.expect("IDENT", "a statement keyword")
            if kw.text == "group":
                if seen_header or gens:
                    raise ParseError("misplaced 'group' header", kw.line, kw.col)
                name = self.expect("IDENT", "group name").text
                seen_header = True
            elif kw.text == "generators":
                while not self.at_end_of_stmt():
                    t = self.expect("IDENT", "generator name")
                    if t.text in _KEYWORDS:
                        raise ParseError(f"keyword {t.text!r} used as generator", t.line, t.col)
                    if any(n == t.text for n, _ in gens):
                        raise ParseError(f"duplicate generator {t.text!r}", t.line, t.col)
                    gens.append((t.text, t))
                if not gens:
                    raise ParseError("empty generator list", kw.line, kw.col)
            elif kw.text == "relations":
                while True:
                    start = self.tok
                    lhs = self.parse_word()
                    self.expect("=", "'='")
                    rhs = self.parse_word()
                    raw_rels.append((lhs, rhs, start))
                    if self.tok.kind == ",":
                        self.next()
                        while self.tok.kind == "NL" and self.tok.text == "\n":
                            self.next()
                        continue
                    break
            elif kw.text == "backend":
                start = self.tok
                backend = self.parse_backend()
                end = self.tok
                backend_text = self._slice(start, end).strip()
            elif kw.text == "assume":
                t = self.expect("IDENT", "'rel'")
                if t.text != "rel":
                    raise ParseError("expected 'rel'", t.line, t.col)
                rel = self.expect("STRING", "quoted relation").text
                t = self.expect("IDENT", "'provenance'")
                if t.text != "provenance":
                    raise ParseError("expected 'provenance'", t.line, t.col)
                prov = self.expect("STRING", "quoted provenance").text
                if not prov.strip():
                    raise ParseError("empty provenance", t.line, t.col)
                assumptions.append(AssumptionSpec(rel, prov))
            else:
                raise ParseError(f"unknown statement {kw.text!r}", kw.line, kw.col)
            if not self.at_end_of_stmt():
                t = self.tok
                raise ParseError(f"unexpected {t.text!r}", t.line, t.col)

        if not gens:
            raise ParseError("no generators declared", 1, 1)
        names = [n for n, _ in gens]
        relators = []
        for lhs, rhs, start in raw_rels:
            relators.append(Relator(_resolve(lhs, names), _resolve(rhs, names)))
        involutive = [False] * len(names)

        def norm(w: FreeWord) -> FreeWord:
            return FreeWord(tuple((g, 1 if involutive[g] else e) for g, e in w.letters))

        def square_of(r: Relator) -> int | None:
            for w in (r.as_word(), Relator(norm(r.lhs), norm(r.rhs)).as_word()):
                w = free_reduce(w)
                if len(w) == 2 and w.letters[0] == w.letters[1]:
                    return w.letters[0][0]
            return None

        changed = True
        while changed:  # normalizing one generator can expose another
            changed = False
            for r in relators:
                g = square_of(r)
                if g is not None and not involutive[g]:
                    involutive[g] = changed = True
        generators = tuple(GeneratorSymbol(n, inv) for n, inv in zip(names, involutive))
        out = []
        for r in relators:
            g = square_of(r)
            if g is not None:  # defining relator, kept in the form g g = 1
                out.append(Relator(FreeWord(((g, 1), (g, 1))), FreeWord()))
            else:
                out.append(Relator(norm(r.lhs), norm(r.rhs)))
        relators = out
        return GroupPresentation(
            generators=generators,
            relators=tuple(relators),
            backend=backend,
            name=name,
            assumptions=tuple(assumptions),
            backend_text=backend_text,
        )

    def _slice(self, start: _Tok, end: _Tok) -> str:
        lines = self.text.split("\n")
        if start.line == end.line:
            return lines[start.line - 1][start.col - 1 : end.col - 1]
        first = lines[start.line - 1][start.col - 1 :]
        rest = lines[start.line : end.line - 1]
        return " ".join([first, *rest, lines[end.line - 1][: end.col - 1]])

    def parse_word(self) -> list:
        letters: list = []
        any_tok = False
        while True:
            t = self.tok
            if t.kind == "INT" and t.text == "1":
                self.next()
                any_tok = True
                continue
            if t.kind != "IDENT" or t.text in _KEYWORDS:
                break
            self.next()
            any_tok = True
            power = 1
            if self.tok.kind == "^":
                self.next()
                power = int(self.expect("INT", "exponent").text)
            letters.append((t, power))
        if not any_tok:
            t = self.tok
            raise ParseError(f"expected a word, found {t.text or 'end of input'!r}", t.line, t.col)
        return letters

    def parse_backend(self) -> tuple:
        t = self.expect("IDENT", "backend name")
        if t.text == "rewriting":
            self.expect("{", "'{'")
            rules = []
            while self.tok.kind == "NL":
                self.next()
            while self.tok.kind == "STRING":
                lhs = self.next().text
                self.expect("->", "'->'")
                rhs = self.expect("STRING", "quoted right-hand side").text
                rules.append((lhs, rhs))
                if self.tok.kind == ",":
                    self.next()
                while self.tok.kind == "NL":
                    self.next()
            self.expect("}", "'}'")
            return ("rewriting", tuple(rules), None)
        args: list = []
        if self.tok.kind == "(":
            self.next()
            while self.tok.kind != ")":
                if self.tok.kind == "INT":
                    args.append(int(self.next().text))
                else:
                    args.append(self.parse_backend())
                if self.tok.kind == ",":
                    self.next()
                elif self.tok.kind != ")":
                    bad = self.tok
                    raise ParseError(f"unexpected {bad.text!r} in backend arguments", bad.line, bad.col)
            self.next()
        binding = None
        if self.tok.kind == "[":
            self.next()
            names = []
            while self.tok.kind == "IDENT":
                names.append(self.next().text)
                if self.tok.kind == ",":
                    self.next()
            self.expect("]", "']'")
            binding = tuple(names)
        return (t.text, tuple(args), binding)


def _resolve(raw: list, names: list[str]) -> FreeWord:
    letters: list[Letter] = []
    for tok, power in raw:
        if tok.text not in names:
            raise ParseError(f"undeclared generator {tok.text!r}", tok.line, tok.col)
        g = names.index(tok.text)
        letters.extend([(g, 1 if power > 0 else -1)] * abs(power))
    return FreeWord(tuple(letters))


def parse_presentation(text: str) -> GroupPresentation:
    return _Parser(text).parse()
