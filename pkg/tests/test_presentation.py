import pytest
from hypothesis import given, strategies as st

from _support import PROPERTY, PRESENTATIONS, presentation
from qig.presentation import (FreeWord, ParseError, PresentationError, free_reduce, parse_presentation,
                              symmetric_index)


def test_b4_presentation():
    p = parse_presentation("generators a b c; relations a c = c a, a b a = b a b, c b c = b c b")
    assert p.names == ("a", "b", "c")
    assert not any(p.involutive)
    idx = symmetric_index(p)
    assert len(idx) == 6
    assert idx.inv == (1, 0, 3, 2, 5, 4)


def test_single_involution():
    p = parse_presentation("generators a; relations a a = 1")
    assert p.involutive == (True,)
    idx = symmetric_index(p)
    assert len(idx) == 1 and idx.inv == (0,)


def test_semidirect_presentation():
    p = parse_presentation("generators g h; relations g^9 = 1, h^3 = 1, h^-1 g h = g^4")
    assert len(symmetric_index(p)) == 4
    r = p.relators[0]
    assert len(r.lhs) == 9 and len(r.rhs) == 0  # powers expand eagerly


def test_lamplighter_ordering():
    p = presentation("lamplighter")
    idx = symmetric_index(p)
    t, a = p.gen_index("t"), p.gen_index("a")
    assert idx.letters == ((t, 1), (t, -1), (a, 1))
    assert idx.inv == (1, 0, 2)


@pytest.mark.parametrize("word,expected", [
    (((0, 1), (0, -1), (1, 1)), ((1, 1),)),
    ((), ()),
])
def test_free_reduce_examples(word, expected):
    assert free_reduce(FreeWord(word)).letters == expected


def test_free_reduce_involutive():
    w = FreeWord(((0, -1), (1, 1)))
    assert free_reduce(w, (True, False)).letters == ((0, 1), (1, 1))


def test_relator_single_word_form():
    p = parse_presentation("generators a b; relations a b a = b a b")
    w = p.reduce(p.relators[0].as_word())
    assert p.render_word(w) == "a b a b^-1 a^-1 b^-1"


def test_assumption_and_backend_roundtrip():
    p = presentation("braid3")
    assert p.backend_text == "braid(4)"
    assert len(p.assumptions) == 1
    assert p.assumptions[0].provenance
    assert parse_presentation(p.render()) == p


@pytest.mark.parametrize("src,line,col", [
    ("generators a b\nrelations a^2 = = 1", 2, 17),
    ("generators a a", 1, 14),
    ("generators a\nrelations b = 1", 2, 11),
    ("relations a = 1", 1, 1),
    ("generators a\nassume rel \"A\" provenance \"\"", 2, 16),
])
def test_parse_errors_carry_location(src, line, col):
    with pytest.raises((ParseError, PresentationError)) as ei:
        parse_presentation(src)
    if isinstance(ei.value, ParseError):
        assert (ei.value.line, ei.value.col) == (line, col)


def test_optional_group_header():
    p = parse_presentation("generators x\nrelations x^3 = 1")
    assert p.name == "G"


@pytest.mark.parametrize("path", sorted(PRESENTATIONS.glob("*.grp")), ids=lambda p: p.stem)
def test_shipped_presentations_roundtrip(path):
    p = parse_presentation(path.read_text())
    assert parse_presentation(p.render()) == p
    assert parse_presentation(p.render()).render() == p.render()


letters = st.tuples(st.integers(0, 2), st.sampled_from([1, -1]))
words = st.lists(letters, max_size=20).map(lambda ls: FreeWord(tuple(ls)))
flags = st.tuples(st.booleans(), st.booleans(), st.booleans())


@PROPERTY
@given(words, flags)
def test_free_reduce_idempotent(w, inv):
    once = free_reduce(w, inv)
    assert free_reduce(once, inv) == once
    assert len(once) <= len(w)


@PROPERTY
@given(words)
def test_free_reduce_inverse_cancels(w):
    assert free_reduce(w * w.inverse()).letters == ()


@PROPERTY
@given(flags)
def test_inv_is_involution_fixing_involutive(inv):
    rels = ", ".join(f"{g}^2 = 1" for g, f in zip("abc", inv) if f)
    src = "generators a b c" + (f"\nrelations {rels}" if rels else "")
    p = parse_presentation(src)
    idx = symmetric_index(p)
    assert all(idx.inv[idx.inv[i]] == i for i in range(len(idx)))
    fixed = {idx.letters[i][0] for i in range(len(idx)) if idx.inv[i] == i}
    assert fixed == {k for k, f in enumerate(inv) if f}


def _render_src(gens, rels):
    names = [f"g{i}" for i in range(gens)]
    parts = []
    for lhs, rhs in rels:
        side = lambda w: " ".join(names[g] + ("" if e == 1 else "^-1") for g, e in w) or "1"
        parts.append(f"{side(lhs)} = {side(rhs)}")
    src = "group T\ngenerators " + " ".join(names)
    if parts:
        src += "\nrelations " + ", ".join(parts)
    return src


@st.composite
def presentations(draw):
    n = draw(st.integers(1, 3))
    lt = st.tuples(st.integers(0, n - 1), st.sampled_from([1, -1]))
    rels = draw(st.lists(st.tuples(st.lists(lt, max_size=5), st.lists(lt, max_size=5)), max_size=4))
    return _render_src(n, rels)


@PROPERTY
@given(presentations())
def test_parse_render_roundtrip(src):
    p = parse_presentation(src)
    q = parse_presentation(p.render())
    assert q == p
    assert q.render() == p.render()
