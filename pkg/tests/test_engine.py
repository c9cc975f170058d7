import itertools

import pytest
from hypothesis import given, strategies as st

from _support import PROPERTY, pipeline, presentation
from qig.algebra.poly import NCPoly
from qig.algebra.store import RelationStore
from qig.engine import (Expander, FundamentalMatrix, PipelineConfig, fit_to_cap, relator_relations,
                        run_pipeline, unit_relations)
from qig.groups import BudgetExceeded, WordProblem
from qig.presentation import parse_presentation

NAMES = ["braid2", "braid3", "lamplighter", "z2z2xz2", "z4z4", "z4z4z4", "z9z3"]


def _setup(name):
    p = presentation(name)
    F = FundamentalMatrix(p)
    wp = WordProblem(p)
    return p, F, wp, Expander(F, wp)


def _coefficient(name, lhs, rhs, at, store=None) -> str | None:
    p, F, wp, ex = _setup(name)
    target = wp.evaluate(p.word(at))
    for k, d in ex.compare(ex.s_word(p.word(lhs)), ex.s_word(p.word(rhs)), store):
        if k == target:
            return d.to_str(F.alphabet)
    return None


def test_b4_matrix_aliases():
    F = FundamentalMatrix(presentation("braid3"))
    rows = F.render()
    assert rows[0] == list("ABCDEF")
    assert rows[1] == ["B*", "A*", "D*", "C*", "F*", "E*"]
    assert rows[2] == list("GHIJKL")
    assert len(F.alphabet) == 18


def test_single_involution_matrix():
    F = FundamentalMatrix(parse_presentation("generators a\nrelations a^2 = 1\nbackend cyclic(2)"))
    assert F.render() == [["A"]]


def test_lamplighter_matrix():
    F = FundamentalMatrix(presentation("lamplighter"))
    assert F.s_names == ["t", "t^-1", "a"]
    assert F.render() == [["A", "B", "C"], ["B*", "A*", "C*"], ["D", "D*", "E"]]


@pytest.mark.parametrize("name", NAMES)
def test_alias_resolution_consistent(name):
    F = FundamentalMatrix(presentation(name))
    inv = F.inv
    for i in range(F.size):
        for j in range(F.size):
            if inv[i] == i and inv[j] == j:
                continue
            assert F.entry(inv[i], inv[j]) == F.entry(i, j) ^ 1


def test_expand_identity_word():
    _, _, wp, ex = _setup("braid2")
    e = ex.expand(())
    assert list(e.terms) == [wp.identity] and e.terms[wp.identity] == NCPoly.const(1)


def test_expand_power_with_relations():
    p, F, wp, ex = _setup("z9z3")
    al = F.alphabet
    R = RelationStore(al)
    for t in ("E", "F", "G H", "H G"):
        R.add(al.poly(t))
    e = ex.expand(ex.s_word(p.word("g^4")), R)
    assert e.terms == {wp.evaluate(p.word("g^4")): al.poly("G G G G"),
                       wp.evaluate(p.word("g^-4")): al.poly("H H H H")}


def test_unit_coefficient_of_free_product():
    assert _coefficient("z4z4", "a1 a1^-1", "", "1") == "D D* + C C* + B B* + A A* - 1"


def test_relator_coefficients_b4():
    assert _coefficient("braid3", "a c", "c a", "a a") == "-M A + A M"
    assert _coefficient("braid3", "a b a", "b a b", "a b^-1 a") == "-G D G + A J A"
    assert _coefficient("braid3", "a a^-1", "", "a c^-1") == "F B* + A E*"


def test_unit_relation_involutive_square():
    assert _coefficient("z2z2xz2", "a a", "", "a c") == "A C"


def test_trivial_relator_emits_nothing():
    p = parse_presentation("generators a\nrelations a = a\nbackend cyclic(0)")
    F = FundamentalMatrix(p)
    ex = Expander(F, WordProblem(p))
    assert relator_relations(p, ex) == []


def test_fit_to_cap():
    inv = (1, 0)
    assert fit_to_cap((0, 0), (1,), inv, 6) == ((0, 0), (1,))
    assert fit_to_cap((0, 0, 0, 0), (), inv, 2) == ((0, 0), (1, 1))
    with pytest.raises(BudgetExceeded):
        fit_to_cap((0,) * 6, (), inv, 2)


def test_term_budget():
    p, F, wp, _ = _setup("braid3")
    with pytest.raises(BudgetExceeded):
        Expander(F, wp, term_budget=50).expand((0, 2, 4, 0))


@pytest.mark.parametrize("name", NAMES)
def test_structural_trace_preservation(name):
    _, F, wp, ex = _setup(name)
    for i in range(F.size):
        assert wp.identity not in ex.expand((i,)).terms


@pytest.mark.parametrize("name", ["braid2", "lamplighter", "z2z2xz2", "z9z3", "z4z4"])
def test_emitted_relations_reduce_in_final_store(name):
    res = pipeline(name)
    for q in unit_relations(res.matrix, Expander(res.matrix, res.word_problem)):
        assert res.store.reduces_to_zero(q)
    assert all(res.store.reduces_to_zero(q) for q, _ in res.emitted)


def test_assumptions_only_enlarge_the_ideal():
    base = pipeline("lamplighter")
    text = presentation("lamplighter").render() + '\nassume rel "A E = E A" provenance "test hypothesis"\n'
    more = run_pipeline(parse_presentation(text), PipelineConfig())
    assert all(more.store.reduces_to_zero(b) for b in base.store.basis())
    assert more.store.assumptions and more.store.reduces_to_zero(more.matrix.alphabet.poly("A E - E A"))
    assert all(more.derived.reduces_to_zero(b) for b in base.derived.basis())


def test_pipeline_reports_stages():
    res = pipeline("braid3")
    assert len(res.saturations) == 3 and res.complete
    assert res.unit_stage is not None and len(res.unit_stage) <= len(res.derived)


# -- expansion homomorphism against a brute-force expansion -----------------

_CTX = {}


def _ctx(name):
    if name not in _CTX:
        _CTX[name] = _setup(name)
    return _CTX[name]


def _brute_expand(F, wp, word):
    """Sum over every choice of columns, no collection shortcuts."""
    out: dict = {}
    for cols in itertools.product(range(F.size), repeat=len(word)):
        x = wp.evaluate_s(cols)
        m = NCPoly.mono(tuple(F.entry(i, j) for i, j in zip(word, cols)))
        out[x] = out.get(x, NCPoly()) + m
    return {k: v for k, v in out.items() if v}


def _collect_product(wp, e1, e2):
    out: dict = {}
    for x, p in e1.items():
        for y, q in e2.items():
            z = wp.mul(x, y)
            out[z] = out.get(z, NCPoly()) + p * q
    return {k: v for k, v in out.items() if v}


@st.composite
def word_pairs(draw):
    name = draw(st.sampled_from(NAMES))
    _, F, _, _ = _ctx(name)
    total = draw(st.integers(0, 5))
    k = draw(st.integers(0, total))
    letters = st.integers(0, F.size - 1)
    w1 = tuple(draw(st.lists(letters, min_size=k, max_size=k)))
    w2 = tuple(draw(st.lists(letters, min_size=total - k, max_size=total - k)))
    return name, w1, w2


@PROPERTY
@given(word_pairs())
def test_expansion_homomorphism(case):
    name, w1, w2 = case
    _, F, wp, ex = _ctx(name)
    whole = ex.expand(w1 + w2).terms
    assert whole == _collect_product(wp, ex.expand(w1).terms, ex.expand(w2).terms)
    if len(w1 + w2) <= 3:
        assert whole == _brute_expand(F, wp, w1 + w2)
    for x in whole:
        assert wp.word_length(x) <= len(w1 + w2)
