"""Block-pattern recognition: doubling and double doubling of the group algebra.

Every checked identity is a polynomial that must reduce to 0 against the
saturated store.  "Nonzero" hypotheses are only checkable as "does not reduce
to 0", and the report says so.  Corner images of the group relators are
taken inside the corner cut out by a central projection ``P = u u*`` of a
pure block entry, so a relator ``w1 = w2`` is checked as ``w1(U) P - w2(U) P``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterator, Sequence

from .algebra.poly import NCPoly, commutator
from .algebra.saturate import SaturationConfig, saturate
from .algebra.store import RelationStore
from .engine import FundamentalMatrix
from .groups.core import WordProblem
from .presentation import GroupPresentation

MAX_S = 12


@dataclass(frozen=True)
class ZeroPattern:
    zero: tuple[tuple[bool, ...], ...]

    @property
    def size(self) -> int:
        return len(self.zero)

    def support(self, i: int) -> list[int]:
        return [j for j, z in enumerate(self.zero[i]) if not z]

    def column_support(self, j: int) -> list[int]:
        return [i for i in range(self.size) if not self.zero[i][j]]

    def max_support(self) -> int:
        rows = max((len(self.support(i)) for i in range(self.size)), default=0)
        cols = max((len(self.column_support(j)) for j in range(self.size)), default=0)
        return max(rows, cols)


def zero_pattern(store: RelationStore, F: FundamentalMatrix) -> ZeroPattern:
    N = F.size
    return ZeroPattern(tuple(tuple(store.is_zero_atom(F.entry(i, j)) for j in range(N)) for i in range(N)))


# -- automorphism candidates ----------------------------------------------------

@dataclass(frozen=True)
class AutomorphismCandidate:
    """Involution ``sigma`` of the S-indices and the generator map it induces."""

    sigma: tuple[int, ...]
    label: str = ""

    def is_identity(self) -> bool:
        return all(i == s for i, s in enumerate(self.sigma))

    def moved(self) -> list[int]:
        return [i for i, s in enumerate(self.sigma) if i != s]

    def compose(self, other: "AutomorphismCandidate") -> tuple[int, ...]:
        return tuple(self.sigma[other.sigma[i]] for i in range(len(self.sigma)))


def describe_sigma(sigma: Sequence[int], F: FundamentalMatrix) -> str:
    p = F.presentation
    parts = []
    for i, (g, e) in enumerate(F.index.letters):
        if e == 1:
            parts.append(f"{p.names[g]}->{F.s_names[sigma[i]]}")
    return ", ".join(parts)


class CandidateError(ValueError):
    pass


def _involutions(inv: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Involutions on range(len(inv)) commuting with ``inv``."""
    N = len(inv)
    sigma = [-1] * N

    def assign(i: int, j: int) -> list[int]:
        # sigma(i) = j forces sigma(j) = i, sigma(inv i) = inv j, sigma(inv j) = inv i
        pairs = [(i, j), (j, i), (inv[i], inv[j]), (inv[j], inv[i])]
        done = []
        for x, y in pairs:
            if sigma[x] == -1:
                if y in (sigma[k] for k in range(N) if k != x):
                    for d in done:
                        sigma[d] = -1
                    return []
                sigma[x] = y
                done.append(x)
            elif sigma[x] != y:
                for d in done:
                    sigma[d] = -1
                return []
        return done or [i]

    def rec(i: int) -> Iterator[tuple[int, ...]]:
        while i < N and sigma[i] != -1:
            i += 1
        if i == N:
            yield tuple(sigma)
            return
        for j in range(N):
            if j in sigma:
                continue
            if (inv[i] == i) != (inv[j] == j):
                continue
            before = list(sigma)
            if not assign(i, j):
                continue
            yield from rec(i + 1)
            sigma[:] = before

    yield from rec(0)


def validate_candidate(sigma: Sequence[int], F: FundamentalMatrix, wp: WordProblem) -> str | None:
    """``None`` when ``sigma`` is an order-two permutation commuting with inversion
    whose generator map respects every relator; otherwise the reason."""
    N = F.size
    inv = F.inv
    if sorted(sigma) != list(range(N)):
        return "not a permutation of S"
    if any(sigma[sigma[i]] != i for i in range(N)):
        return "not an involution"
    if any(sigma[inv[i]] != inv[sigma[i]] for i in range(N)):
        return "does not commute with inversion"
    ex_lookup = {l: i for i, l in enumerate(F.index.letters)}
    p = F.presentation
    for r in p.relators:
        sides = []
        for w in (r.lhs, r.rhs):
            idx = [ex_lookup[(g, 1 if p.generators[g].involutive else e)] for g, e in w.letters]
            sides.append(wp.evaluate_s(sigma[i] for i in idx))
        if sides[0] != sides[1]:
            return f"relator {p.render_word(r.lhs)} = {p.render_word(r.rhs)} not preserved"
    return None


def search_involutions(F: FundamentalMatrix, wp: WordProblem) -> list[AutomorphismCandidate]:
    """All non-identity involutions of S commuting with inversion that induce automorphisms."""
    if F.size > MAX_S:
        raise CandidateError(f"exhaustive search supports |S| <= {MAX_S}, got {F.size}")
    out = []
    for sigma in _involutions(F.inv):
        if all(i == s for i, s in enumerate(sigma)):
            continue
        if validate_candidate(sigma, F, wp) is None:
            out.append(AutomorphismCandidate(sigma, describe_sigma(sigma, F)))
    return out


def parse_candidate(text: str, F: FundamentalMatrix, wp: WordProblem) -> AutomorphismCandidate:
    """Read ``"g->g^-1, h->h"``; unspecified generators are fixed."""
    N = F.size
    sigma = list(range(N))
    lookup = {nm: k for k, nm in enumerate(F.s_names)}
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "->" not in part:
            raise CandidateError(f"expected 'x->y', got {part!r}")
        lhs, rhs = (s.strip().replace(" ", "") for s in part.split("->", 1))
        if lhs not in lookup or rhs not in lookup:
            raise CandidateError(f"unknown generator in {part!r}")
        i, j = lookup[lhs], lookup[rhs]
        sigma[i] = j
        sigma[F.inv[i]] = F.inv[j]
    reason = validate_candidate(sigma, F, wp)
    if reason is not None:
        raise CandidateError(f"{text!r} rejected: {reason}")
    return AutomorphismCandidate(tuple(sigma), describe_sigma(sigma, F))


# -- reports --------------------------------------------------------------------

@dataclass
class Certificate:
    """``poly`` must reduce to 0; ``label`` names the identity it encodes."""

    label: str
    poly: NCPoly
    holds: bool
    assumed: bool = False  # holds only with the declared assumptions


@dataclass
class ConditionResult:
    name: str
    passed: bool
    certificates: list[Certificate] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


@dataclass
class StructureReport:
    kind: str  # doubling | double_doubling | wreath_Zs | unknown
    certification: str  # certified | consistent | none
    witnesses: list[AutomorphismCandidate]
    conditions: list[ConditionResult]
    assumptions_used: list[str]
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


class _Checker:
    def __init__(self, store: RelationStore, F: FundamentalMatrix, baseline: RelationStore | None):
        self.store = store
        self.F = F
        self.A = F.alphabet
        self.baseline = baseline if baseline is not None and store.assumptions else None

    def u(self, i: int, j: int) -> NCPoly:
        return self.F.entry_poly(i, j)

    def cert(self, cond: ConditionResult, label: str, poly: NCPoly) -> None:
        ok = self.store.reduces_to_zero(poly)
        assumed = ok and self.baseline is not None and not self.baseline.reduces_to_zero(poly)
        cond.certificates.append(Certificate(label, poly, ok, assumed))
        if not ok:
            cond.failures.append(f"{label} does not reduce to 0")

    def zero(self, i: int, j: int) -> bool:
        return self.store.is_zero_atom(self.F.entry(i, j))

    def name(self, i: int, j: int) -> str:
        return self.A.atom_name(self.F.entry(i, j))

    # individual condition families

    def support(self, sigmas: Sequence[Sequence[int]]) -> ConditionResult:
        cond = ConditionResult("support", True)
        N = self.F.size
        for i in range(N):
            allowed = {i} | {s[i] for s in sigmas}
            for j in range(N):
                if j in allowed:
                    continue
                self.cert(cond, f"{self.F.entry_name(i, j)} = 0", self.u(i, j))
            for s in sigmas:
                j = s[i]
                if j != i and self.zero(i, j):
                    cond.failures.append(f"{self.F.entry_name(i, j)} reduces to 0 but must be nonzero")
        for i in range(N):
            if self.zero(i, i):
                cond.failures.append(f"{self.F.entry_name(i, i)} reduces to 0 but must be nonzero")
        cond.notes.append("entries required nonzero are only checked as not provably zero")
        cond.passed = not cond.failures
        return cond

    def products_zero(self, name: str, pairs: list[tuple[tuple[int, int], tuple[int, int]]]) -> ConditionResult:
        cond = ConditionResult(name, True)
        for (i, j), (k, l) in pairs:
            x, y = self.u(i, j), self.u(k, l)
            nx, ny = self.name(i, j), self.name(k, l)
            self.cert(cond, f"{nx} {ny} = 0", x * y)
            self.cert(cond, f"{ny} {nx} = 0", y * x)
        cond.passed = not cond.failures
        return cond

    def central_projections(self) -> ConditionResult:
        cond = ConditionResult("central_projections", True)
        N = self.F.size
        gens = []
        for s in range(len(self.A)):
            gens.append((self.A.names[s], NCPoly.mono((2 * s,))))
            gens.append((self.A.names[s] + "*", NCPoly.mono((2 * s + 1,))))
        seen: set[NCPoly] = set()
        for i in range(N):
            for j in range(N):
                if self.zero(i, j):
                    continue
                x = self.u(i, j)
                P = x * x.adjoint()
                if P in seen:
                    continue
                seen.add(P)
                pn = f"{self.name(i, j)}{self.name(i, j)}*"
                self.cert(cond, f"({pn})^2 = {pn}", P * P - P)
                for gname, g in gens:
                    self.cert(cond, f"[{pn}, {gname}] = 0", commutator(P, g))
        cond.passed = not cond.failures
        return cond

    def relator_images(self, name: str, sigma: Sequence[int], anchor: int) -> ConditionResult:
        """Relators hold for ``i -> U_{i, sigma(i)}`` inside the corner of ``anchor``."""
        cond = ConditionResult(name, True)
        F = self.F
        p = F.presentation
        lookup = {l: k for k, l in enumerate(F.index.letters)}
        P = self.u(anchor, sigma[anchor]) * self.u(anchor, sigma[anchor]).adjoint()
        cond.notes.append(f"corner unit {self.name(anchor, sigma[anchor])}{self.name(anchor, sigma[anchor])}*")

        def image(w) -> NCPoly:
            out = NCPoly.const(1)
            for g, e in w.letters:
                i = lookup[(g, 1 if p.generators[g].involutive else e)]
                out = out * self.u(i, sigma[i])
            return out * P

        for r in p.relators:
            label = f"{p.render_word(r.lhs)} = {p.render_word(r.rhs)}"
            self.cert(cond, label, image(r.lhs) - image(r.rhs))
        cond.passed = not cond.failures
        return cond


def _anchor(moved_by_all: Sequence[int]) -> int | None:
    return moved_by_all[0] if moved_by_all else None


def doubling_relations(F: FundamentalMatrix, sigmas: Sequence[Sequence[int]]) -> list[NCPoly]:
    """Defining relations of the (double) doubling over the fundamental-matrix
    symbols: unitarity, block support, block annihilations, centrality of
    every ``u u*`` and the relators in each corner."""
    N = F.size
    allowed = [{i} | {s[i] for s in sigmas} for i in range(N)]
    rels = list(F.structural_relations())
    diag, off = F.unitarity()
    rels += [d - NCPoly.const(1) for d in diag] + off
    rels += [F.entry_poly(i, j) for i in range(N) for j in range(N) if j not in allowed[i]]
    corners = [tuple(range(N))] + [tuple(s) for s in sigmas]
    moved = [i for i in range(N) if all(s[i] != i for s in sigmas)]
    for a in range(len(corners)):
        for b in range(len(corners)):
            if a == b:
                continue
            for i in moved:
                for j in moved:
                    x = F.entry_poly(i, corners[a][i])
                    y = F.entry_poly(j, corners[b][j])
                    rels.append(x * y)
    A = F.alphabet
    gens = [NCPoly.mono((k,)) for k in range(A.n_atoms)]
    for i in range(N):
        for j in allowed[i]:
            x = F.entry_poly(i, j)
            P = x * x.adjoint()
            rels.append(P * P - P)
            rels += [commutator(P, g) for g in gens]
    if moved:
        m = moved[0]
        p = F.presentation
        lookup = {l: k for k, l in enumerate(F.index.letters)}
        for c in corners:
            P = F.entry_poly(m, c[m]) * F.entry_poly(m, c[m]).adjoint()
            # entries outside corner c vanish in it
            for i in range(N):
                for j in allowed[i]:
                    if j != c[i]:
                        rels.append(F.entry_poly(i, j) * P)
            for r in p.relators:
                sides = []
                for w in (r.lhs, r.rhs):
                    out = NCPoly.const(1)
                    for g, e in w.letters:
                        i = lookup[(g, 1 if p.generators[g].involutive else e)]
                        out = out * F.entry_poly(i, c[i])
                    sides.append(out * P)
                rels.append(sides[0] - sides[1])
    return [r for r in dict.fromkeys(rels) if r]


def ideal_inclusion(store: RelationStore, F: FundamentalMatrix, sigmas: Sequence[Sequence[int]],
                    config: SaturationConfig | None = None) -> ConditionResult:
    """Every basis element of ``store`` reduces to 0 modulo the saturated
    doubling presentation (the converse direction is the other conditions)."""
    cond = ConditionResult("ideal_inclusion", True)
    rels = doubling_relations(F, sigmas)
    target = RelationStore(F.alphabet)
    for r in rels:
        target.add(r, "doubling presentation")
    diag, _ = F.unitarity()
    res = saturate(target, diag, config or SaturationConfig())
    if not res.complete:
        cond.notes.append("doubling presentation saturation incomplete: " + "; ".join(target.incomplete))
    missing = 0
    for r in store.basis():
        if not target.reduces_to_zero(r):
            missing += 1
            if missing <= 5:
                cond.failures.append(f"{r.to_str(F.alphabet)} not in the doubling ideal at this bound")
    if missing > 5:
        cond.failures.append(f"... {missing} basis elements not reduced in total")
    cond.notes.append(f"{len(store)} basis elements checked against {len(target)} rules")
    cond.passed = missing == 0
    return cond


def _assumptions_used(store: RelationStore, conds: Sequence[ConditionResult]) -> list[str]:
    if any(c.assumed for cond in conds for c in cond.certificates):
        return [a.provenance for a in store.assumptions]
    return []


def check_doubling(store: RelationStore, F: FundamentalMatrix, cand: AutomorphismCandidate,
                   baseline: RelationStore | None = None, inclusion: bool = True,
                   config: SaturationConfig | None = None) -> StructureReport:
    """Block-pattern criteria for ``Q(G) = D_theta(C*(G))``.

    ``baseline`` is the store without declared assumptions; certificates that
    need the assumptions are marked.
    """
    ck = _Checker(store, F, baseline)
    sigma = cand.sigma
    moved = cand.moved()
    conds = [ck.support([sigma])]
    conds.append(ck.products_zero("block_annihilation", [((i, i), (j, sigma[j])) for i in moved for j in moved]))
    conds.append(ck.central_projections())
    anchor = _anchor(moved)
    if anchor is None:
        conds.append(ConditionResult("relators_pi1", False, failures=["identity candidate moves no index"]))
    else:
        conds.append(ck.relator_images("relators_pi1", tuple(range(F.size)), anchor))
        conds.append(ck.relator_images("relators_pi2", sigma, anchor))
    return _finish("doubling", store, F, [cand], [sigma], conds, inclusion, config)


def check_double_doubling(store: RelationStore, F: FundamentalMatrix,
                          c1: AutomorphismCandidate, c2: AutomorphismCandidate, c3: AutomorphismCandidate,
                          baseline: RelationStore | None = None, inclusion: bool = True,
                          config: SaturationConfig | None = None) -> StructureReport:
    ck = _Checker(store, F, baseline)
    cands = [c1, c2, c3]
    sigmas = [c.sigma for c in cands]
    pre = ConditionResult("preconditions", True)
    if len(set(sigmas)) < 3:
        pre.failures.append("the three automorphisms must be distinct")
    if any(c.is_identity() for c in cands):
        pre.failures.append("identity candidate")
    if any(c1.compose(c2) != c2.compose(c1) for c1, c2 in [(c1, c2), (c1, c3), (c2, c3)]):
        pre.failures.append("automorphisms do not commute")
    if c1.compose(c2) != c3.sigma:
        pre.failures.append("theta_3 is not theta_1 theta_2 at the index level")
    pre.passed = not pre.failures
    conds = [pre]
    if not pre.passed:
        return StructureReport("unknown", "none", cands, conds, [], ["precondition violation"])
    N = F.size
    moved = [i for i in range(N) if all(s[i] != i for s in sigmas)]
    conds.append(ck.support(sigmas))
    conds.append(ck.products_zero("block_annihilation",
                                  [((i, i), (j, s[j])) for s in sigmas for i in moved for j in moved]))
    cross = []
    for a in range(3):
        for b in range(3):
            if a != b:
                cross += [((i, sigmas[a][i]), (j, sigmas[b][j])) for i in moved for j in moved]
    conds.append(ck.products_zero("cross_annihilation", cross))
    conds.append(ck.central_projections())
    anchor = _anchor(moved)
    if anchor is None:
        conds.append(ConditionResult("relators_pi1", False, failures=["no index moved by all automorphisms"]))
    else:
        conds.append(ck.relator_images("relators_pi1", tuple(range(N)), anchor))
        for k, s in enumerate(sigmas, 1):
            conds.append(ck.relator_images(f"relators_pi2_{k}", s, anchor))
    return _finish("double_doubling", store, F, cands, sigmas, conds, inclusion, config)


def _finish(kind: str, store: RelationStore, F: FundamentalMatrix, cands, sigmas, conds,
            inclusion: bool, config) -> StructureReport:
    notes: list[str] = []
    passed = all(c.passed for c in conds)
    certification = "none"
    if passed:
        certification = "consistent"
        if inclusion:
            inc = ideal_inclusion(store, F, sigmas, config)
            notes.append("ideal inclusion " + ("certified" if inc.passed else "not certified") + " at the degree bound")
            notes.extend(inc.notes + inc.failures)
            if inc.passed:
                certification = "certified"
    used = _assumptions_used(store, conds)
    if store.assumptions and not used:
        notes.append("declared assumptions were not needed: every certificate reduces to 0 without them")
    return StructureReport(kind if passed else "unknown", certification, list(cands), list(conds), used, notes)


def recognize(store: RelationStore, F: FundamentalMatrix, wp: WordProblem,
              baseline: RelationStore | None = None,
              pinned: Sequence[AutomorphismCandidate] | None = None,
              inclusion: bool = True, config: SaturationConfig | None = None) -> StructureReport:
    """Try double doublings first, then doublings, over the candidate list."""
    cands = list(pinned) if pinned is not None else search_involutions(F, wp)
    pattern = zero_pattern(store, F)
    N = F.size

    def fits(sigmas) -> bool:
        for i in range(N):
            allowed = {i} | {s[i] for s in sigmas}
            if any(not pattern.zero[i][j] for j in range(N) if j not in allowed):
                return False
        return True

    by_sigma = {c.sigma: c for c in cands}
    if len(cands) >= 2:
        for a in range(len(cands)):
            for b in range(a + 1, len(cands)):
                c1, c2 = cands[a], cands[b]
                s3 = c1.compose(c2)
                c3 = by_sigma.get(s3)
                if c3 is None or c3 in (c1, c2):
                    continue
                for t1, t2, t3 in _orders(c1, c2, c3, F.inv):
                    if t1.compose(t2) != t3.sigma or not fits([t1.sigma, t2.sigma, t3.sigma]):
                        continue
                    rep = check_double_doubling(store, F, t1, t2, t3, baseline, inclusion, config)
                    if rep.kind != "unknown":
                        return rep
    last = None
    for c in cands:
        if not fits([c.sigma]):
            continue
        rep = check_doubling(store, F, c, baseline, inclusion, config)
        if rep.kind != "unknown":
            return rep
        last = rep
    if last is not None:
        return last
    return StructureReport("unknown", "none", [], [], [], ["no candidate matches the zero pattern"])


def _orders(c1, c2, c3, inv):
    """Orderings of three commuting involutions, the most inversion-like first."""
    trip = sorted([c1, c2, c3], key=lambda c: c.sigma)
    first = max(trip, key=lambda c: sum(1 for i, s in enumerate(c.sigma) if s == inv[i] != i))
    trip.remove(first)
    trip.insert(0, first)
    out = []
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            c = 3 - a - b
            out.append((trip[a], trip[b], trip[c]))
    return out
