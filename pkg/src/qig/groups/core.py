"""Word problem front end: normal forms, word lengths and balls for a presentation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

from ..presentation import FreeWord, GroupPresentation, SymmetricIndex, symmetric_index
from .backends import (
    Backend,
    Braid,
    Cyclic,
    DirectProduct,
    FreeProduct,
    Lamplighter,
    Rewriting,
    Semidirect,
)

DEFAULT_RADIUS_CAP = 6


class BackendMismatch(ValueError):
    """The backend does not satisfy a declared relator."""


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GroupElement:
    canonical: Hashable
    length: int | None = field(default=None, compare=False)


def build_backend(desc: tuple, presentation: GroupPresentation) -> tuple[Backend, list[int]]:
    """Instantiate a descriptor tree; returns the backend and, for every
    presentation generator, its backend-local generator number."""
    root = _build(desc, presentation)
    leaves = root.leaves()
    bound = [leaf.names for leaf in leaves]
    if root.ngens != len(presentation.generators):
        raise BackendMismatch(
            f"backend {root.describe()} has {root.ngens} generators, "
            f"presentation has {len(presentation.generators)}"
        )
    if all(b is None for b in bound):
        return root, list(range(root.ngens))
    if any(b is None for b in bound):
        raise BackendMismatch("either bind every backend leaf to generator names or none")
    order: list[str] = []
    for leaf in leaves:
        if len(leaf.names) != leaf.ngens:
            raise BackendMismatch(f"{leaf.describe()} expects {leaf.ngens} generator names")
        order.extend(leaf.names)
    if sorted(order) != sorted(presentation.names):
        raise BackendMismatch(f"backend binds {order}, presentation declares {list(presentation.names)}")
    return root, [order.index(n) for n in presentation.names]


def _build(desc: tuple, p: GroupPresentation) -> Backend:
    name, args, binding = desc
    if name == "cyclic":
        return Cyclic(int(args[0]) if args else 0, binding)
    if name == "free":
        k = int(args[0]) if args else 1
        return FreeProduct([Cyclic(0) for _ in range(k)])
    if name in ("freeprod", "free_product"):
        return FreeProduct([_build(a, p) for a in args])
    if name in ("product", "direct_product"):
        return DirectProduct([_build(a, p) for a in args])
    if name == "semidirect":
        m, n, u = (int(a) for a in args)
        return Semidirect(m, n, u, binding)
    if name == "lamplighter":
        return Lamplighter(binding)
    if name == "braid":
        return Braid(int(args[0]), binding)
    if name == "rewriting":
        names = binding or p.names
        inv = [p.generators[p.gen_index(nm)].involutive for nm in names]
        b = Rewriting(args, names, inv)
        return b
    raise BackendMismatch(f"unknown backend {name!r}")


class WordProblem:
    """Backend bound to a presentation, with S-letter multiplication and BFS metric."""

    def __init__(self, presentation: GroupPresentation, backend: Backend | None = None,
                 gen_map: list[int] | None = None, radius_cap: int = DEFAULT_RADIUS_CAP,
                 check: bool = True):
        if backend is None:
            if presentation.backend is None:
                raise BackendMismatch("presentation declares no backend")
            backend, gen_map = build_backend(presentation.backend, presentation)
        self.p = presentation
        self.backend = backend
        self.gen_map = gen_map if gen_map is not None else list(range(backend.ngens))
        self.radius_cap = radius_cap
        self.index: SymmetricIndex = symmetric_index(presentation)
        self.s_elements = [self._letter(g, e) for g, e in self.index.letters]
        self.identity = backend.identity()
        self._lengths: dict[Hashable, int] = {self.identity: 0}
        self._frontier: list[Hashable] = [self.identity]
        self._radius = 0
        self._mul_cache: dict[tuple, Hashable] = {}
        if check:
            self.check_relators()

    def _letter(self, g: int, e: int):
        if self.p.generators[g].involutive:
            e = 1
        return self.backend.letter(self.gen_map[g], e)

    def check_relators(self) -> None:
        for r in self.p.relators:
            a, b = self.evaluate(r.lhs), self.evaluate(r.rhs)
            if a != b:
                raise BackendMismatch(
                    f"relator {self.p.render_word(r.lhs)} = {self.p.render_word(r.rhs)} "
                    f"fails in backend {self.backend.describe()}"
                )

    def mul(self, x, y):
        key = (x, y)
        z = self._mul_cache.get(key)
        if z is None:
            z = self.backend.mul(x, y)
            if len(self._mul_cache) < 2_000_000:
                self._mul_cache[key] = z
        return z

    def evaluate(self, w: FreeWord):
        x = self.identity
        for g, e in w.letters:
            x = self.mul(x, self._letter(g, e))
        return x

    def evaluate_s(self, indices: Iterable[int]):
        x = self.identity
        for i in indices:
            x = self.mul(x, self.s_elements[i])
        return x

    def normal_form(self, w: FreeWord) -> GroupElement:
        x = self.evaluate(w)
        return GroupElement(x, self._lengths.get(x))

    def is_identity(self, w: FreeWord) -> bool:
        return self.evaluate(w) == self.identity

    # -- metric -------------------------------------------------------------

    def _grow(self) -> bool:
        if not self._frontier:
            return False
        new = []
        r = self._radius + 1
        for x in self._frontier:
            for s in self.s_elements:
                y = self.mul(x, s)
                if y not in self._lengths:
                    self._lengths[y] = r
                    new.append(y)
        self._frontier = new
        self._radius = r
        return bool(new)

    def word_length(self, g) -> int:
        x = g.canonical if isinstance(g, GroupElement) else g
        while x not in self._lengths:
            if self._radius >= self.radius_cap:
                raise BudgetExceeded(f"element not within radius cap {self.radius_cap}")
            if not self._grow() and x not in self._lengths:
                raise BackendMismatch("element not reachable from S")
        return self._lengths[x]

    def ball(self, r: int) -> list[GroupElement]:
        if r > self.radius_cap:
            raise BudgetExceeded(f"radius {r} exceeds cap {self.radius_cap}")
        while self._radius < r and self._grow():
            pass
        items = [(x, l) for x, l in self._lengths.items() if l <= r]
        return [GroupElement(x, l) for x, l in items]

    def element_of_s(self, i: int) -> Hashable:
        return self.s_elements[i]
