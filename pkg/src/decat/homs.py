"""Enumeration and counting of morphisms between instances.

The search assigns images to the elements of the source in a fixed global
order (schema node order, then lexicographic element order).  Assigning an
image to ``x`` at node ``d`` immediately forces, for every arrow out of
``d``, the image of ``action(x)``, and the forcing closes transitively; a
clash with an existing assignment prunes the branch.  Because forcing is
eager, consistency along arrows *into* ``d`` is caught the moment the
earlier source element was assigned.

The enumeration order is a package convention, not a mathematical one: the
morphisms come out in depth-first order of the candidate images tried at
the free elements.  The order is deterministic, which is what the callers
(bijectivity checks, canonical-form oracles, report determinism) rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Iterator

from .core import (
    Instance,
    Morphism,
    SchemaMismatch,
    _require_same_schema,
    coproduct,
)

__all__ = [
    "HomSet",
    "enumerate_homs",
    "iter_homs",
    "count_homs",
    "find_iso",
    "check_conn_bijection",
    "hom_images_disjoint",
    "sample_hom",
]


@dataclass(frozen=True)
class HomSet:
    src: Instance
    tgt: Instance
    morphisms: tuple[Morphism, ...]

    @property
    def count(self) -> int:
        return len(self.morphisms)

    def __len__(self) -> int:
        return len(self.morphisms)

    def __iter__(self):
        return iter(self.morphisms)

    def keys(self) -> frozenset:
        return frozenset(m.key for m in self.morphisms)


class _Search:
    """Shared machinery: compiled tables, propagation, and backtracking."""

    def __init__(self, X: Instance, Y: Instance, injective: bool = False):
        _require_same_schema(X, Y)
        self.X, self.Y = X, Y
        self.schema = X.schema
        xt, yt = X.tables, Y.tables
        nodes = self.schema.nodes
        self.node_pos = {d: i for i, d in enumerate(nodes)}
        self.x_elems = [xt.elems[d] for d in nodes]
        self.y_elems = [yt.elems[d] for d in nodes]
        self.x_sizes = [len(e) for e in self.x_elems]
        self.y_sizes = [len(e) for e in self.y_elems]
        # arrows out of each node as (x-table, y-table, target position)
        self.outs: list[list[tuple[tuple[int, ...], tuple[int, ...], int]]] = [
            [
                (xt.acts[a.name], yt.acts[a.name], self.node_pos[a.tgt])
                for a in self.schema.arrows_from[d]
            ]
            for d in nodes
        ]
        self.order = [
            (di, i) for di in range(len(nodes)) for i in range(self.x_sizes[di])
        ]
        self.injective = injective
        self.assign = [[-1] * n for n in self.x_sizes]
        self.used: list[set[int]] = [set() for _ in nodes]

    def _propagate(self, di: int, i: int, j: int, trail: list[tuple[int, int]]) -> bool:
        stack = [(di, i, j)]
        while stack:
            d, i, j = stack.pop()
            cur = self.assign[d][i]
            if cur == j:
                continue
            if cur != -1:
                return False
            if self.injective:
                if j in self.used[d]:
                    return False
                self.used[d].add(j)
            self.assign[d][i] = j
            trail.append((d, i))
            for x_act, y_act, td in self.outs[d]:
                stack.append((td, x_act[i], y_act[j]))
        return True

    def _undo(self, trail: list[tuple[int, int]]) -> None:
        for d, i in trail:
            if self.injective:
                self.used[d].discard(self.assign[d][i])
            self.assign[d][i] = -1

    def solutions(self) -> Iterator[tuple[tuple[int, ...], ...]]:
        """Depth-first generator of complete assignments."""
        # a nonempty node with an empty target carrier kills everything
        if any(nx > 0 and ny == 0 for nx, ny in zip(self.x_sizes, self.y_sizes)):
            return
        order = self.order

        def rec(k: int) -> Iterator[tuple[tuple[int, ...], ...]]:
            while k < len(order) and self.assign[order[k][0]][order[k][1]] != -1:
                k += 1
            if k == len(order):
                yield tuple(tuple(row) for row in self.assign)
                return
            d, i = order[k]
            for j in range(self.y_sizes[d]):
                trail: list[tuple[int, int]] = []
                if self._propagate(d, i, j, trail):
                    yield from rec(k + 1)
                self._undo(trail)

        yield from rec(0)

    def to_morphism(self, solution: tuple[tuple[int, ...], ...]) -> Morphism:
        comps = {
            d: {
                self.x_elems[di][i]: self.y_elems[di][j]
                for i, j in enumerate(solution[di])
            }
            for di, d in enumerate(self.schema.nodes)
        }
        return Morphism(self.X, self.Y, comps)


def iter_homs(X: Instance, Y: Instance) -> Iterator[Morphism]:
    search = _Search(X, Y)
    for sol in search.solutions():
        yield search.to_morphism(sol)


def enumerate_homs(X: Instance, Y: Instance) -> HomSet:
    """All morphisms ``X -> Y`` in the deterministic search order."""
    return HomSet(X, Y, tuple(iter_homs(X, Y)))


def count_homs(X: Instance, Y: Instance) -> int:
    """Number of morphisms ``X -> Y`` without materializing them."""
    return sum(1 for _ in _Search(X, Y).solutions())


def find_iso(X: Instance, Y: Instance) -> Morphism | None:
    """An invertible morphism ``X -> Y`` if one exists.

    Per-node carrier cardinalities are compared first; the search then only
    tries componentwise-injective assignments.  A bijective natural family
    is invertible (the inverse family is natural again), so the first hit
    wins.
    """
    _require_same_schema(X, Y)
    for d in X.schema.nodes:
        if len(X.carriers[d]) != len(Y.carriers[d]):
            return None
    search = _Search(X, Y, injective=True)
    for sol in search.solutions():
        return search.to_morphism(sol)
    return None


def check_conn_bijection(C: Instance, A: Instance, B: Instance) -> bool:
    """Whether post-composition with the coprojections is a bijection
    ``Hom(C,A) + Hom(C,B) -> Hom(C,A+B)``.

    Computed by enumerating all three hom-sets and comparing images.
    """
    _require_same_schema(C, A, B)
    H, i_A, i_B = coproduct(A, B)
    homs_A = enumerate_homs(C, A)
    homs_B = enumerate_homs(C, B)
    homs_H = enumerate_homs(C, H)
    img_A = {f.then(i_A).key for f in homs_A}
    img_B = {f.then(i_B).key for f in homs_B}
    if len(img_A) != len(homs_A) or len(img_B) != len(homs_B):
        return False
    if img_A & img_B:
        return False
    return img_A | img_B == {h.key for h in homs_H}


def hom_images_disjoint(X: Instance, A: Instance, B: Instance) -> bool:
    """Whether no morphism ``X -> A`` and ``X -> B`` agree after the
    coprojections into ``A+B``.  Violated only by the empty ``X``."""
    _require_same_schema(X, A, B)
    _, i_A, i_B = coproduct(A, B)
    img_A = {f.then(i_A).key for f in iter_homs(X, A)}
    img_B = {g.then(i_B).key for g in iter_homs(X, B)}
    return not (img_A & img_B)


def sample_hom(rng: Random, X: Instance, Y: Instance, cap: int = 10_000) -> Morphism | None:
    """A pseudorandom morphism ``X -> Y``, or None if there is none.

    The full hom-set is enumerated and sampled uniformly while it has at
    most ``cap`` members; beyond that the sample comes from a random
    backtracking descent (every morphism reachable, not uniform).
    """
    head: list[Morphism] = []
    for m in iter_homs(X, Y):
        head.append(m)
        if len(head) > cap:
            break
    if len(head) <= cap:
        if not head:
            return None
        return head[rng.randrange(len(head))]
    for _ in range(1000):
        m = _random_descent(rng, X, Y)
        if m is not None:
            return m
    # an enormous hom-set with no completable random branch is not reachable
    # for valid instances; fall back on the enumerated head
    return head[rng.randrange(len(head))]


def _random_descent(rng: Random, X: Instance, Y: Instance) -> Morphism | None:
    search = _Search(X, Y)
    if any(nx > 0 and ny == 0 for nx, ny in zip(search.x_sizes, search.y_sizes)):
        return None
    for d, i in search.order:
        if search.assign[d][i] != -1:
            continue
        candidates = list(range(search.y_sizes[d]))
        rng.shuffle(candidates)
        placed = False
        for j in candidates:
            trail: list[tuple[int, int]] = []
            if search._propagate(d, i, j, trail):
                placed = True
                break
            search._undo(trail)
        if not placed:
            return None
    return search.to_morphism(tuple(tuple(row) for row in search.assign))
