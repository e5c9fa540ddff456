"""Canonical forms, connected-component decomposition, and exhaustive
enumeration of instances.

Canonical encoding
------------------

The canonical form of an instance is a byte string: the carrier sizes in
schema node order, followed by the action tables, every integer packed as
two big-endian bytes.  Tables are emitted on a fixed schedule: walking the
nodes in schema order, after node ``k`` every not-yet-emitted arrow whose
endpoints both lie among the first ``k+1`` nodes is emitted (in schema
arrow order) as the sequence of target indices over the source carrier.
The canonical form is the lexicographically least encoding over all tuples
of per-node element orderings.

The least encoding is found by depth-first search over the node orderings
with branch-and-bound pruning on the partial encoding.  Two shortcuts keep
the search tractable without giving up exactness:

* when every arrow emitted at a step leaves the current node for strictly
  earlier ones, the minimizing orderings are exactly those that sort the
  per-element rows, so only row-sorting orders are branched on;
* when additionally no later arrow touches the node, ties between equal
  rows cannot influence the encoding and a single representative order
  suffices.

Equal byte strings are equivalent to the existence of an isomorphism (the
encoding decodes back to an instance, so it is a complete invariant), and
the bytes are stable across versions within a major release; they are the
deduplication keys in all output files.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from itertools import chain, permutations, product
from typing import Iterator, Mapping

from .core import (
    Instance,
    Morphism,
    Schema,
    coproduct_many,
    subinstance,
)

__all__ = [
    "CanonicalForm",
    "Decomposition",
    "canonical_form",
    "canonical_relabeling",
    "connected_components",
    "is_connected",
    "enumerate_instances",
    "raw_candidate_count",
    "normalize_bounds",
]


@dataclass(frozen=True)
class CanonicalForm:
    """Schema reference plus the minimal byte encoding of an iso class."""

    schema: Schema
    data: bytes

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.schema.name.encode("utf-8"))
        h.update(b"\x00")
        h.update(self.data)
        return h.hexdigest()

    @property
    def sizes(self) -> tuple[int, ...]:
        n = len(self.schema.nodes)
        return tuple(
            int.from_bytes(self.data[2 * i : 2 * i + 2], "big") for i in range(n)
        )

    @property
    def total_size(self) -> int:
        return sum(self.sizes)

    @property
    def representative(self) -> Instance:
        """The canonically labelled instance this encoding decodes to."""
        return _decode(self.schema, self.data)

    def __repr__(self) -> str:
        return f"CanonicalForm({self.schema.name}, {self.digest[:12]})"


def _pack(ints: list[int]) -> bytes:
    for v in ints:
        if v > 0xFFFF:
            raise ValueError("carrier too large for the canonical encoding")
    return b"".join(v.to_bytes(2, "big") for v in ints)


def _canonical_names(n: int) -> tuple[str, ...]:
    # zero padding keeps lexicographic order aligned with index order
    width = len(str(n - 1)) if n > 1 else 1
    return tuple(f"x{i:0{width}d}" for i in range(n))


@lru_cache(maxsize=None)
def _emission_schedule(schema: Schema) -> tuple[tuple, ...]:
    placed: set[str] = set()
    steps = []
    for k, _ in enumerate(schema.nodes):
        fixed = set(schema.nodes[: k + 1])
        step = tuple(
            a
            for a in schema.arrows
            if a.name not in placed and a.src in fixed and a.tgt in fixed
        )
        placed.update(a.name for a in step)
        steps.append(step)
    return tuple(steps)


@lru_cache(maxsize=None)
def _referenced_later(schema: Schema) -> tuple[bool, ...]:
    out = []
    for k, d in enumerate(schema.nodes):
        later = set(schema.nodes[k + 1 :])
        out.append(
            any(
                (a.src == d and a.tgt in later) or (a.tgt == d and a.src in later)
                for a in schema.arrows
            )
        )
    return tuple(out)


def _canonical_search(F: Instance) -> tuple[list[int], list[tuple[int, ...]]]:
    """Least encoding (as ints) and the per-node orderings realizing it.

    An ordering is a tuple sending new position to old element index.
    """
    schema = F.schema
    t = F.tables
    nodes = schema.nodes
    node_pos = schema.node_index
    sizes = [len(t.elems[d]) for d in nodes]
    steps = _emission_schedule(schema)
    later_ref = _referenced_later(schema)

    best_enc: list[int] | None = None
    best_orders: list[tuple[int, ...]] | None = None

    prefix: list[int] = list(sizes)
    orders: list[tuple[int, ...] | None] = [None] * len(nodes)
    invs: list[list[int] | None] = [None] * len(nodes)

    def candidates(k: int) -> Iterator[tuple[int, ...]]:
        d = nodes[k]
        n = sizes[k]
        step = steps[k]
        if any(a.tgt == d for a in step):
            yield from permutations(range(n))
            return
        rows = []
        for old in range(n):
            rows.append(
                tuple(invs[node_pos[a.tgt]][t.acts[a.name][old]] for a in step)
            )
        base = sorted(range(n), key=lambda i: (rows[i], i))
        if not later_ref[k]:
            yield tuple(base)
            return
        groups: list[list[int]] = []
        for i in base:
            if groups and rows[groups[-1][-1]] == rows[i]:
                groups[-1].append(i)
            else:
                groups.append([i])
        for combo in product(*(permutations(g) for g in groups)):
            yield tuple(chain.from_iterable(combo))

    def emission(k: int, order: tuple[int, ...], inv_k: list[int]) -> list[int]:
        out: list[int] = []
        for a in steps[k]:
            si, ti = node_pos[a.src], node_pos[a.tgt]
            act = t.acts[a.name]
            src_order = order if si == k else orders[si]
            inv_tgt = inv_k if ti == k else invs[ti]
            out.extend(inv_tgt[act[old]] for old in src_order)
        return out

    def dfs(k: int, tight: bool) -> None:
        nonlocal best_enc, best_orders
        if k == len(nodes):
            if best_enc is None or not tight:
                best_enc = prefix.copy()
                best_orders = [o for o in orders]  # type: ignore[misc]
            return
        n = sizes[k]
        for order in candidates(k):
            inv_k = [0] * n
            for new, old in enumerate(order):
                inv_k[old] = new
            emitted = emission(k, order, inv_k)
            new_tight = tight
            if best_enc is not None and new_tight:
                off = len(prefix)
                seg = best_enc[off : off + len(emitted)]
                if emitted > seg:
                    continue
                if emitted < seg:
                    new_tight = False
            orders[k] = order
            invs[k] = inv_k
            prefix.extend(emitted)
            dfs(k + 1, new_tight)
            del prefix[len(prefix) - len(emitted) :]
        orders[k] = None
        invs[k] = None

    dfs(0, True)
    assert best_enc is not None and best_orders is not None
    return best_enc, best_orders


def canonical_form(F: Instance) -> CanonicalForm:
    """The canonical form of ``F``; cached on the instance."""
    cached = F.__dict__.get("_canonical_form")
    if cached is not None:
        return cached
    enc, _ = _canonical_search(F)
    cf = CanonicalForm(F.schema, _pack(enc))
    F.__dict__["_canonical_form"] = cf
    return cf


def canonical_relabeling(F: Instance) -> tuple[CanonicalForm, Morphism]:
    """Canonical form plus the isomorphism from ``F`` onto its
    canonically labelled representative."""
    enc, orders = _canonical_search(F)
    cf = CanonicalForm(F.schema, _pack(enc))
    F.__dict__.setdefault("_canonical_form", cf)
    rep = cf.representative
    comps = {}
    for k, d in enumerate(F.schema.nodes):
        elems = F.tables.elems[d]
        names = rep.carriers[d]
        comps[d] = {elems[old]: names[new] for new, old in enumerate(orders[k])}
    return cf, Morphism(F, rep, comps)


@lru_cache(maxsize=None)
def _decode(schema: Schema, data: bytes) -> Instance:
    ints = [
        int.from_bytes(data[2 * i : 2 * i + 2], "big") for i in range(len(data) // 2)
    ]
    nodes = schema.nodes
    sizes = dict(zip(nodes, ints[: len(nodes)]))
    names = {d: _canonical_names(sizes[d]) if sizes[d] else () for d in nodes}
    pos = len(nodes)
    actions: dict[str, dict[str, str]] = {a.name: {} for a in schema.arrows}
    for step in _emission_schedule(schema):
        for a in step:
            for p in range(sizes[a.src]):
                actions[a.name][names[a.src][p]] = names[a.tgt][ints[pos]]
                pos += 1
    if pos != len(ints):
        raise ValueError("canonical encoding has trailing data")
    return Instance(schema, names, actions, name=None)


# ---------------------------------------------------------------------------
# connected components


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]


@dataclass(frozen=True)
class Decomposition:
    """Connected components plus the isomorphism from their fold-left
    coproduct back onto the original instance."""

    components: tuple[Instance, ...]
    witness: Morphism


def _component_selections(F: Instance) -> list[dict[str, list[str]]]:
    """Element classes of the union-find closure, ordered by their least
    member in the global element order."""
    t = F.tables
    nodes = F.schema.nodes
    offsets: dict[str, int] = {}
    total = 0
    for d in nodes:
        offsets[d] = total
        total += len(t.elems[d])
    uf = UnionFind(total)
    for a in F.schema.arrows:
        src_off, tgt_off = offsets[a.src], offsets[a.tgt]
        for i, j in enumerate(t.acts[a.name]):
            uf.union(src_off + i, tgt_off + j)
    classes: dict[int, dict[str, list[str]]] = {}
    order: list[int] = []
    for d in nodes:
        for i, x in enumerate(t.elems[d]):
            root = uf.find(offsets[d] + i)
            if root not in classes:
                classes[root] = {}
                order.append(root)
            classes[root].setdefault(d, []).append(x)
    # dict insertion order follows the global element order already, but be
    # explicit about it: classes keyed by first appearance
    return [classes[r] for r in order]


def connected_components(F: Instance) -> Decomposition:
    """Split ``F`` into connected components with a validated witness.

    Components are ordered by canonical form bytes, ties broken by the
    least original element; the empty instance decomposes into zero
    components.
    """
    selections = _component_selections(F)
    parts = [subinstance(F, sel) for sel in selections]
    keyed = sorted(
        (canonical_form(p).data, idx, p) for idx, p in enumerate(parts)
    )
    components = tuple(p for _, _, p in keyed)
    total, injections = coproduct_many(F.schema, components)
    comps: dict[str, dict[str, str]] = {d: {} for d in F.schema.nodes}
    for part, inj in zip(components, injections):
        for d in F.schema.nodes:
            for x in part.carriers[d]:
                comps[d][inj.components[d][x]] = x
    witness = Morphism(total, F, comps)
    return Decomposition(components, witness)


def is_connected(F: Instance) -> bool:
    """True iff the union-find closure has exactly one class.

    The agreement of this test with the hom-set characterization of
    connectedness is itself verified by the harness, not assumed here.
    """
    return len(_component_selections(F)) == 1


# ---------------------------------------------------------------------------
# exhaustive enumeration


def normalize_bounds(schema: Schema, bounds: Mapping[str, int]) -> dict[str, int]:
    for d in bounds:
        if d not in schema.node_index:
            raise ValueError(f"bounds name unknown node {d!r}")
    out = {d: int(bounds.get(d, 0)) for d in schema.nodes}
    if any(v < 0 for v in out.values()):
        raise ValueError("bounds must be nonnegative")
    return out


def raw_candidate_count(
    schema: Schema, bounds: Mapping[str, int], *, total_max: int | None = None
) -> int:
    """Number of raw action assignments the enumeration universe ranges
    over, before any relation filtering; the CLI refuses oversized
    universes based on this count."""
    bounds = normalize_bounds(schema, bounds)
    total = 0
    for vector in product(*(range(bounds[d] + 1) for d in schema.nodes)):
        sizes = dict(zip(schema.nodes, vector))
        if total_max is not None and sum(vector) > total_max:
            continue
        count = 1
        for a in schema.arrows:
            count *= sizes[a.tgt] ** sizes[a.src]
            if count == 0:
                break
        total += count
    return total


def enumerate_instances(
    schema: Schema,
    bounds: Mapping[str, int],
    *,
    total_max: int | None = None,
) -> tuple[CanonicalForm, ...]:
    """All isomorphism classes of valid instances with carrier sizes within
    ``bounds`` (and total size within ``total_max``, when given), as
    canonical forms in ascending byte order."""
    bounds = normalize_bounds(schema, bounds)
    seen: dict[bytes, CanonicalForm] = {}
    for vector in product(*(range(bounds[d] + 1) for d in schema.nodes)):
        if total_max is not None and sum(vector) > total_max:
            continue
        sizes = dict(zip(schema.nodes, vector))
        for inst in _instances_with_sizes(schema, sizes):
            cf = canonical_form(inst)
            seen.setdefault(cf.data, cf)
    return tuple(seen[k] for k in sorted(seen))


def _instances_with_sizes(schema: Schema, sizes: Mapping[str, int]) -> Iterator[Instance]:
    """Backtracking generator of the valid instances with exactly the given
    carrier sizes.  Relations mentioning a single arrow prefilter that
    arrow's candidate tables; the rest are checked as soon as every arrow
    they mention has been assigned."""
    nodes = schema.nodes
    names = {d: _canonical_names(sizes[d]) if sizes[d] else () for d in nodes}
    arrows = schema.arrows
    arrow_pos = {a.name: j for j, a in enumerate(arrows)}

    single: dict[str, list] = {a.name: [] for a in arrows}
    multi_at: dict[int, list] = {}
    for rel in schema.relations:
        used = set(rel[0].arrows) | set(rel[1].arrows)
        if not used:
            continue  # parallel empty paths hold vacuously
        if len(used) == 1:
            single[next(iter(used))].append(rel)
        else:
            ready = max(arrow_pos[name] for name in used)
            multi_at.setdefault(ready, []).append(rel)

    def rel_holds(tables: dict[str, tuple[int, ...]], rel) -> bool:
        p, q = rel
        for v in range(sizes[p.start]):
            left = v
            for name in p.arrows:
                left = tables[name][left]
            right = v
            for name in q.arrows:
                right = tables[name][right]
            if left != right:
                return False
        return True

    candidate_lists: list[list[tuple[int, ...]]] = []
    for a in arrows:
        n_src, n_tgt = sizes[a.src], sizes[a.tgt]
        if n_src > 0 and n_tgt == 0:
            return
        space = product(range(n_tgt), repeat=n_src)
        if single[a.name]:
            cands = [t for t in space if all(rel_holds({a.name: t}, r) for r in single[a.name])]
        else:
            cands = list(space)
        candidate_lists.append(cands)

    tables: dict[str, tuple[int, ...]] = {}

    def rec(j: int) -> Iterator[Instance]:
        if j == len(arrows):
            actions = {
                a.name: {
                    names[a.src][i]: names[a.tgt][v]
                    for i, v in enumerate(tables[a.name])
                }
                for a in arrows
            }
            yield Instance(schema, names, actions)
            return
        a = arrows[j]
        for t in candidate_lists[j]:
            tables[a.name] = t
            if all(rel_holds(tables, r) for r in multi_at.get(j, ())):
                yield from rec(j + 1)
            del tables[a.name]

    yield from rec(0)
