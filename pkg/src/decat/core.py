"""Schemas, instances, morphisms, and the basic categorical constructions.

A :class:`Schema` is a finite quiver (nodes plus typed arrows) together with
path relations.  An :class:`Instance` assigns a finite carrier set to each
node and a total function to each arrow so that both paths of every relation
agree pointwise.  Instances over a fixed schema form a category whose
morphisms are families of per-node functions commuting with every arrow
action.  Digraphs (nodes ``V``, ``E`` with source and target arrows, parallel
edges allowed) and finite group actions (one node, one arrow per generator,
relations forcing the group law) are the motivating special cases.

Conventions used throughout the package:

* paths compose left to right, so ``a.b`` means "apply ``a``, then ``b``";
* element identifiers are opaque strings ordered lexicographically, and every
  ordered iteration over a carrier uses that order;
* coproducts tag elements with a ``0.``/``1.`` summand prefix, n-ary
  coproducts fold left;
* empty carriers are allowed anywhere, including mixed with nonempty ones.

All values are immutable after construction and every operation is a pure
function of its inputs, so everything here is safe to call concurrently.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping


class SchemaMismatch(ValueError):
    """An operation combined instances or morphisms over different schemas."""


class DomainError(ValueError):
    """An element or selection lies outside the required domain."""


@dataclass(frozen=True)
class Arrow:
    name: str
    src: str
    tgt: str


@dataclass(frozen=True)
class Path:
    """A composable run of arrows, evaluated left to right.

    ``arrows`` may be empty, in which case the path is the identity at
    ``start``.
    """

    start: str
    arrows: tuple[str, ...] = ()


@dataclass(frozen=True)
class Violation:
    """A single validation failure: machine-checkable kind plus witness data."""

    kind: str
    message: str
    witness: tuple = ()

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> tuple[str, ...]:
        return tuple(v.kind for v in self.violations)


class Schema:
    """A finite quiver with path relations.

    Nodes and arrows keep their declaration order; that order fixes the
    layout of canonical encodings and of every deterministic iteration in
    this package, so reordering a schema's declarations changes canonical
    forms (but never isomorphism verdicts).
    """

    def __init__(
        self,
        name: str,
        nodes: Iterable[str],
        arrows: Iterable[Arrow | tuple[str, str, str]],
        relations: Iterable[tuple[Path, Path]] = (),
    ):
        self.name = name
        self.nodes = tuple(nodes)
        self.arrows = tuple(a if isinstance(a, Arrow) else Arrow(*a) for a in arrows)
        self.relations = tuple((p, q) for p, q in relations)
        self.node_index = {d: i for i, d in enumerate(self.nodes)}
        self.arrow_map = {a.name: a for a in self.arrows}
        self.arrows_from = {
            d: tuple(a for a in self.arrows if a.src == d) for d in self.nodes
        }
        self.arrows_into = {
            d: tuple(a for a in self.arrows if a.tgt == d) for d in self.nodes
        }

    @cached_property
    def signature(self) -> tuple:
        return (self.name, self.nodes, self.arrows, self.relations)

    def __eq__(self, other) -> bool:
        return isinstance(other, Schema) and self.signature == other.signature

    def __hash__(self) -> int:
        return hash(self.signature)

    def __repr__(self) -> str:
        return f"Schema({self.name!r}, {len(self.nodes)} nodes, {len(self.arrows)} arrows)"

    def path_end(self, p: Path) -> str | None:
        """End node of ``p``, or None if the path does not typecheck."""
        at = p.start
        for name in p.arrows:
            a = self.arrow_map.get(name)
            if a is None or a.src != at:
                return None
            at = a.tgt
        return at


def validate_schema(s: Schema) -> ValidationResult:
    """Check the schema invariants; violations are returned, never raised."""
    out: list[Violation] = []
    seen_nodes: set[str] = set()
    for d in s.nodes:
        if d in seen_nodes:
            out.append(Violation("duplicate-identifier", f"node {d!r} declared twice", (d,)))
        seen_nodes.add(d)
    seen_arrows: set[str] = set()
    for a in s.arrows:
        if a.name in seen_arrows:
            out.append(
                Violation("duplicate-identifier", f"arrow {a.name!r} declared twice", (a.name,))
            )
        seen_arrows.add(a.name)
        for end, which in ((a.src, "source"), (a.tgt, "target")):
            if end not in s.node_index:
                out.append(
                    Violation(
                        "dangling-endpoint",
                        f"arrow {a.name!r} has undeclared {which} node {end!r}",
                        (a.name, end),
                    )
                )
    for i, (p, q) in enumerate(s.relations):
        broken = False
        for path in (p, q):
            if path.start not in s.node_index:
                out.append(
                    Violation(
                        "path-break",
                        f"relation {i}: path starts at undeclared node {path.start!r}",
                        (i, path.start),
                    )
                )
                broken = True
                continue
            at = path.start
            for name in path.arrows:
                a = s.arrow_map.get(name)
                if a is None:
                    out.append(
                        Violation("path-break", f"relation {i}: unknown arrow {name!r}", (i, name))
                    )
                    broken = True
                    break
                if a.src != at:
                    out.append(
                        Violation(
                            "path-break",
                            f"relation {i}: arrow {name!r} does not compose at {at!r}",
                            (i, name),
                        )
                    )
                    broken = True
                    break
                at = a.tgt
        if broken:
            continue
        if p.start != q.start or s.path_end(p) != s.path_end(q):
            out.append(
                Violation(
                    "non-parallel-relation",
                    f"relation {i}: paths are not parallel "
                    f"({p.start}->{s.path_end(p)} vs {q.start}->{s.path_end(q)})",
                    (i,),
                )
            )
    return ValidationResult(tuple(out))


class Instance:
    """A finite-set action of a schema: one carrier per node, one total
    function per arrow.

    The constructor checks only structural well-formedness (known node and
    arrow names, string elements, no duplicate elements); the semantic
    invariants (totality, codomains, relations) are the business of
    :func:`validate_instance`.
    """

    def __init__(
        self,
        schema: Schema,
        carriers: Mapping[str, Iterable[str]],
        actions: Mapping[str, Mapping[str, str]],
        name: str | None = None,
    ):
        for d in carriers:
            if d not in schema.node_index:
                raise ValueError(f"unknown node {d!r} in carriers")
        for a in actions:
            if a not in schema.arrow_map:
                raise ValueError(f"unknown arrow {a!r} in actions")
        self.schema = schema
        self.name = name
        carr: dict[str, tuple[str, ...]] = {}
        for d in schema.nodes:
            elems = tuple(sorted(carriers.get(d, ())))
            if any(not isinstance(x, str) for x in elems):
                raise TypeError(f"carrier of {d!r} has a non-string element")
            if len(set(elems)) != len(elems):
                raise ValueError(f"duplicate element in carrier of {d!r}")
            carr[d] = elems
        self.carriers = carr
        self.actions = {a.name: dict(actions.get(a.name, {})) for a in schema.arrows}

    @cached_property
    def key(self) -> tuple:
        return (
            self.schema.signature,
            tuple(self.carriers[d] for d in self.schema.nodes),
            tuple(
                tuple(sorted(self.actions[a.name].items())) for a in self.schema.arrows
            ),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Instance) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        sizes = ",".join(f"{d}:{len(self.carriers[d])}" for d in self.schema.nodes)
        return f"Instance({self.name or '?'} over {self.schema.name}; {sizes})"

    @property
    def total_size(self) -> int:
        return sum(len(c) for c in self.carriers.values())

    @property
    def is_empty(self) -> bool:
        return self.total_size == 0

    @cached_property
    def tables(self) -> "_Tables":
        """Integer-indexed view of the carriers and actions.

        Requires a valid instance (total actions with correct codomains);
        algorithms use this view for speed.
        """
        elems = {d: self.carriers[d] for d in self.schema.nodes}
        index = {d: {x: i for i, x in enumerate(elems[d])} for d in self.schema.nodes}
        acts = {}
        for a in self.schema.arrows:
            try:
                acts[a.name] = tuple(
                    index[a.tgt][self.actions[a.name][x]] for x in elems[a.src]
                )
            except KeyError as exc:
                raise DomainError(
                    f"action {a.name!r} of {self.name or 'instance'} is not a total "
                    f"function into the {a.tgt!r} carrier (missing {exc.args[0]!r})"
                ) from exc
        return _Tables(elems, index, acts)


@dataclass(frozen=True)
class _Tables:
    elems: dict[str, tuple[str, ...]]
    index: dict[str, dict[str, int]]
    acts: dict[str, tuple[int, ...]]


def eval_path(F: Instance, p: Path, x: str) -> str:
    """Apply the arrows of ``p`` to ``x`` left to right."""
    if p.start not in F.schema.node_index:
        raise DomainError(f"path starts at unknown node {p.start!r}")
    if x not in F.carriers[p.start]:
        raise DomainError(f"element {x!r} is not in the carrier of {p.start!r}")
    at = x
    for name in p.arrows:
        act = F.actions.get(name)
        if act is None or at not in act:
            raise DomainError(f"action {name!r} is undefined at {at!r}")
        at = act[at]
    return at


def validate_instance(F: Instance) -> ValidationResult:
    """Check totality and codomain of every action, then every relation
    pointwise.  Relation checks are skipped if an action is broken, since
    they could not be evaluated reliably."""
    out: list[Violation] = []
    s = F.schema
    for a in s.arrows:
        act = F.actions[a.name]
        src, tgt = set(F.carriers[a.src]), set(F.carriers[a.tgt])
        for x in F.carriers[a.src]:
            if x not in act:
                out.append(
                    Violation(
                        "action-total",
                        f"action {a.name!r} is undefined at {x!r}",
                        (a.name, x),
                    )
                )
        for x, y in sorted(act.items()):
            if x not in src:
                out.append(
                    Violation(
                        "action-domain",
                        f"action {a.name!r} defined at {x!r}, which is outside the "
                        f"{a.src!r} carrier",
                        (a.name, x),
                    )
                )
            elif y not in tgt:
                out.append(
                    Violation(
                        "action-codomain",
                        f"action {a.name!r} sends {x!r} to {y!r}, which is outside "
                        f"the {a.tgt!r} carrier",
                        (a.name, x, y),
                    )
                )
    if out:
        return ValidationResult(tuple(out))
    for i, (p, q) in enumerate(s.relations):
        for x in F.carriers[p.start]:
            left, right = eval_path(F, p, x), eval_path(F, q, x)
            if left != right:
                out.append(
                    Violation(
                        "relation",
                        f"relation {i} fails at {x!r}: {left!r} != {right!r}",
                        (i, x),
                    )
                )
    return ValidationResult(tuple(out))


class Morphism:
    """A per-node family of functions between two instances of one schema.

    Naturality is only required on the generating arrows; that suffices for
    full naturality because every morphism of the presented category is a
    composite of generators and both instances satisfy the relations.
    """

    def __init__(
        self,
        src: Instance,
        tgt: Instance,
        components: Mapping[str, Mapping[str, str]],
    ):
        if src.schema != tgt.schema:
            raise SchemaMismatch("morphism endpoints live over different schemas")
        for d in components:
            if d not in src.schema.node_index:
                raise ValueError(f"unknown node {d!r} in components")
        self.src = src
        self.tgt = tgt
        self.components = {d: dict(components.get(d, {})) for d in src.schema.nodes}

    @cached_property
    def key(self) -> tuple:
        return (
            self.src.key,
            self.tgt.key,
            tuple(
                tuple(sorted(self.components[d].items())) for d in self.src.schema.nodes
            ),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Morphism) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Morphism({self.src!r} -> {self.tgt!r})"

    def __call__(self, node: str, x: str) -> str:
        return self.components[node][x]

    def then(self, other: "Morphism") -> "Morphism":
        """Diagrammatic composite: ``self`` first, then ``other``."""
        if other.src != self.tgt:
            raise ValueError("composite endpoints do not match")
        comps = {
            d: {x: other.components[d][y] for x, y in self.components[d].items()}
            for d in self.src.schema.nodes
        }
        return Morphism(self.src, other.tgt, comps)

    def is_bijective(self) -> bool:
        return all(
            len(set(c.values())) == len(c) == len(self.tgt.carriers[d])
            and len(c) == len(self.src.carriers[d])
            for d, c in self.components.items()
        )

    def inverse(self) -> "Morphism":
        if not self.is_bijective():
            raise ValueError("morphism is not invertible")
        comps = {d: {y: x for x, y in c.items()} for d, c in self.components.items()}
        return Morphism(self.tgt, self.src, comps)


def identity(F: Instance) -> Morphism:
    return Morphism(F, F, {d: {x: x for x in F.carriers[d]} for d in F.schema.nodes})


def compose(g: Morphism, f: Morphism) -> Morphism:
    """Classical order: ``compose(g, f)`` applies ``f`` first."""
    return f.then(g)


def validate_morphism(m: Morphism) -> ValidationResult:
    out: list[Violation] = []
    for d in m.src.schema.nodes:
        comp = m.components[d]
        tgt_carrier = set(m.tgt.carriers[d])
        for x in m.src.carriers[d]:
            if x not in comp:
                out.append(
                    Violation(
                        "component-total", f"component at {d!r} undefined at {x!r}", (d, x)
                    )
                )
            elif comp[x] not in tgt_carrier:
                out.append(
                    Violation(
                        "component-codomain",
                        f"component at {d!r} sends {x!r} outside the target carrier",
                        (d, x),
                    )
                )
        for x in comp:
            if x not in m.src.carriers[d]:
                out.append(
                    Violation(
                        "component-domain",
                        f"component at {d!r} defined at foreign element {x!r}",
                        (d, x),
                    )
                )
    if out:
        return ValidationResult(tuple(out))
    for a in m.src.schema.arrows:
        for x in m.src.carriers[a.src]:
            left = m.components[a.tgt][m.src.actions[a.name][x]]
            right = m.tgt.actions[a.name][m.components[a.src][x]]
            if left != right:
                out.append(
                    Violation(
                        "naturality",
                        f"arrow {a.name!r} at {x!r}: "
                        f"mapping then acting gives {right!r}, acting then mapping gives {left!r}",
                        (a.name, x),
                    )
                )
    return ValidationResult(tuple(out))


# ---------------------------------------------------------------------------
# constructions


def initial(s: Schema) -> Instance:
    """The empty instance: all carriers empty."""
    return Instance(s, {}, {}, name="0")


def terminal(s: Schema) -> Instance:
    """One fixed point: every carrier a fixed singleton, all actions forced."""
    carriers = {d: ("*",) for d in s.nodes}
    actions = {a.name: {"*": "*"} for a in s.arrows}
    return Instance(s, carriers, actions, name="1")


def _require_same_schema(*instances: Instance) -> Schema:
    s = instances[0].schema
    for F in instances[1:]:
        if F.schema != s:
            raise SchemaMismatch(
                f"instances over different schemas: {s.name!r} vs {F.schema.name!r}"
            )
    return s


def coproduct(F: Instance, G: Instance) -> tuple[Instance, Morphism, Morphism]:
    """Tagged disjoint union with its two coprojections.

    Elements of ``F`` get prefix ``0.``, elements of ``G`` prefix ``1.``.
    """
    s = _require_same_schema(F, G)
    carriers = {
        d: tuple(f"0.{x}" for x in F.carriers[d]) + tuple(f"1.{x}" for x in G.carriers[d])
        for d in s.nodes
    }
    actions = {}
    for a in s.arrows:
        act = {f"0.{x}": f"0.{y}" for x, y in F.actions[a.name].items()}
        act.update({f"1.{x}": f"1.{y}" for x, y in G.actions[a.name].items()})
        actions[a.name] = act
    H = Instance(s, carriers, actions, name=_combine_names(F, G, "+"))
    i_F = Morphism(F, H, {d: {x: f"0.{x}" for x in F.carriers[d]} for d in s.nodes})
    i_G = Morphism(G, H, {d: {x: f"1.{x}" for x in G.carriers[d]} for d in s.nodes})
    return H, i_F, i_G


def coproduct_many(s: Schema, instances: Iterable[Instance]) -> tuple[Instance, list[Morphism]]:
    """Fold-left iterated coproduct; zero summands give the empty instance."""
    instances = list(instances)
    if not instances:
        return initial(s), []
    total = instances[0]
    injections = [identity(total)]
    for G in instances[1:]:
        total, i_left, i_right = coproduct(total, G)
        injections = [m.then(i_left) for m in injections]
        injections.append(i_right)
    return total, injections


def copair(u: Morphism, v: Morphism, i_F: Morphism, i_G: Morphism) -> Morphism:
    """The unique map out of a coproduct restricting to ``u`` and ``v``."""
    if u.tgt != v.tgt:
        raise ValueError("copair legs must share a target")
    H = i_F.tgt
    comps: dict[str, dict[str, str]] = {d: {} for d in H.schema.nodes}
    for d in H.schema.nodes:
        for x, tagged in i_F.components[d].items():
            comps[d][tagged] = u.components[d][x]
        for x, tagged in i_G.components[d].items():
            comps[d][tagged] = v.components[d][x]
    return Morphism(H, u.tgt, comps)


def _pair_name(x: str, y: str) -> str:
    return f"({x},{y})"


def product(F: Instance, G: Instance) -> tuple[Instance, Morphism, Morphism]:
    """Node-wise cartesian product with componentwise actions."""
    s = _require_same_schema(F, G)
    carriers = {
        d: tuple(_pair_name(x, y) for x in F.carriers[d] for y in G.carriers[d])
        for d in s.nodes
    }
    actions: dict[str, dict[str, str]] = {}
    p_comp: dict[str, dict[str, str]] = {d: {} for d in s.nodes}
    q_comp: dict[str, dict[str, str]] = {d: {} for d in s.nodes}
    for d in s.nodes:
        for x in F.carriers[d]:
            for y in G.carriers[d]:
                name = _pair_name(x, y)
                p_comp[d][name] = x
                q_comp[d][name] = y
    for a in s.arrows:
        actions[a.name] = {
            _pair_name(x, y): _pair_name(F.actions[a.name][x], G.actions[a.name][y])
            for x in F.carriers[a.src]
            for y in G.carriers[a.src]
        }
    P = Instance(s, carriers, actions, name=_combine_names(F, G, "x"))
    return P, Morphism(P, F, p_comp), Morphism(P, G, q_comp)


def pair(u: Morphism, v: Morphism, P: Instance) -> Morphism:
    """The mediator into a product built by :func:`product`."""
    if u.src != v.src:
        raise ValueError("pair legs must share a source")
    comps = {
        d: {
            z: _pair_name(u.components[d][z], v.components[d][z])
            for z in u.src.carriers[d]
        }
        for d in u.src.schema.nodes
    }
    return Morphism(u.src, P, comps)


def pullback(f: Morphism, g: Morphism) -> tuple[Instance, Morphism, Morphism]:
    """Node-wise fiber product of a cospan ``f: A -> C <- B :g``.

    Carriers are the pairs agreeing in ``C``; actions act componentwise,
    which lands back in the fiber product by naturality of ``f`` and ``g``.
    """
    if f.tgt != g.tgt:
        raise SchemaMismatch("pullback needs a common cospan target")
    A, B = f.src, g.src
    s = _require_same_schema(A, B)
    chosen = {
        d: [
            (x, y)
            for x in A.carriers[d]
            for y in B.carriers[d]
            if f.components[d][x] == g.components[d][y]
        ]
        for d in s.nodes
    }
    carriers = {d: tuple(_pair_name(x, y) for x, y in chosen[d]) for d in s.nodes}
    actions = {
        a.name: {
            _pair_name(x, y): _pair_name(A.actions[a.name][x], B.actions[a.name][y])
            for x, y in chosen[a.src]
        }
        for a in s.arrows
    }
    P = Instance(s, carriers, actions, name=_combine_names(A, B, "&"))
    p = Morphism(P, A, {d: {_pair_name(x, y): x for x, y in chosen[d]} for d in s.nodes})
    q = Morphism(P, B, {d: {_pair_name(x, y): y for x, y in chosen[d]} for d in s.nodes})
    return P, p, q


def _normalize_selection(
    F: Instance, chosen: Mapping[str, Iterable[str]]
) -> dict[str, frozenset[str]]:
    sel: dict[str, frozenset[str]] = {}
    for d in chosen:
        if d not in F.schema.node_index:
            raise DomainError(f"selection names unknown node {d!r}")
    for d in F.schema.nodes:
        picked = frozenset(chosen.get(d, ()))
        stray = picked - set(F.carriers[d])
        if stray:
            raise DomainError(
                f"selection at {d!r} contains foreign elements {sorted(stray)!r}"
            )
        sel[d] = picked
    return sel


def subinstance(F: Instance, chosen: Mapping[str, Iterable[str]], name: str | None = None) -> Instance:
    """Restrict ``F`` to an action-closed selection of elements."""
    sel = _normalize_selection(F, chosen)
    for a in F.schema.arrows:
        for x in sorted(sel[a.src]):
            y = F.actions[a.name][x]
            if y not in sel[a.tgt]:
                raise DomainError(
                    f"selection is not action-closed: arrow {a.name!r} sends "
                    f"{x!r} to unselected {y!r}"
                )
    carriers = {d: tuple(sorted(sel[d])) for d in F.schema.nodes}
    actions = {
        a.name: {x: F.actions[a.name][x] for x in carriers[a.src]}
        for a in F.schema.arrows
    }
    return Instance(F.schema, carriers, actions, name=name)


def inclusion(sub: Instance, F: Instance) -> Morphism:
    return Morphism(
        sub, F, {d: {x: x for x in sub.carriers[d]} for d in F.schema.nodes}
    )


def preimage(
    f: Morphism, selection: Mapping[str, Iterable[str]]
) -> tuple[Instance, Morphism]:
    """Node-wise preimage of an action-closed selection of the target.

    The preimage is automatically action-closed; it is returned together
    with its inclusion into the source.
    """
    tgt_sel = _normalize_selection(f.tgt, selection)
    for a in f.tgt.schema.arrows:
        for x in sorted(tgt_sel[a.src]):
            if f.tgt.actions[a.name][x] not in tgt_sel[a.tgt]:
                raise DomainError(
                    f"target selection is not action-closed at arrow {a.name!r}, "
                    f"element {x!r}"
                )
    chosen = {
        d: [x for x in f.src.carriers[d] if f.components[d][x] in tgt_sel[d]]
        for d in f.src.schema.nodes
    }
    sub = subinstance(f.src, chosen)
    return sub, inclusion(sub, f.src)


def relabel(F: Instance, seed: int) -> tuple[Instance, Morphism]:
    """Permute each carrier pseudorandomly; deterministic per seed.

    Returns the permuted instance and the witnessing isomorphism from ``F``
    to it.  Element names are reused (each carrier is permuted within
    itself), so the carrier sets coincide while the actions are conjugated.
    """
    rng = seeded_rng("relabel", seed)
    mapping: dict[str, dict[str, str]] = {}
    for d in F.schema.nodes:
        elems = list(F.carriers[d])
        shuffled = elems[:]
        rng.shuffle(shuffled)
        mapping[d] = dict(zip(elems, shuffled))
    actions = {
        a.name: {
            mapping[a.src][x]: mapping[a.tgt][y] for x, y in F.actions[a.name].items()
        }
        for a in F.schema.arrows
    }
    G = Instance(F.schema, F.carriers, actions, name=F.name)
    return G, Morphism(F, G, mapping)


def seeded_rng(*scope) -> random.Random:
    """A :class:`random.Random` seeded from a hashed scope description.

    Hashing keeps sub-streams independent of each other and of the platform;
    the same scope always yields the same stream.
    """
    text = "/".join(str(part) for part in scope)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _combine_names(F: Instance, G: Instance, op: str) -> str | None:
    if F.name and G.name:
        return f"({F.name}{op}{G.name})"
    return None
