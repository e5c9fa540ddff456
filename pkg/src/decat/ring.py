"""Arithmetic on isomorphism classes.

A :class:`DecClass` is the multiset of connected canonical forms of an
instance's components; coproduct and product of instances descend to an
addition and a multiplication of such multisets, with the empty instance
as zero and the one-fixed-point instance as one.  :class:`RingElement`
extends the multiplicities to (possibly negative) integers, which is the
group completion of the additive structure; the completion is injective
because the classes form a free commutative monoid on the connected forms.

Hom-count profiles pair either structure with a finite family of connected
test forms: the profile of a class is the vector of morphism counts from
each test form into a representative.  Profiles are additive and, entry by
entry, multiplicative; for group-like schemas the profile matrix over the
transitive classes is the classical table of marks.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .canon import CanonicalForm, canonical_form, connected_components, enumerate_instances, is_connected
from .core import Instance, Schema, SchemaMismatch, coproduct_many, product, terminal
from .homs import count_homs

__all__ = [
    "DecClass",
    "RingElement",
    "TestBasis",
    "Profile",
    "MarksTable",
    "NotAGroupError",
    "class_of",
    "zero",
    "one",
    "to_ring",
    "to_class",
    "build_basis",
    "profile",
    "ring_profile",
    "table_of_marks",
]


class NotAGroupError(ValueError):
    """A single-node schema whose instances were expected to act by
    bijections turned out not to."""


def _sorted_terms(terms: Mapping[CanonicalForm, int]) -> tuple[tuple[CanonicalForm, int], ...]:
    return tuple(sorted(((f, m) for f, m in terms.items() if m), key=lambda t: t[0].data))


@dataclass(frozen=True)
class DecClass:
    """Multiset of connected canonical forms; the empty multiset is zero."""

    schema: Schema
    parts: tuple[tuple[CanonicalForm, int], ...]

    def __post_init__(self):
        if any(m < 1 for _, m in self.parts):
            raise ValueError("multiplicities must be positive")

    @property
    def is_zero(self) -> bool:
        return not self.parts

    @property
    def component_count(self) -> int:
        return sum(m for _, m in self.parts)

    def counter(self) -> Counter:
        return Counter(dict(self.parts))

    def __add__(self, other: "DecClass") -> "DecClass":
        _same_schema(self, other)
        return DecClass(self.schema, _sorted_terms(self.counter() + other.counter()))

    def __mul__(self, other: "DecClass") -> "DecClass":
        """Bilinear extension of the product of representatives.

        Each pair of components is multiplied as instances and decomposed
        again; distributivity of the underlying product over coproducts is
        what makes this well defined, and the harness checks it."""
        _same_schema(self, other)
        acc: Counter = Counter()
        for f, m in self.parts:
            for g, n in other.parts:
                piece, _, _ = product(f.representative, g.representative)
                for h, k in class_of(piece).parts:
                    acc[h] += m * n * k
        return DecClass(self.schema, _sorted_terms(acc))

    def representative_instance(self) -> Instance:
        """A fold-left coproduct of canonical component representatives."""
        reps: list[Instance] = []
        for f, m in self.parts:
            reps.extend([f.representative] * m)
        total, _ = coproduct_many(self.schema, reps)
        return total

    def __repr__(self) -> str:
        inner = ", ".join(f"{f.digest[:8]}:{m}" for f, m in self.parts) or "0"
        return f"DecClass({self.schema.name}; {inner})"


def _same_schema(x, y) -> None:
    if x.schema != y.schema:
        raise SchemaMismatch("class arithmetic requires one schema")


def class_of(F: Instance) -> DecClass:
    """Decompose, canonicalize each component, and collect the multiset."""
    counts: Counter = Counter()
    for part in connected_components(F).components:
        counts[canonical_form(part)] += 1
    return DecClass(F.schema, _sorted_terms(counts))


def zero(s: Schema) -> DecClass:
    return DecClass(s, ())


def one(s: Schema) -> DecClass:
    return class_of(terminal(s))


@dataclass(frozen=True)
class RingElement:
    """Finitely supported integer combination of connected canonical forms."""

    schema: Schema
    terms: tuple[tuple[CanonicalForm, int], ...]

    def __post_init__(self):
        if any(c == 0 for _, c in self.terms):
            raise ValueError("zero coefficients must not be stored")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def counter(self) -> Counter:
        return Counter(dict(self.terms))

    def __add__(self, other: "RingElement") -> "RingElement":
        _same_schema(self, other)
        acc = self.counter()
        for f, c in other.terms:
            acc[f] += c
        return RingElement(self.schema, _sorted_terms(acc))

    def __neg__(self) -> "RingElement":
        return RingElement(self.schema, tuple((f, -c) for f, c in self.terms))

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __mul__(self, other: "RingElement") -> "RingElement":
        _same_schema(self, other)
        acc: Counter = Counter()
        for f, c in self.terms:
            for g, d in other.terms:
                piece, _, _ = product(f.representative, g.representative)
                for h, k in class_of(piece).parts:
                    acc[h] += c * d * k
        return RingElement(self.schema, _sorted_terms(acc))

    def scale(self, n: int) -> "RingElement":
        if n == 0:
            return RingElement(self.schema, ())
        return RingElement(self.schema, tuple((f, n * c) for f, c in self.terms))

    def __repr__(self) -> str:
        inner = " ".join(f"{c:+d}*{f.digest[:8]}" for f, c in self.terms) or "0"
        return f"RingElement({self.schema.name}; {inner})"


def ring_zero(s: Schema) -> RingElement:
    return RingElement(s, ())


def to_ring(x: DecClass) -> RingElement:
    """Multiplicities become positive coefficients; injective because the
    classes form a free commutative monoid on the connected forms."""
    return RingElement(x.schema, x.parts)


def to_class(r: RingElement) -> DecClass:
    """Partial inverse of :func:`to_ring`; defined on nonnegative elements."""
    if any(c < 0 for _, c in r.terms):
        raise ValueError("element has a negative coefficient")
    return DecClass(r.schema, r.terms)


@dataclass(frozen=True)
class TestBasis:
    """Ordered family of distinct connected forms used as test objects."""

    forms: tuple[CanonicalForm, ...]

    def __len__(self) -> int:
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)


def build_basis(s: Schema, bounds: Mapping[str, int]) -> TestBasis:
    """The connected classes of the bounded universe, in canonical order.

    The family is a truncation: profile equality over it is decisive only
    within the enumerated universe, which is why the harness reports
    profile collisions instead of asserting their absence."""
    forms = tuple(
        f for f in enumerate_instances(s, bounds) if is_connected(f.representative)
    )
    return TestBasis(forms)


@dataclass(frozen=True)
class Profile:
    basis: TestBasis
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != len(self.basis.forms):
            raise ValueError("profile length must match the basis")


@lru_cache(maxsize=None)
def _hom_count_between(c: CanonicalForm, d: CanonicalForm) -> int:
    return count_homs(c.representative, d.representative)


def profile(x: DecClass | Instance, basis: TestBasis) -> Profile:
    """Morphism counts from each basis form into ``x``.

    Computed additively over the components of ``x``; the agreement with
    direct counting into a representative is a tested law, not an
    assumption."""
    cls = class_of(x) if isinstance(x, Instance) else x
    counts = tuple(
        sum(m * _hom_count_between(b, f) for f, m in cls.parts) for b in basis.forms
    )
    return Profile(basis, counts)


def ring_profile(r: RingElement, basis: TestBasis) -> Profile:
    """Linear extension of :func:`profile` to integer coefficients."""
    counts = tuple(
        sum(c * _hom_count_between(b, f) for f, c in r.terms) for b in basis.forms
    )
    return Profile(basis, counts)


@dataclass(frozen=True)
class MarksTable:
    """Fixed-point style count matrix over the transitive classes.

    ``rows[i][j]`` counts the morphisms from basis class ``j`` into basis
    class ``i``; the basis is ordered by decreasing size (ties by canonical
    form), which makes the matrix lower triangular with positive diagonal
    for group-like schemas."""

    basis: tuple[CanonicalForm, ...]
    rows: tuple[tuple[int, ...], ...]


def table_of_marks(s: Schema, bounds: Mapping[str, int]) -> MarksTable:
    """Marks matrix of a group-like schema over the bounded universe.

    Whether the schema presents a group is the caller's responsibility;
    the only check made is that every enumerated instance acts by
    bijections, which raises :class:`NotAGroupError` otherwise."""
    forms = enumerate_instances(s, bounds)
    for f in forms:
        rep = f.representative
        for a in s.arrows:
            table = rep.tables.acts[a.name]
            if len(set(table)) != len(table):
                raise NotAGroupError(
                    f"action {a.name!r} is not a bijection on a universe instance; "
                    f"schema {s.name!r} does not present a group"
                )
    transitive = [f for f in forms if is_connected(f.representative)]
    transitive.sort(key=lambda f: (-f.total_size, f.data))
    rows = tuple(
        tuple(_hom_count_between(tj, ti) for tj in transitive) for ti in transitive
    )
    return MarksTable(tuple(transitive), rows)
