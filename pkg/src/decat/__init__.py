"""Finite schema instances and their class arithmetic.

Schemas are finite quivers with path relations; instances are finite-set
actions of them (digraphs and finite group actions are special cases).
The package enumerates and counts morphisms, computes canonical forms and
connected-component decompositions, does multiset and integer arithmetic
on isomorphism classes, builds hom-count profiles and tables of marks, and
verifies the structural laws behind all of that on exhaustively enumerated
universes.
"""

from .canon import (
    CanonicalForm,
    Decomposition,
    canonical_form,
    canonical_relabeling,
    connected_components,
    enumerate_instances,
    is_connected,
    raw_candidate_count,
)
from .core import (
    Arrow,
    DomainError,
    Instance,
    Morphism,
    Path,
    Schema,
    SchemaMismatch,
    ValidationResult,
    Violation,
    compose,
    coproduct,
    coproduct_many,
    copair,
    eval_path,
    identity,
    inclusion,
    initial,
    pair,
    preimage,
    product,
    pullback,
    relabel,
    subinstance,
    terminal,
    validate_instance,
    validate_morphism,
    validate_schema,
)
from .exprs import ExprSyntaxError, UnknownIdentifier, eval_expr, parse_expr
from .harness import SUITES, VerificationReport, replay, run_suite
from .homs import (
    HomSet,
    check_conn_bijection,
    count_homs,
    enumerate_homs,
    find_iso,
    sample_hom,
)
from .ring import (
    DecClass,
    MarksTable,
    NotAGroupError,
    Profile,
    RingElement,
    TestBasis,
    build_basis,
    class_of,
    one,
    profile,
    ring_profile,
    table_of_marks,
    to_class,
    to_ring,
    zero,
)

__version__ = "0.1.0"
