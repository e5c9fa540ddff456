"""Executable law suites over exhaustively enumerated universes.

Each suite enumerates every isomorphism class of instances within the
given carrier bounds, checks a family of structural laws on the universe
(exhaustively or on seeded random samples), and returns a
:class:`VerificationReport`.  Failures carry replayable witnesses: the
serialized instances and morphisms involved, enough to re-run the exact
check standalone via :func:`replay`.

Reports are deterministic given (schema, bounds, seed): random choices are
drawn from hashed per-trial substreams, so the same tuple always yields
the same report, byte for byte, regardless of how the work is scheduled.
Wall-clock time is kept on the in-memory report for logging but is never
part of the serialized document.

A third verdict besides pass and fail exists for the profile-separation
scan: a profile collision over a truncated test family is reported as a
FINDING, because the truncation carries no guarantee; everything else that
goes wrong is an implementation bug and is a FAIL.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from itertools import product as iproduct
from random import Random
from typing import Callable, Iterable, Mapping

from .canon import (
    canonical_form,
    connected_components,
    enumerate_instances,
    is_connected,
    normalize_bounds,
)
from .core import (
    Instance,
    Morphism,
    Schema,
    coproduct,
    coproduct_many,
    copair,
    identity,
    initial,
    preimage,
    product,
    relabel,
    seeded_rng,
    terminal,
    validate_morphism,
)
from .homs import check_conn_bijection, count_homs, find_iso, iter_homs, sample_hom
from .ring import (
    RingElement,
    TestBasis,
    build_basis,
    class_of,
    profile,
    ring_profile,
    table_of_marks,
)
from .textio import (
    instance_from_jsonable,
    instance_to_jsonable,
    morphism_from_jsonable,
    morphism_to_jsonable,
)

__all__ = [
    "VerificationReport",
    "SUITES",
    "suite_extensive",
    "suite_decomposition",
    "suite_connectedness",
    "suite_hom_morphism",
    "suite_combinatorial",
    "suite_burnside",
    "suite_selftest",
    "run_suite",
    "replay",
]


@dataclass
class VerificationReport:
    suite: str
    schema_name: str
    bounds: dict[str, int]
    seed: int
    trials: int
    universe_size: int
    failures: tuple[dict, ...]
    findings: tuple[dict, ...]
    elapsed: float

    @property
    def status(self) -> str:
        if self.failures:
            return "FAIL"
        if self.findings:
            return "FINDING"
        return "PASS"

    def to_jsonable(self) -> dict:
        # elapsed is intentionally absent: serialized reports are
        # byte-identical across reruns; timing goes to logs instead
        return {
            "suite": self.suite,
            "schema": self.schema_name,
            "bounds": self.bounds,
            "seed": self.seed,
            "trials": self.trials,
            "universe": self.universe_size,
            "status": self.status,
            "failures": list(self.failures),
            "findings": list(self.findings),
        }

    def text(self) -> str:
        bounds = ",".join(f"{d}={b}" for d, b in self.bounds.items())
        lines = [
            f"suite={self.suite} schema={self.schema_name} bounds={bounds or '-'} "
            f"seed={self.seed} trials={self.trials} universe={self.universe_size} "
            f"failures={len(self.failures)} findings={len(self.findings)} "
            f"status={self.status}"
        ]
        for kind, entries in (("failure", self.failures), ("finding", self.findings)):
            for entry in entries:
                payload = json.dumps(entry, sort_keys=True, separators=(",", ":"))
                lines.append(f"{kind} {payload}")
        return "\n".join(lines)


def _witness(prop: str, **data) -> dict:
    return {"property": prop, **data}


def _inst(F: Instance) -> dict:
    return instance_to_jsonable(F)


def _universe(schema: Schema, bounds: Mapping[str, int]) -> list[Instance]:
    return [f.representative for f in enumerate_instances(schema, bounds)]


def _report(suite, schema, bounds, seed, trials, universe, failures, findings, t0):
    return VerificationReport(
        suite=suite,
        schema_name=schema.name,
        bounds=normalize_bounds(schema, bounds),
        seed=seed,
        trials=trials,
        universe_size=universe,
        failures=tuple(failures),
        findings=tuple(findings),
        elapsed=time.monotonic() - t0,
    )


# ---------------------------------------------------------------------------
# reusable checks (the same functions back the suites and witness replay)


def pullback_square_failure(
    p: Morphism, q: Morphism, f: Morphism, g: Morphism, tests: Iterable[Instance]
) -> dict | None:
    """None if the square (p, q) over the cospan (f, g) commutes and has
    the pullback property against every test object, else a reason."""
    if p.then(f) != q.then(g):
        return {"reason": "square does not commute"}
    P, A, B = p.src, f.src, g.src
    for D in tests:
        mediated: dict[tuple, int] = {}
        for w in iter_homs(D, P):
            key = (w.then(p).key, w.then(q).key)
            mediated[key] = mediated.get(key, 0) + 1
        cones = set()
        for u in iter_homs(D, A):
            uf = u.then(f)
            for v in iter_homs(D, B):
                if uf == v.then(g):
                    cones.add((u.key, v.key))
        if set(mediated) != cones or any(n != 1 for n in mediated.values()):
            return {
                "reason": "universal property fails",
                "test_object": _inst(D),
                "cones": len(cones),
                "mediators": sum(mediated.values()),
            }
    return None


def coproduct_square_failures(
    H: Instance,
    i_A: Morphism,
    i_B: Morphism,
    A: Instance,
    B: Instance,
    tests: list[Instance],
) -> list[tuple[str, dict]]:
    """The three squares every coproduct diagram must make into pullbacks:
    each coprojection against itself (apex the summand) and the two
    coprojections against each other (apex empty)."""
    empty = initial(A.schema)
    to_A = Morphism(empty, A, {})
    to_B = Morphism(empty, B, {})
    squares = [
        ("coproduct-square-left", identity(A), identity(A), i_A, i_A),
        ("coproduct-square-right", identity(B), identity(B), i_B, i_B),
        ("coproduct-square-disjoint", to_A, to_B, i_A, i_B),
    ]
    out = []
    for prop, p, q, f, g in squares:
        detail = pullback_square_failure(p, q, f, g, tests)
        if detail is not None:
            out.append((prop, detail))
    return out


def images_overlap(X: Instance, i_A: Morphism, i_B: Morphism) -> bool:
    img_A = {h.then(i_A).key for h in iter_homs(X, i_A.src)}
    img_B = {h.then(i_B).key for h in iter_homs(X, i_B.src)}
    return bool(img_A & img_B)


def strictness_failure(X: Instance) -> dict | None:
    empty = initial(X.schema)
    expected = 1 if X.is_empty else 0
    got = count_homs(X, empty)
    if got != expected:
        return {"expected": expected, "got": got}
    return None


def preimage_split_failure(
    f: Morphism, X: Instance, Y: Instance
) -> tuple[dict | None, list[tuple[str, dict]]]:
    """Check that pulling a map into a coproduct back along the two
    summands splits the source, and that both resulting squares are
    pullbacks.  Returns (split failure, square failures)."""
    A = f.src
    H, i_X, i_Y = coproduct(X, Y)
    if f.tgt != H:
        return {"reason": "map does not land in the tagged coproduct"}, []
    square_fails: list[tuple[str, dict]] = []
    parts = {}
    for side, summand, inj in (("left", X, i_X), ("right", Y, i_Y)):
        selection = {
            d: [inj.components[d][x] for x in summand.carriers[d]]
            for d in H.schema.nodes
        }
        sub, incl = preimage(f, selection)
        # the corestriction of f to the summand
        inv = {d: {v: k for k, v in inj.components[d].items()} for d in H.schema.nodes}
        g = Morphism(
            sub,
            summand,
            {
                d: {x: inv[d][f.components[d][x]] for x in sub.carriers[d]}
                for d in H.schema.nodes
            },
        )
        parts[side] = (sub, incl, g, inj)
    (A_X, incl_X, g_X, _), (A_Y, incl_Y, g_Y, _) = parts["left"], parts["right"]
    C, j_X, j_Y = coproduct(A_X, A_Y)
    w = copair(incl_X, incl_Y, j_X, j_Y)
    split_fail = None
    if not (validate_morphism(w).ok and w.is_bijective()):
        split_fail = {"reason": "preimages do not recompose to the source"}
    tests = [initial(A.schema), A_X, A_Y, X, Y]
    for side, (sub, incl, g, inj) in parts.items():
        detail = pullback_square_failure(incl, g, f, inj, tests)
        if detail is not None:
            detail["side"] = side
            square_fails.append(("preimage-square-pullback", detail))
    return split_fail, square_fails


def decomposition_failure(F: Instance) -> dict | None:
    dec = connected_components(F)
    if F.is_empty and dec.components:
        return {"reason": "empty instance decomposed into components"}
    for part in dec.components:
        if not is_connected(part):
            return {"reason": "component not connected", "component": _inst(part)}
    if not validate_morphism(dec.witness).ok or not dec.witness.is_bijective():
        return {"reason": "witness is not an isomorphism"}
    if dec.witness.tgt != F:
        return {"reason": "witness does not land in the original"}
    return None


def self_sum_bound_failure(F: Instance) -> dict | None:
    dec = connected_components(F)
    n = len(dec.components)
    FF, _, _ = coproduct(F, F)
    total = count_homs(F, FF)
    prod = 1
    for part in dec.components:
        prod *= count_homs(part, FF)
    if total != prod or total < 2**n:
        return {"components": n, "count": total, "componentwise_product": prod}
    return None


def cancellation_failure(C: Instance, X: Instance, Xp: Instance) -> dict | None:
    left = canonical_form(coproduct(C, X)[0])
    right = canonical_form(coproduct(C, Xp)[0])
    if left == right and canonical_form(X) != canonical_form(Xp):
        return {"reason": "sums agree but summands differ"}
    return None


def connectivity_agreement_failure(F: Instance, A: Instance, B: Instance) -> dict | None:
    conn = is_connected(F)
    bij = check_conn_bijection(F, A, B)
    if conn and not bij:
        return {"reason": "connected instance fails the hom-sum bijection"}
    if not conn and bij:
        return {"reason": "witness pair is bijective despite disconnectedness"}
    return None


def dichotomy_failure(F: Instance) -> dict | None:
    if is_connected(F):
        return None
    comps = connected_components(F).components
    if not comps:
        if not F.is_empty:
            return {"reason": "no components but instance nonempty"}
        return None
    U = comps[0]
    V, _ = coproduct_many(F.schema, comps[1:])
    if U.is_empty or V.is_empty:
        return {"reason": "split has an empty side"}
    glued, _, _ = coproduct(U, V)
    if find_iso(glued, F) is None:
        return {"reason": "split does not recompose to the instance"}
    return None


def additivity_failure(C: Instance, A: Instance, B: Instance) -> dict | None:
    if not is_connected(C):
        return None
    H, _, _ = coproduct(A, B)
    total = count_homs(C, H)
    split = count_homs(C, A) + count_homs(C, B)
    if total != split:
        return {"into_sum": total, "sum_of_counts": split}
    return None


def multiplicativity_failure(D: Instance, A: Instance, B: Instance) -> dict | None:
    P, _, _ = product(A, B)
    total = count_homs(D, P)
    split = count_homs(D, A) * count_homs(D, B)
    if total != split:
        return {"into_product": total, "product_of_counts": split}
    return None


def distributivity_failure(A: Instance, B: Instance, C: Instance) -> dict | None:
    H, _, _ = coproduct(B, C)
    left = class_of(product(A, H)[0])
    right = class_of(coproduct(product(A, B)[0], product(A, C)[0])[0])
    if left != right:
        return {"reason": "product does not distribute over the sum"}
    return None


# ---------------------------------------------------------------------------
# suites


def suite_extensive(
    schema: Schema, bounds: Mapping[str, int], seed: int = 0, trials: int = 100
) -> VerificationReport:
    """Coproduct squares are pullbacks, morphisms into the empty instance
    force emptiness, maps into a sum split the source along preimages, and
    hom images of the two coprojections never meet for nonempty sources."""
    t0 = time.monotonic()
    reps = _universe(schema, bounds)
    failures: list[dict] = []
    empty = initial(schema)
    for F in reps:
        detail = strictness_failure(F)
        if detail is not None:
            failures.append(_witness("strictness", X=_inst(F), **detail))
    for t in range(trials):
        rng = seeded_rng(seed, "extensive", t)
        A, B = rng.choice(reps), rng.choice(reps)
        H, i_A, i_B = coproduct(A, B)
        tests = [empty, A, B, H, rng.choice(reps), terminal(schema)]
        for prop, detail in coproduct_square_failures(H, i_A, i_B, A, B, tests):
            failures.append(_witness(prop, A=_inst(A), B=_inst(B), **detail))
        X_img = rng.choice(reps)
        if not X_img.is_empty:
            A2, B2 = rng.choice(reps), rng.choice(reps)
            _, j_A, j_B = coproduct(A2, B2)
            if images_overlap(X_img, j_A, j_B):
                failures.append(
                    _witness(
                        "hom-image-disjoint",
                        X=_inst(X_img), A=_inst(A2), B=_inst(B2),
                    )
                )
        f = None
        for _ in range(5):
            X, Y, A3 = rng.choice(reps), rng.choice(reps), rng.choice(reps)
            XY, _, _ = coproduct(X, Y)
            f = sample_hom(rng, A3, XY)
            if f is not None:
                break
        if f is not None:
            split_fail, square_fails = preimage_split_failure(f, X, Y)
            base = dict(f=morphism_to_jsonable(f), X=_inst(X), Y=_inst(Y))
            if split_fail is not None:
                failures.append(_witness("preimage-splitting", **base, **split_fail))
            for prop, detail in square_fails:
                failures.append(_witness(prop, **base, **detail))
    return _report("extensive", schema, bounds, seed, trials, len(reps), failures, [], t0)


def suite_decomposition(
    schema: Schema, bounds: Mapping[str, int], seed: int = 0, trials: int = 100
) -> VerificationReport:
    """Every instance splits into validated connected components, the
    component multiset survives relabeling and re-bracketing, connected
    summands cancel, and self-sum hom counts factor componentwise with the
    two-to-the-components lower bound."""
    t0 = time.monotonic()
    reps = _universe(schema, bounds)
    failures: list[dict] = []
    for F in reps:
        detail = decomposition_failure(F)
        if detail is not None:
            failures.append(_witness("decomposition-witness", F=_inst(F), **detail))
        detail = self_sum_bound_failure(F)
        if detail is not None:
            failures.append(_witness("hom-self-sum-bound", F=_inst(F), **detail))
    for t in range(trials):
        rng = seeded_rng(seed, "decomposition", t)
        F = rng.choice(reps)
        parts = list(connected_components(F).components)
        base = sorted(canonical_form(p).data for p in parts)
        rseed = rng.randrange(2**30)
        order = list(range(len(parts)))
        rng.shuffle(order)
        regrouped, _ = coproduct_many(schema, [parts[i] for i in order])
        for variant, extra in (
            (relabel(F, rseed)[0], {"variant": "relabel", "relabel_seed": rseed}),
            (regrouped, {"variant": "rebracket", "order": order}),
        ):
            got = sorted(
                canonical_form(p).data for p in connected_components(variant).components
            )
            if got != base:
                failures.append(_witness("decomposition-shuffle", F=_inst(F), **extra))
    connected_reps = [F for F in reps if is_connected(F)]
    for C in connected_reps:
        buckets: dict[bytes, Instance] = {}
        for X in reps:
            key = canonical_form(coproduct(C, X)[0]).data
            other = buckets.get(key)
            if other is None:
                buckets[key] = X
            elif canonical_form(other) != canonical_form(X):
                failures.append(
                    _witness(
                        "cancellation", C=_inst(C), X=_inst(other), Xp=_inst(X),
                    )
                )
    return _report(
        "decomposition", schema, bounds, seed, trials, len(reps), failures, [], t0
    )


def suite_connectedness(
    schema: Schema, bounds: Mapping[str, int], seed: int = 0, trials: int = 50
) -> VerificationReport:
    """The union-find verdict agrees with the hom-sum bijection test over
    sampled target pairs (plus a canonical witness pair for split or empty
    instances), and every disconnected instance is empty or splits into
    two nonempty halves."""
    t0 = time.monotonic()
    reps = _universe(schema, bounds)
    failures: list[dict] = []
    for idx, F in enumerate(reps):
        rng = seeded_rng(seed, "connectedness", idx)
        pairs = [(rng.choice(reps), rng.choice(reps)) for _ in range(trials)]
        if not is_connected(F):
            comps = connected_components(F).components
            if comps:
                U = comps[0]
                V, _ = coproduct_many(schema, comps[1:])
                pairs.append((U, V))
            else:
                pairs.append((F, F))
        for A, B in pairs:
            detail = connectivity_agreement_failure(F, A, B)
            if detail is not None:
                failures.append(
                    _witness(
                        "connectivity-agreement",
                        F=_inst(F), A=_inst(A), B=_inst(B), **detail,
                    )
                )
                break
        detail = dichotomy_failure(F)
        if detail is not None:
            failures.append(_witness("connectivity-dichotomy", F=_inst(F), **detail))
    return _report(
        "connectedness", schema, bounds, seed, trials, len(reps), failures, [], t0
    )


def suite_hom_morphism(
    schema: Schema, bounds: Mapping[str, int], seed: int = 0, trials: int = 100
) -> VerificationReport:
    """Hom counts out of connected instances are additive in coproducts,
    hom counts into products always multiply, and products distribute over
    coproducts up to component multisets."""
    t0 = time.monotonic()
    reps = _universe(schema, bounds)
    connected_reps = [F for F in reps if is_connected(F)]
    failures: list[dict] = []
    for t in range(trials):
        rng = seeded_rng(seed, "hom-morphism", t)
        if connected_reps:
            C = rng.choice(connected_reps)
            A, B = rng.choice(reps), rng.choice(reps)
            detail = additivity_failure(C, A, B)
            if detail is not None:
                failures.append(
                    _witness("hom-additivity", C=_inst(C), A=_inst(A), B=_inst(B), **detail)
                )
        D, A2, B2 = rng.choice(reps), rng.choice(reps), rng.choice(reps)
        detail = multiplicativity_failure(D, A2, B2)
        if detail is not None:
            failures.append(
                _witness("hom-multiplicativity", D=_inst(D), A=_inst(A2), B=_inst(B2), **detail)
            )
        A3, B3, C3 = rng.choice(reps), rng.choice(reps), rng.choice(reps)
        detail = distributivity_failure(A3, B3, C3)
        if detail is not None:
            failures.append(
                _witness("product-distributivity", A=_inst(A3), B=_inst(B3), C=_inst(C3), **detail)
            )
    return _report(
        "hom_morphism", schema, bounds, seed, trials, len(reps), failures, [], t0
    )


def suite_combinatorial(
    schema: Schema, bounds: Mapping[str, int], seed: int = 0, trials: int = 0
) -> VerificationReport:
    """Profiles over the connected classes of the universe are invariant
    under relabeling, and any two universe members sharing a profile must
    be isomorphic.  A collision is a FINDING about the truncated test
    family, not a failure of the arithmetic; the bounded family carries no
    separation guarantee."""
    t0 = time.monotonic()
    forms = enumerate_instances(schema, bounds)
    reps = [f.representative for f in forms]
    basis = build_basis(schema, bounds)
    failures: list[dict] = []
    findings: list[dict] = []
    seen: dict[tuple[int, ...], Instance] = {}
    for F in reps:
        vec = profile(F, basis).counts
        other = seen.get(vec)
        if other is not None:
            findings.append(
                _witness(
                    "profile-collision",
                    A=_inst(other), B=_inst(F), profile=list(vec),
                    bounds=normalize_bounds(schema, bounds),
                )
            )
        else:
            seen[vec] = F
    for idx, F in enumerate(reps):
        vec = profile(F, basis).counts
        for k in (1, 2):
            shuffled, _ = relabel(F, seed + k)
            if profile(shuffled, basis).counts != vec:
                failures.append(
                    _witness(
                        "profile-invariance",
                        F=_inst(F), relabel_seed=seed + k,
                        bounds=normalize_bounds(schema, bounds),
                    )
                )
    return _report(
        "combinatorial", schema, bounds, seed, trials, len(reps), failures, findings, t0
    )


def suite_burnside(
    schema: Schema, bounds: Mapping[str, int], seed: int = 0, trials: int = 0
) -> VerificationReport:
    """The marks matrix over the transitive classes is lower triangular
    with positive diagonal under the size ordering, and integer
    combinations of the transitive classes with small coefficients are
    separated by their profiles."""
    t0 = time.monotonic()
    marks = table_of_marks(schema, bounds)
    failures: list[dict] = []
    k = len(marks.basis)
    for i in range(k):
        if marks.rows[i][i] < 1:
            failures.append(
                _witness("marks-triangular", row=i, col=i, value=marks.rows[i][i],
                         bounds=normalize_bounds(schema, bounds))
            )
        for j in range(i + 1, k):
            if marks.rows[i][j] != 0:
                failures.append(
                    _witness("marks-triangular", row=i, col=j, value=marks.rows[i][j],
                             bounds=normalize_bounds(schema, bounds))
                )
    basis = TestBasis(marks.basis)
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    for coeffs in iproduct(range(-2, 3), repeat=k):
        terms = tuple((f, c) for f, c in zip(marks.basis, coeffs) if c)
        vec = ring_profile(RingElement(schema, terms), basis).counts
        other = seen.get(vec)
        if other is not None:
            failures.append(
                _witness(
                    "ghost-injectivity", coeffs1=list(other), coeffs2=list(coeffs),
                    bounds=normalize_bounds(schema, bounds),
                )
            )
        else:
            seen[vec] = coeffs
    universe = len(enumerate_instances(schema, bounds))
    return _report("burnside", schema, bounds, seed, trials, universe, failures, [], t0)


def suite_selftest(
    schema: Schema, bounds: Mapping[str, int] | None = None, seed: int = 0, trials: int = 0
) -> VerificationReport:
    """Feed a deliberately corrupted coproduct (both injections sharing a
    tag) through the extensivity checks and confirm they notice.  Passing
    means the detectors detect; a failure here means the harness itself is
    blind."""
    t0 = time.monotonic()
    one_pt = terminal(schema)
    fake_H, fake_iA, fake_iB = one_pt, identity(one_pt), identity(one_pt)
    failures: list[dict] = []
    detected_squares = bool(
        coproduct_square_failures(
            fake_H, fake_iA, fake_iB, one_pt, one_pt, [initial(schema), one_pt]
        )
    )
    if not detected_squares:
        failures.append(
            _witness("selftest-detection", check="coproduct-squares",
                     reason="corrupted coproduct passed the pullback checks")
        )
    if schema.nodes and not images_overlap(one_pt, fake_iA, fake_iB):
        failures.append(
            _witness("selftest-detection", check="hom-image-disjoint",
                     reason="shared tag not seen as overlapping images")
        )
    return _report("selftest", schema, bounds or {}, seed, trials, 0, failures, [], t0)


SUITES: dict[str, Callable[..., VerificationReport]] = {
    "extensive": suite_extensive,
    "decomposition": suite_decomposition,
    "connectedness": suite_connectedness,
    "hom_morphism": suite_hom_morphism,
    "combinatorial": suite_combinatorial,
    "burnside": suite_burnside,
    "selftest": suite_selftest,
}


def run_suite(
    name: str, schema: Schema, bounds: Mapping[str, int], seed: int = 0, trials: int = 100
) -> VerificationReport:
    return SUITES[name](schema, bounds, seed=seed, trials=trials)


# ---------------------------------------------------------------------------
# witness replay


def _rp_instance(schema: Schema, obj) -> Instance:
    return instance_from_jsonable(schema, obj)


def replay(schema: Schema, witness: Mapping) -> bool:
    """Re-run the check behind a failure witness; True iff it still fails.

    Witnesses carry full instance and morphism data, so a replay needs
    only the schema they were recorded over.
    """
    prop = witness["property"]
    get = witness.__getitem__

    if prop in ("coproduct-square-left", "coproduct-square-right", "coproduct-square-disjoint"):
        A = _rp_instance(schema, get("A"))
        B = _rp_instance(schema, get("B"))
        H, i_A, i_B = coproduct(A, B)
        if "test_object" in witness:
            tests = [_rp_instance(schema, get("test_object"))]
        else:
            tests = [initial(schema), A, B, H, terminal(schema)]
        fails = dict(coproduct_square_failures(H, i_A, i_B, A, B, tests))
        return prop in fails
    if prop == "strictness":
        return strictness_failure(_rp_instance(schema, get("X"))) is not None
    if prop == "hom-image-disjoint":
        X = _rp_instance(schema, get("X"))
        A = _rp_instance(schema, get("A"))
        B = _rp_instance(schema, get("B"))
        _, i_A, i_B = coproduct(A, B)
        return not X.is_empty and images_overlap(X, i_A, i_B)
    if prop in ("preimage-splitting", "preimage-square-pullback"):
        f = morphism_from_jsonable(schema, get("f"))
        X = _rp_instance(schema, get("X"))
        Y = _rp_instance(schema, get("Y"))
        split_fail, square_fails = preimage_split_failure(f, X, Y)
        if prop == "preimage-splitting":
            return split_fail is not None
        return bool(square_fails)
    if prop == "decomposition-witness":
        return decomposition_failure(_rp_instance(schema, get("F"))) is not None
    if prop == "hom-self-sum-bound":
        return self_sum_bound_failure(_rp_instance(schema, get("F"))) is not None
    if prop == "decomposition-shuffle":
        F = _rp_instance(schema, get("F"))
        parts = list(connected_components(F).components)
        base = sorted(canonical_form(p).data for p in parts)
        if get("variant") == "relabel":
            variant = relabel(F, get("relabel_seed"))[0]
        else:
            variant, _ = coproduct_many(schema, [parts[i] for i in get("order")])
        got = sorted(canonical_form(p).data for p in connected_components(variant).components)
        return got != base
    if prop == "cancellation":
        return (
            cancellation_failure(
                _rp_instance(schema, get("C")),
                _rp_instance(schema, get("X")),
                _rp_instance(schema, get("Xp")),
            )
            is not None
        )
    if prop == "connectivity-agreement":
        return (
            connectivity_agreement_failure(
                _rp_instance(schema, get("F")),
                _rp_instance(schema, get("A")),
                _rp_instance(schema, get("B")),
            )
            is not None
        )
    if prop == "connectivity-dichotomy":
        return dichotomy_failure(_rp_instance(schema, get("F"))) is not None
    if prop == "hom-additivity":
        return (
            additivity_failure(
                _rp_instance(schema, get("C")),
                _rp_instance(schema, get("A")),
                _rp_instance(schema, get("B")),
            )
            is not None
        )
    if prop == "hom-multiplicativity":
        return (
            multiplicativity_failure(
                _rp_instance(schema, get("D")),
                _rp_instance(schema, get("A")),
                _rp_instance(schema, get("B")),
            )
            is not None
        )
    if prop == "product-distributivity":
        return (
            distributivity_failure(
                _rp_instance(schema, get("A")),
                _rp_instance(schema, get("B")),
                _rp_instance(schema, get("C")),
            )
            is not None
        )
    if prop == "profile-invariance":
        F = _rp_instance(schema, get("F"))
        basis = build_basis(schema, get("bounds"))
        return (
            profile(relabel(F, get("relabel_seed"))[0], basis).counts
            != profile(F, basis).counts
        )
    if prop == "profile-collision":
        A = _rp_instance(schema, get("A"))
        B = _rp_instance(schema, get("B"))
        basis = build_basis(schema, get("bounds"))
        return (
            profile(A, basis).counts == profile(B, basis).counts
            and canonical_form(A) != canonical_form(B)
        )
    if prop == "marks-triangular":
        marks = table_of_marks(schema, get("bounds"))
        i, j = get("row"), get("col")
        if i == j:
            return marks.rows[i][i] < 1
        return marks.rows[i][j] != 0
    if prop == "ghost-injectivity":
        marks = table_of_marks(schema, get("bounds"))
        basis = TestBasis(marks.basis)
        vecs = []
        for coeffs in (get("coeffs1"), get("coeffs2")):
            terms = tuple((f, c) for f, c in zip(marks.basis, coeffs) if c)
            vecs.append(ring_profile(RingElement(schema, terms), basis).counts)
        return vecs[0] == vecs[1]
    raise ValueError(f"witness for unknown property {prop!r}")
