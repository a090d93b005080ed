"""Class presentations: theory-defined classes and explicit finite catalogs.

A defined class is the models of a theory up to a size cap, ordered by the
starred fragment-elementarity relation.  An explicit class is a finite list
of representatives with an order table between them, closed under renaming
by convention: membership and order transport along isomorphisms.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache

from . import sexpr
from .errors import CapacityError, ParseError, ShapeError
from .reports import (
    FAIL,
    NOT_FINITELY_TESTABLE,
    PASS,
    VerificationReport,
    structure_witness,
    subset_witness,
)
from .semantics import ElemReport, elem_F_star, enumerate_models, models
from .structures import (
    FiniteStructure,
    decorated,
    find_isomorphism,
    relabel,
)
from .syntax import Fragment, KappaThreshold, Theory, UNBOUNDED, subformula_closure
from .formats import structure_from_node, theory_from_node


@dataclass(frozen=True)
class Caps:
    """Resolution bounds for verification sweeps."""

    size: int = 4
    tuple_len: int = 2
    subset_limit: int = 1 << 16
    raw_limit: int = 5_000_000


@dataclass(frozen=True)
class DefinedClass:
    """Models of a theory up to a size cap, ordered by starred elementarity."""

    name: str
    theory: Theory
    kappa: KappaThreshold = UNBOUNDED
    size_cap: int = 4
    hereditary: bool = False

    @property
    def vocabulary(self):
        return self.theory.vocabulary

    @property
    def fragment(self) -> Fragment:
        return _fragment_of(self.theory)

    def members(self, max_size: int | None = None) -> tuple[FiniteStructure, ...]:
        cap = self.size_cap if max_size is None else min(max_size, self.size_cap)
        return _defined_members(self, cap)

    def contains(self, n: FiniteStructure) -> bool:
        if n.vocab != self.vocabulary or n.size > self.size_cap:
            return False
        return models(n, self.theory, self.kappa)

    def le(self, m: FiniteStructure, n: FiniteStructure) -> ElemReport:
        return elem_F_star(m, n, self.fragment, self.kappa)


@lru_cache(maxsize=256)
def _fragment_of(theory: Theory) -> Fragment:
    return subformula_closure(theory)


@lru_cache(maxsize=64)
def _defined_members(spec: DefinedClass, cap: int) -> tuple[FiniteStructure, ...]:
    return tuple(
        enumerate_models(
            spec.theory,
            max_size=cap,
            kappa=spec.kappa,
            up_to_iso=True,
            hereditary=spec.hereditary,
        )
    )


@dataclass(frozen=True)
class ExplicitClass:
    """A finite list of representatives with an order table over their indices.

    The table pairs (i, j) assert that representative i sits strongly inside
    representative j; representative i must literally be an induced
    substructure of representative j.  Reflexive pairs are implied.
    """

    name: str
    reps: tuple[FiniteStructure, ...]
    order: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        n = len(self.reps)
        table = set(self.order)
        for i, j in table:
            if not (0 <= i < n and 0 <= j < n):
                raise ShapeError(f"order index pair ({i}, {j}) out of range")
            if not self.reps[i].is_substructure_of(self.reps[j]):
                raise ShapeError(
                    f"order pair ({i}, {j}) does not hold between literal substructures"
                )
        table.update((i, i) for i in range(n))
        object.__setattr__(self, "order", frozenset(table))
        if n:
            vocabs = {r.vocab for r in self.reps}
            if len(vocabs) != 1:
                raise ShapeError("explicit representatives must share one vocabulary")

    @property
    def vocabulary(self):
        if not self.reps:
            from .vocab import EMPTY_VOCABULARY

            return EMPTY_VOCABULARY
        return self.reps[0].vocab

    @property
    def size_cap(self) -> int:
        return max((r.size for r in self.reps), default=0)

    def members(self, max_size: int | None = None) -> tuple[FiniteStructure, ...]:
        cap = self.size_cap if max_size is None else max_size
        return tuple(r for r in self.reps if r.size <= cap)

    def contains(self, n: FiniteStructure) -> bool:
        if self.reps and n.vocab != self.vocabulary:
            return False
        return any(
            r.size == n.size and find_isomorphism(n, r) is not None for r in self.reps
        )

    def le(self, m: FiniteStructure, n: FiniteStructure) -> bool:
        """Order transported along isomorphism from the table entries."""
        if not m.is_substructure_of(n):
            return False
        target = decorated(n, (frozenset(m.universe),))
        for i, j in sorted(self.order):
            entry = decorated(self.reps[j], (frozenset(self.reps[i].universe),))
            if target.size == entry.size and find_isomorphism(target, entry) is not None:
                return True
        return False


ModelClassSpec = DefinedClass | ExplicitClass


def _closed_subsets(n: FiniteStructure, caps: Caps):
    """Function-closed subsets of the universe, smallest first, deterministic."""
    elems = sorted(n.universe)
    if 2 ** len(elems) > caps.subset_limit:
        raise CapacityError(
            f"2^{len(elems)} subsets exceed the cap", count=2 ** len(elems), limit=caps.subset_limit
        )
    for k in range(len(elems) + 1):
        for combo in itertools.combinations(elems, k):
            subset = frozenset(combo)
            if n.is_closed_subset(subset):
                yield subset


def check_class_properties(spec: ModelClassSpec, caps: Caps = Caps()) -> VerificationReport:
    """Finite slice of the class axioms: order laws, coherence, renaming closure.

    Chain and size-bound axioms quantify over infinite objects and are
    reported as not finitely testable.
    """
    report = VerificationReport(
        command=f"check_class_properties {spec.name}", caps={"size": caps.size}
    )
    members = spec.members(caps.size)

    refl_bad = [n for n in members if not spec.le(n, n)]
    report.add(
        "order-reflexive",
        FAIL if refl_bad else PASS,
        {"members": len(members)},
        [structure_witness("member", n) for n in refl_bad[:3]],
    )

    sub_pairs: list[tuple[FiniteStructure, FiniteStructure]] = []
    for n in members:
        for subset in _closed_subsets(n, caps):
            m = n.induced(subset)
            if spec.contains(m):
                sub_pairs.append((m, n))

    anti_bad = [
        (m, n)
        for m, n in sub_pairs
        if m != n and spec.le(m, n) and spec.le(n, m)
    ]
    report.add(
        "order-antisymmetric",
        FAIL if anti_bad else PASS,
        {"pairs": len(sub_pairs)},
        [structure_witness("pair-member", m) for m, _ in anti_bad[:3]],
    )

    trans_bad = []
    coher_bad = []
    triples = 0
    for n2 in members:
        for s1 in _closed_subsets(n2, caps):
            m1 = n2.induced(s1)
            if not spec.contains(m1):
                continue
            le_m1_n2 = bool(spec.le(m1, n2))
            for s0 in _closed_subsets(m1, caps):
                m0 = m1.induced(s0)
                if not spec.contains(m0):
                    continue
                triples += 1
                if le_m1_n2 and spec.le(m0, m1) and not spec.le(m0, n2):
                    trans_bad.append((m0, m1, n2))
                if le_m1_n2 and spec.le(m0, n2) and not spec.le(m0, m1):
                    coher_bad.append((m0, m1, n2))
    report.add(
        "order-transitive",
        FAIL if trans_bad else PASS,
        {"triples": triples},
        [
            w
            for m0, m1, n2 in trans_bad[:2]
            for w in (
                structure_witness("inner", m0),
                structure_witness("middle", m1),
                structure_witness("outer", n2),
            )
        ],
    )
    report.add(
        "coherence",
        FAIL if coher_bad else PASS,
        {"triples": triples},
        [
            w
            for m0, m1, n2 in coher_bad[:2]
            for w in (
                structure_witness("inner", m0),
                structure_witness("middle", m1),
                structure_witness("outer", n2),
            )
        ],
    )

    not_sub = [
        (m, n)
        for m in members
        for n in members
        if not m.is_substructure_of(n) and spec.le(m, n)
    ]
    report.add(
        "order-implies-substructure",
        FAIL if not_sub else PASS,
        {"pairs": len(members) ** 2},
        [structure_witness("smaller", m) for m, _ in not_sub[:3]],
    )

    iso_bad = []
    relabelings = 0
    for n in members:
        elems = sorted(n.universe)
        perms = itertools.permutations(elems)
        for perm in itertools.islice(perms, 24):
            mapping = dict(zip(elems, perm))
            copy = relabel(n, mapping)
            relabelings += 1
            if not spec.contains(copy):
                iso_bad.append(copy)
    report.add(
        "isomorphism-closure",
        FAIL if iso_bad else PASS,
        {"relabelings": relabelings},
        [structure_witness("relabeled-copy", c) for c in iso_bad[:3]],
    )

    report.add(
        "chain-axioms",
        NOT_FINITELY_TESTABLE,
        note="union-of-chain axioms quantify over infinite chains",
    )
    report.add(
        "size-bound-axiom",
        NOT_FINITELY_TESTABLE,
        note="the size-bound axiom concerns infinite cardinals; caps stand in",
    )
    return report


# ---------------------------------------------------------------------------
# class spec files


def class_spec_from_node(node, base_dir: str = ".", name_hint: str = "class"):
    items = node
    if not isinstance(items, list) or not items or items[0] != "class":
        raise ParseError(f"expected (class ...), found {sexpr.write(node)[:80]}")
    name = name_hint
    theory: Theory | None = None
    kappa = UNBOUNDED
    max_size: int | None = None
    hereditary = False
    reps: list[FiniteStructure] | None = None
    order: set[tuple[int, int]] = set()
    for entry in items[1:]:
        if not isinstance(entry, list) or not entry or not isinstance(entry[0], str):
            raise ParseError(f"bad class entry: {sexpr.write(entry)}")
        kind = entry[0]
        if kind == "name":
            name = str(entry[1])
        elif kind == "theory":
            if len(entry) == 2 and isinstance(entry[1], str):
                theory = _load_theory(os.path.join(base_dir, entry[1]))
            else:
                theory = theory_from_node(entry)
        elif kind == "kappa":
            if len(entry) != 2:
                raise ParseError("expected (kappa unbounded|k)")
            kappa = (
                UNBOUNDED
                if entry[1] == "unbounded"
                else KappaThreshold.finite(int(entry[1]))
            )
        elif kind == "max-size":
            max_size = int(entry[1])
        elif kind == "hereditary":
            hereditary = True
        elif kind == "members":
            reps = []
            for ref in entry[1:]:
                if isinstance(ref, str):
                    reps.append(_load_structure(os.path.join(base_dir, ref)))
                else:
                    reps.append(structure_from_node(ref))
        elif kind == "order":
            for pair in entry[1:]:
                if not (isinstance(pair, list) and len(pair) == 2):
                    raise ParseError(f"expected (i j) in order table: {sexpr.write(pair)}")
                order.add((int(pair[0]), int(pair[1])))
        else:
            raise ParseError(f"unknown class entry {kind!r}")
    if theory is not None and reps is not None:
        raise ParseError("a class is either theory-defined or explicit, not both")
    if theory is not None:
        return DefinedClass(
            name if name != "class" else theory.name,
            theory,
            kappa,
            max_size if max_size is not None else 4,
            hereditary,
        )
    if reps is not None:
        return ExplicitClass(name, tuple(reps), frozenset(order))
    raise ParseError("class has neither a (theory ...) nor a (members ...) entry")


def parse_class_spec(text: str, base_dir: str = ".", name_hint: str = "class"):
    return class_spec_from_node(sexpr.parse_one(text), base_dir, name_hint)


def load_class_spec(path: str):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(path))[0]
    return parse_class_spec(text, os.path.dirname(path) or ".", stem)


def _load_theory(path: str) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return theory_from_node(sexpr.parse_one(fh.read()))


def _load_structure(path: str) -> FiniteStructure:
    with open(path, encoding="utf-8") as fh:
        return structure_from_node(sexpr.parse_one(fh.read()))


def class_spec_to_node(spec: ModelClassSpec) -> list:
    from .formats import structure_to_node, theory_to_node

    if isinstance(spec, DefinedClass):
        out: list = ["class", ["name", spec.name], theory_to_node(spec.theory)]
        out.append(
            ["kappa", "unbounded" if spec.kappa.is_unbounded else spec.kappa.bound]
        )
        out.append(["max-size", spec.size_cap])
        if spec.hereditary:
            out.append(["hereditary"])
        return out
    out = ["class", ["name", spec.name]]
    out.append(["members", *[structure_to_node(r) for r in spec.reps]])
    pairs = sorted((i, j) for i, j in spec.order if i != j)
    out.append(["order", *[[i, j] for i, j in pairs]])
    return out


def print_class_spec(spec: ModelClassSpec) -> str:
    return sexpr.write_pretty(class_spec_to_node(spec))
