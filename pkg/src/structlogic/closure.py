"""Strong submodels, the closure operator, and Galois types of finite tuples.

The closure of a subset is computed exactly as defined: intersect the
universes of every strong submodel containing the subset.  A class "has
intersections" at an instance when that intersection is itself a strong
submodel; verification sweeps report every instance where it is not.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .classspec import Caps, ModelClassSpec
from .errors import ArityError, DomainError
from .reports import (
    FAIL,
    PASS,
    VerificationReport,
    structure_witness,
    subset_witness,
)
from .structures import FiniteStructure, decorated, find_isomorphism, normalize


@dataclass(frozen=True)
class PointedModel:
    """A structure with a distinguished tuple of its elements."""

    model: FiniteStructure
    anchor: tuple[int, ...] = ()

    def __post_init__(self):
        if not set(self.anchor) <= self.model.universe:
            raise DomainError("anchor tuple leaves the universe")


@dataclass(frozen=True)
class ClosureResult:
    structure: FiniteStructure
    is_strong: bool


def strong_submodels(
    n: FiniteStructure, spec: ModelClassSpec, caps: Caps = Caps()
) -> list[FiniteStructure]:
    """Every induced substructure of n that is in the class and below n.

    n itself is always included (class order is reflexive on members).
    """
    return list(_strong_submodels_cached(n, spec, caps.subset_limit))


@lru_cache(maxsize=50_000)
def _strong_submodels_cached(n, spec, subset_limit) -> tuple[FiniteStructure, ...]:
    from .classspec import _closed_subsets

    caps = Caps(subset_limit=subset_limit)
    out = []
    for subset in _closed_subsets(n, caps):
        m = n.induced(subset)
        if spec.contains(m) and spec.le(m, n):
            out.append(m)
    return tuple(out)


def cl(
    n: FiniteStructure,
    a,
    spec: ModelClassSpec,
    caps: Caps = Caps(),
) -> ClosureResult:
    """Intersection of all strong submodels of n containing the subset a."""
    a = frozenset(a)
    if not a <= n.universe:
        raise DomainError("closure seed leaves the universe")
    return _cl_cached(n, a, spec, caps.subset_limit)


@lru_cache(maxsize=200_000)
def _cl_cached(n, a, spec, subset_limit) -> ClosureResult:
    subs = _strong_submodels_cached(n, spec, subset_limit)
    universes = [frozenset(m.universe) for m in subs]
    inter = frozenset(n.universe)
    for u in universes:
        if a <= u:
            inter &= u
    return ClosureResult(n.induced(inter), inter in universes)


def verify_intersections(spec: ModelClassSpec, caps: Caps = Caps()) -> VerificationReport:
    """Check that every closure instance is itself a strong submodel."""
    report = VerificationReport(
        command=f"verify_intersections {spec.name}", caps={"size": caps.size}
    )
    instances = 0
    bad = []
    for n in spec.members(caps.size):
        elems = sorted(n.universe)
        for k in range(len(elems) + 1):
            for combo in itertools.combinations(elems, k):
                instances += 1
                result = cl(n, combo, spec, caps)
                if not result.is_strong:
                    bad.append((n, combo, result.structure))
    report.add(
        "intersections",
        FAIL if bad else PASS,
        {"instances": instances, "members": len(spec.members(caps.size))},
        [
            w
            for n, combo, closed in bad[:3]
            for w in (
                structure_witness("member", n),
                subset_witness("seed", combo),
                structure_witness("closure", closed),
            )
        ],
    )
    return report


def check_cl_coherence(spec: ModelClassSpec, caps: Caps = Caps()) -> VerificationReport:
    """Closures agree whether computed in a strong submodel or its parent."""
    report = VerificationReport(
        command=f"check_cl_coherence {spec.name}", caps={"size": caps.size}
    )
    from .classspec import _closed_subsets

    pairs = 0
    instances = 0
    bad = []
    for n in spec.members(caps.size):
        for subset in _closed_subsets(n, caps):
            m = n.induced(subset)
            if not spec.contains(m) or not spec.le(m, n):
                continue
            pairs += 1
            elems = sorted(m.universe)
            for k in range(len(elems) + 1):
                for combo in itertools.combinations(elems, k):
                    instances += 1
                    in_m = cl(m, combo, spec, caps).structure
                    in_n = cl(n, combo, spec, caps).structure
                    if in_m != in_n:
                        bad.append((m, n, combo, in_m, in_n))
    report.add(
        "cl-coherence",
        FAIL if bad else PASS,
        {"pairs": pairs, "instances": instances},
        [
            w
            for m, n, combo, in_m, in_n in bad[:2]
            for w in (
                structure_witness("inner", m),
                structure_witness("outer", n),
                subset_witness("seed", combo),
                structure_witness("closure-in-inner", in_m),
                structure_witness("closure-in-outer", in_n),
            )
        ],
    )
    return report


def galois_equiv(
    p: PointedModel, q: PointedModel, spec: ModelClassSpec, caps: Caps = Caps()
) -> bool:
    """Anchored isomorphism of the two closures, anchor onto anchor."""
    if len(p.anchor) != len(q.anchor):
        raise ArityError("anchors of unequal length are never equivalent")
    pins: dict[int, int] = {}
    for a, b in zip(p.anchor, q.anchor):
        if pins.get(a, b) != b:
            return False
        pins[a] = b
    if len(set(pins.values())) != len(pins):
        return False
    cp = cl(p.model, set(p.anchor), spec, caps).structure
    cq = cl(q.model, set(q.anchor), spec, caps).structure
    return find_isomorphism(cp, cq, pins) is not None


def _pointed_key(model: FiniteStructure, anchor: tuple[int, ...]):
    return normalize(decorated(model, [frozenset((e,)) for e in anchor]))


def enumerate_DK(
    spec: ModelClassSpec, max_tuple_len: int = 2, caps: Caps = Caps()
) -> list[PointedModel]:
    """One representative per anchored-isomorphism type of closures of tuples.

    Each representative is shrunk to its own closure and renamed canonically;
    output is sorted by anchor length, then by canonical key.
    """
    seen: dict = {}
    for n in spec.members(caps.size):
        elems = sorted(n.universe)
        for length in range(max_tuple_len + 1):
            for anchor in itertools.product(elems, repeat=length):
                closed = cl(n, set(anchor), spec, caps).structure
                canon = _pointed_key(closed, anchor)
                seen.setdefault((length, canon.key), canon)
    out = []
    for (_length, _key), canon in sorted(seen.items(), key=lambda kv: kv[0]):
        anchor = tuple(next(iter(sub)) for sub in canon.subsets)
        out.append(PointedModel(canon.base, anchor))
    return out


def clear_caches() -> None:
    _strong_submodels_cached.cache_clear()
    _cl_cached.cache_clear()
