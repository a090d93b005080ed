"""Satisfaction, solution sets, fragment elementarity, bounded model search.

The structure-matching quantifier holds when (a) every side solution set is
contained in the main solution set and (b) the main solution set carries an
induced target-vocabulary substructure isomorphic to the target, with side
sets landing exactly on the target's designated subsets.  When the main
solution set is not closed under the target vocabulary's functions, no such
substructure exists and the quantifier is false rather than an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import AssignmentError, CapacityError, DomainError, SignatureError
from .structures import (
    FiniteStructure,
    canonical_key,
    decorated,
    enumerate_structures,
    reduct,
)
from .syntax import (
    And,
    Atomic,
    Equal,
    Exists,
    Forall,
    Formula,
    Fragment,
    KappaThreshold,
    Not,
    Or,
    QStruct,
    Term,
    Theory,
    UNBOUNDED,
    Var,
    check_kappa,
    free_vars,
)

MAX_ELEM_FREE_VARS = 6

Assignment = dict[str, int]


def _eval_term(n: FiniteStructure, t: Term, env: Assignment) -> int:
    if isinstance(t, Var):
        return env[t.name]
    return n.apply(t.fun, tuple(_eval_term(n, a, env) for a in t.args))


def _eval(n: FiniteStructure, phi: Formula, env: Assignment) -> bool:
    if isinstance(phi, Atomic):
        return tuple(_eval_term(n, t, env) for t in phi.terms) in n.rel(phi.rel)
    if isinstance(phi, Equal):
        return _eval_term(n, phi.left, env) == _eval_term(n, phi.right, env)
    if isinstance(phi, Not):
        return not _eval(n, phi.body, env)
    if isinstance(phi, And):
        return all(_eval(n, f, env) for f in phi.items)
    if isinstance(phi, Or):
        return any(_eval(n, f, env) for f in phi.items)
    if isinstance(phi, (Exists, Forall)):
        params = tuple(sorted((v, env[v]) for v in free_vars(phi)))
        return _eval_quant(n, phi, params)
    if isinstance(phi, QStruct):
        params = tuple(sorted((v, env[v]) for v in free_vars(phi)))
        return _eval_qstruct(n, phi, params)
    raise TypeError(f"not a formula: {phi!r}")


@lru_cache(maxsize=1_000_000)
def _eval_quant(n: FiniteStructure, phi: Formula, params: tuple) -> bool:
    env = dict(params)
    if isinstance(phi, Exists):
        return any(_eval(n, phi.body, {**env, phi.var: e}) for e in sorted(n.universe))
    return all(_eval(n, phi.body, {**env, phi.var: e}) for e in sorted(n.universe))


@lru_cache(maxsize=50_000)
def _reduct_cached(n: FiniteStructure, tau0) -> FiniteStructure:
    return reduct(n, tau0)


@lru_cache(maxsize=400_000)
def _induced_cached(base: FiniteStructure, subset: frozenset) -> FiniteStructure:
    return base.induced(subset)


@lru_cache(maxsize=50_000)
def _target_key(target) -> tuple:
    return canonical_key(target)


@lru_cache(maxsize=400_000)
def _eval_qstruct(n: FiniteStructure, phi: QStruct, params: tuple) -> bool:
    env = dict(params)
    tau0 = phi.target.base.vocab
    if not tau0.is_subvocabulary_of(n.vocab):
        raise SignatureError(
            "quantifier target vocabulary is not a sub-vocabulary of the structure's"
        )
    elems = sorted(n.universe)
    main = frozenset(e for e in elems if _eval(n, phi.phi, {**env, phi.var: e}))
    sides = [
        frozenset(e for e in elems if _eval(n, psi, {**env, y: e}))
        for y, psi in zip(phi.yvars, phi.psis)
    ]
    if any(not side <= main for side in sides):
        return False
    base = _reduct_cached(n, tau0)
    if not base.is_closed_subset(main):
        return False
    candidate = decorated(_induced_cached(base, main), sides)
    return canonical_key(candidate) == _target_key(phi.target)


def eval(  # noqa: A001 - interface name fixed by contract
    n: FiniteStructure,
    phi: Formula,
    a: Assignment | None = None,
    kappa: KappaThreshold = UNBOUNDED,
) -> bool:
    """Truth of phi in n under the assignment, gated by the size threshold."""
    env = dict(a or {})
    missing = free_vars(phi) - env.keys()
    if missing:
        raise AssignmentError(f"unassigned free variables: {sorted(missing)}")
    for var in free_vars(phi):
        if env[var] not in n.universe:
            raise DomainError(f"assignment sends {var!r} outside the universe")
    check_kappa(phi, kappa)
    return _eval(n, phi, env)


def solution_set(
    n: FiniteStructure,
    phi: Formula,
    x: str,
    a: Assignment | None = None,
    kappa: KappaThreshold = UNBOUNDED,
) -> frozenset[int]:
    """The set of elements e with phi true at x := e under the assignment."""
    env = dict(a or {})
    missing = free_vars(phi) - env.keys() - {x}
    if missing:
        raise AssignmentError(f"unassigned free variables: {sorted(missing)}")
    check_kappa(phi, kappa)
    out = []
    for e in sorted(n.universe):
        env2 = {**env, x: e}
        if eval(n, phi, env2, kappa):
            out.append(e)
    return frozenset(out)


def models(
    n: FiniteStructure, t: Theory, kappa: KappaThreshold = UNBOUNDED
) -> bool:
    """Whether n satisfies every sentence of the theory."""
    return all(eval(n, s, {}, kappa) for s in t.sentences)


def enumerate_models(
    t: Theory,
    vocab=None,
    max_size: int = 4,
    kappa: KappaThreshold = UNBOUNDED,
    up_to_iso: bool = True,
    hereditary: bool = False,
    max_raw: int = 5_000_000,
):
    """Models of the theory with universe size up to max_size, smallest first.

    With hereditary=True (sound only when the model class is closed under
    induced substructures, which requires a function-free vocabulary) models
    are grown by one-point extensions of smaller models, skipping the raw
    structure space entirely.
    """
    vocab = vocab or t.vocabulary
    if hereditary:
        if not up_to_iso:
            raise CapacityError("hereditary enumeration only produces one copy per type")
        if vocab.functions:
            raise SignatureError("hereditary enumeration requires a function-free vocabulary")
        yield from _hereditary_models(t, vocab, max_size, kappa, max_raw)
        return
    for s in enumerate_structures(vocab, max_size, up_to_iso=up_to_iso, max_raw=max_raw):
        if models(s, t, kappa):
            yield s


def _hereditary_models(
    t: Theory, vocab, max_size: int, kappa: KappaThreshold, max_raw: int = 5_000_000
):
    from .structures import _augmented_reps

    empty = FiniteStructure(vocab, ())
    if not models(empty, t, kappa):
        return
    level = [empty]
    yield empty
    budget = [0]
    for k in range(1, max_size + 1):
        level = [
            s
            for s in _augmented_reps(vocab, k, level, budget, max_raw)
            if models(s, t, kappa)
        ]
        yield from level


# ---------------------------------------------------------------------------
# fragment elementarity


@dataclass(frozen=True)
class ElemReport:
    """Verdict of an elementarity check; falsy reports carry a witness."""

    ok: bool
    kind: str
    formula: Formula | None = None
    assignment: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


_OK = ElemReport(True, "ok")


def _assignments(elems: list[int], variables: list[str], phi: Formula):
    if len(variables) > MAX_ELEM_FREE_VARS:
        from .formats import print_formula

        raise CapacityError(
            f"{len(variables)} free variables exceed the exhaustive-sweep cap "
            f"of {MAX_ELEM_FREE_VARS} in {print_formula(phi)}",
            count=len(variables),
            limit=MAX_ELEM_FREE_VARS,
        )
    for values in product(elems, repeat=len(variables)):
        yield dict(zip(variables, values))


def elem_F(
    n1: FiniteStructure,
    n2: FiniteStructure,
    f: Fragment,
    kappa: KappaThreshold = UNBOUNDED,
) -> ElemReport:
    """Truth agreement between a substructure and its parent on a fragment.

    Every fragment member is checked under every assignment of its free
    variables into the smaller universe.
    """
    if not n1.is_substructure_of(n2):
        return ElemReport(False, "not-substructure")
    elems = sorted(n1.universe)
    for phi in f:
        variables = sorted(free_vars(phi))
        for env in _assignments(elems, variables, phi):
            if eval(n1, phi, env, kappa) != eval(n2, phi, env, kappa):
                return ElemReport(
                    False,
                    "truth-disagreement",
                    phi,
                    tuple(sorted(env.items())),
                )
    return _OK


def elem_F_star(
    n1: FiniteStructure,
    n2: FiniteStructure,
    f: Fragment,
    kappa: KappaThreshold = UNBOUNDED,
) -> ElemReport:
    """elem_F plus frozen solution sets for small quantifier instances.

    For each structure-matching quantifier in the fragment and each parameter
    assignment into the smaller structure whose main solution set is below
    the threshold, the main and every side solution set must be literally the
    same set in both structures.
    """
    base = elem_F(n1, n2, f, kappa)
    if not base:
        return base
    elems = sorted(n1.universe)
    for chi in f.qstruct_members():
        variables = sorted(free_vars(chi))
        for env in _assignments(elems, variables, chi):
            inner1 = solution_set(n1, chi.phi, chi.var, env, kappa)
            if not kappa.counts_as_small(len(inner1)):
                continue
            if inner1 != solution_set(n2, chi.phi, chi.var, env, kappa):
                return ElemReport(
                    False,
                    "solution-set-change",
                    chi,
                    tuple(sorted(env.items())),
                    detail="main solution set",
                )
            for y, psi in zip(chi.yvars, chi.psis):
                if solution_set(n1, psi, y, env, kappa) != solution_set(
                    n2, psi, y, env, kappa
                ):
                    return ElemReport(
                        False,
                        "solution-set-change",
                        chi,
                        tuple(sorted(env.items())),
                        detail=f"side solution set for {y!r}",
                    )
    return _OK


def clear_caches() -> None:
    _eval_qstruct.cache_clear()
    _eval_quant.cache_clear()
    _reduct_cached.cache_clear()
    _induced_cached.cache_clear()
    _target_key.cache_clear()
