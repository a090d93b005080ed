"""Finite structures, decorated structures, and the combinatorics over them.

Universes are finite sets of nonnegative ints and need not be contiguous:
substructures keep the parent's element ids so closure intersections stay
meaningful.  The file format and canonical forms use contiguous universes.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import lru_cache

from .errors import ArityError, CapacityError, DomainError, PinError, SignatureError
from .vocab import Vocabulary

# Canonical labeling minimizes over all permutations; factorial growth caps it.
CANONICAL_SIZE_CAP = 8


class FiniteStructure:
    __slots__ = ("vocab", "universe", "_relations", "_functions", "_key", "_hash")

    def __init__(
        self,
        vocab: Vocabulary,
        universe: Iterable[int],
        relations: Mapping[str, Iterable[tuple[int, ...]]] | None = None,
        functions: Mapping[str, Mapping[tuple[int, ...], int]] | None = None,
    ):
        universe = frozenset(universe)
        for e in universe:
            if not isinstance(e, int) or e < 0:
                raise DomainError(f"universe elements must be nonnegative ints, got {e!r}")
        rels: dict[str, frozenset[tuple[int, ...]]] = {}
        relations = dict(relations or {})
        for name in relations:
            vocab.rel_arity(name)
        for name in vocab.relation_names():
            arity = vocab.rel_arity(name)
            tuples = frozenset(tuple(t) for t in relations.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise ArityError(f"relation {name!r} expects {arity}-tuples, got {t}")
                if not all(c in universe for c in t):
                    raise DomainError(f"relation {name!r} tuple {t} leaves the universe")
            rels[name] = tuples
        funs: dict[str, dict[tuple[int, ...], int]] = {}
        functions = dict(functions or {})
        for name in functions:
            vocab.fun_arity(name)
        for name in vocab.function_names():
            arity = vocab.fun_arity(name)
            if arity == 0 and not universe:
                raise DomainError(f"constant {name!r} cannot be interpreted on an empty universe")
            table = {tuple(k): v for k, v in (functions.get(name) or {}).items()}
            expected = list(itertools.product(sorted(universe), repeat=arity))
            if set(table) != set(expected):
                raise DomainError(f"function {name!r} table must be total on the universe")
            for args, val in table.items():
                if val not in universe:
                    raise DomainError(f"function {name!r} value {val} leaves the universe")
            funs[name] = table
        self.vocab = vocab
        self.universe = universe
        self._relations = rels
        self._functions = funs
        self._key = (
            vocab.key,
            tuple(sorted(universe)),
            tuple((n, tuple(sorted(rels[n]))) for n in sorted(rels)),
            tuple((n, tuple(sorted(funs[n].items()))) for n in sorted(funs)),
        )
        self._hash = hash(self._key)

    @property
    def size(self) -> int:
        return len(self.universe)

    @property
    def key(self):
        return self._key

    def rel(self, name: str) -> frozenset[tuple[int, ...]]:
        try:
            return self._relations[name]
        except KeyError:
            raise SignatureError(f"unknown relation symbol {name!r}") from None

    def fun(self, name: str) -> dict[tuple[int, ...], int]:
        try:
            return self._functions[name]
        except KeyError:
            raise SignatureError(f"unknown function symbol {name!r}") from None

    def apply(self, name: str, args: tuple[int, ...]) -> int:
        table = self.fun(name)
        try:
            return table[args]
        except KeyError:
            raise DomainError(f"function {name!r} has no entry for {args}") from None

    def constant(self, name: str) -> int:
        return self.apply(name, ())

    def is_closed_subset(self, subset: frozenset[int]) -> bool:
        """True when subset contains every constant and is closed under functions."""
        for name in self.vocab.function_names():
            arity = self.vocab.fun_arity(name)
            if arity == 0:
                if self.constant(name) not in subset:
                    return False
                continue
            for args in itertools.product(sorted(subset), repeat=arity):
                if self._functions[name][args] not in subset:
                    return False
        return True

    def induced(self, subset: Iterable[int]) -> "FiniteStructure":
        """Substructure on subset; requires closure under functions and constants."""
        subset = frozenset(subset)
        if not subset <= self.universe:
            raise DomainError("subset leaves the universe")
        if not self.is_closed_subset(subset):
            raise DomainError("subset is not closed under the structure's functions")
        rels = {
            n: {t for t in ts if all(c in subset for c in t)}
            for n, ts in self._relations.items()
        }
        funs = {
            n: {args: v for args, v in table.items() if all(c in subset for c in args)}
            for n, table in self._functions.items()
        }
        return FiniteStructure(self.vocab, subset, rels, funs)

    def is_substructure_of(self, other: "FiniteStructure") -> bool:
        if self.vocab != other.vocab or not self.universe <= other.universe:
            return False
        for name, ts in self._relations.items():
            induced = {t for t in other._relations[name] if all(c in self.universe for c in t)}
            if ts != induced:
                return False
        for name, table in self._functions.items():
            for args, val in table.items():
                if other._functions[name][args] != val:
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, FiniteStructure) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FiniteStructure(size={self.size}, vocab={self.vocab!r})"


@dataclass(frozen=True)
class DecoratedStructure:
    """A structure with a finite list of distinguished subsets of its universe."""

    base: FiniteStructure
    subsets: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(frozenset(s) for s in self.subsets))
        for s in self.subsets:
            if not s <= self.base.universe:
                raise DomainError("decoration subset leaves the universe")

    @property
    def size(self) -> int:
        return self.base.size

    @property
    def key(self):
        return (self.base.key, tuple(tuple(sorted(s)) for s in self.subsets))


def decorated(base: FiniteStructure, subsets: Iterable[Iterable[int]] = ()) -> DecoratedStructure:
    return DecoratedStructure(base, tuple(frozenset(s) for s in subsets))


def reduct(s: FiniteStructure, tau0: Vocabulary) -> FiniteStructure:
    """Forget the symbols outside tau0; tau0 must be a sub-vocabulary."""
    if not tau0.is_subvocabulary_of(s.vocab):
        raise SignatureError("reduct target is not a sub-vocabulary")
    rels = {n: s.rel(n) for n in tau0.relation_names()}
    funs = {n: s.fun(n) for n in tau0.function_names()}
    return FiniteStructure(tau0, s.universe, rels, funs)


def relabel(s: FiniteStructure, mapping: dict[int, int]) -> FiniteStructure:
    """Copy of s with elements renamed by the given bijection."""
    if sorted(mapping) != sorted(s.universe) or len(set(mapping.values())) != s.size:
        raise DomainError("relabeling must be a bijection on the universe")
    rels = {
        name: {tuple(mapping[e] for e in row) for row in s.rel(name)}
        for name in s.vocab.relation_names()
    }
    funs = {
        name: {
            tuple(mapping[e] for e in args): mapping[val]
            for args, val in s.fun(name).items()
        }
        for name in s.vocab.function_names()
    }
    return FiniteStructure(s.vocab, mapping.values(), rels, funs)


def generated_substructure(s: FiniteStructure, seed: Iterable[int]) -> FiniteStructure:
    """Smallest substructure whose universe contains seed."""
    seed = frozenset(seed)
    if not seed <= s.universe:
        raise DomainError("seed leaves the universe")
    closed = set(seed)
    for name in s.vocab.function_names():
        if s.vocab.fun_arity(name) == 0:
            closed.add(s.constant(name))
    changed = True
    while changed:
        changed = False
        for name in s.vocab.function_names():
            arity = s.vocab.fun_arity(name)
            if arity == 0:
                continue
            for args in itertools.product(sorted(closed), repeat=arity):
                val = s._functions[name][args]
                if val not in closed:
                    closed.add(val)
                    changed = True
    return s.induced(closed)


# ---------------------------------------------------------------------------
# isomorphism search


def _as_decorated(x) -> DecoratedStructure:
    return x if isinstance(x, DecoratedStructure) else DecoratedStructure(x, ())


def _element_invariants(d: DecoratedStructure) -> dict[int, tuple]:
    base = d.base
    inv: dict[int, list] = {e: [] for e in base.universe}
    for name in base.vocab.relation_names():
        arity = base.vocab.rel_arity(name)
        for e in base.universe:
            counts = [0] * arity
            diag = 0
            for t in base.rel(name):
                for j, c in enumerate(t):
                    if c == e:
                        counts[j] += 1
                if all(c == e for c in t):
                    diag += 1
            inv[e].append((tuple(counts), diag))
    for name in base.vocab.function_names():
        table = base.fun(name)
        for e in base.universe:
            out_count = sum(1 for v in table.values() if v == e)
            in_count = sum(1 for args in table if e in args)
            fixed = sum(1 for args, v in table.items() if v == e and all(c == e for c in args))
            inv[e].append((out_count, in_count, fixed))
    for subset in d.subsets:
        for e in base.universe:
            inv[e].append(e in subset)
    return {e: tuple(v) for e, v in inv.items()}


def isomorphisms(src, dst, pins: Mapping[int, int] | None = None):
    """Yield every isomorphism src -> dst extending pins, as {src id: dst id} dicts.

    Isomorphisms preserve all relations and functions in both directions and
    map the i-th distinguished subset of src onto the i-th of dst exactly.
    The search backtracks over invariant-compatible candidates; completeness
    is the contract, the pruning is only a speedup.
    """
    src = _as_decorated(src)
    dst = _as_decorated(dst)
    if src.base.vocab != dst.base.vocab:
        raise SignatureError("isomorphism search needs a shared vocabulary")
    if len(src.subsets) != len(dst.subsets):
        raise ArityError("isomorphism search needs equal subset-list lengths")
    pins = dict(pins or {})
    for a, b in pins.items():
        if a not in src.base.universe or b not in dst.base.universe:
            raise PinError(f"pin {a}->{b} leaves the universes")
    if len(set(pins.values())) != len(pins):
        raise PinError("pins must be injective")

    if src.base.size != dst.base.size:
        return
    for name in src.base.vocab.relation_names():
        if len(src.base.rel(name)) != len(dst.base.rel(name)):
            return
    for s_sub, d_sub in zip(src.subsets, dst.subsets):
        if len(s_sub) != len(d_sub):
            return

    inv_src = _element_invariants(src)
    inv_dst = _element_invariants(dst)
    if sorted(inv_src.values()) != sorted(inv_dst.values()):
        return

    candidates: dict[int, list[int]] = {}
    for e in src.base.universe:
        if e in pins:
            opts = [pins[e]] if inv_dst.get(pins[e]) == inv_src[e] else []
        else:
            opts = sorted(b for b in dst.base.universe if inv_dst[b] == inv_src[e])
        if not opts:
            return
        candidates[e] = opts

    base_s, base_d = src.base, dst.base
    rel_names = base_s.vocab.relation_names()
    tuples_by_elem_s = {
        n: {e: [t for t in base_s.rel(n) if e in t] for e in base_s.universe} for n in rel_names
    }
    tuples_by_elem_d = {
        n: {e: [t for t in base_d.rel(n) if e in t] for e in base_d.universe} for n in rel_names
    }
    fun_names = base_s.vocab.function_names()
    fun_entries_s = {
        n: {
            e: [(args, v) for args, v in base_s.fun(n).items() if e in args or v == e]
            for e in base_s.universe
        }
        for n in fun_names
    }
    fun_entries_d = {
        n: {
            e: [(args, v) for args, v in base_d.fun(n).items() if e in args or v == e]
            for e in base_d.universe
        }
        for n in fun_names
    }

    order = sorted(base_s.universe, key=lambda e: (len(candidates[e]), e))
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}

    def consistent(e: int, d: int) -> bool:
        for n in rel_names:
            rel_d = base_d.rel(n)
            for t in tuples_by_elem_s[n][e]:
                if all(c in fwd or c == e for c in t):
                    mapped = tuple(d if c == e else fwd[c] for c in t)
                    if mapped not in rel_d:
                        return False
            rel_s = base_s.rel(n)
            for t in tuples_by_elem_d[n][d]:
                if all(c in bwd or c == d for c in t):
                    pre = tuple(e if c == d else bwd[c] for c in t)
                    if pre not in rel_s:
                        return False
        for n in fun_names:
            table_d = base_d.fun(n)
            for args, v in fun_entries_s[n][e]:
                if all(c in fwd or c == e for c in args) and (v in fwd or v == e):
                    mapped_args = tuple(d if c == e else fwd[c] for c in args)
                    mapped_v = d if v == e else fwd[v]
                    if table_d[mapped_args] != mapped_v:
                        return False
        return True

    def extend(i: int):
        if i == len(order):
            yield dict(fwd)
            return
        e = order[i]
        for d in candidates[e]:
            if d in bwd:
                continue
            if not consistent(e, d):
                continue
            fwd[e] = d
            bwd[d] = e
            yield from extend(i + 1)
            del fwd[e]
            del bwd[d]

    yield from extend(0)


def find_isomorphism(src, dst, pins: Mapping[int, int] | None = None) -> dict[int, int] | None:
    """First isomorphism src -> dst extending pins, or None."""
    return next(isomorphisms(src, dst, pins), None)


# ---------------------------------------------------------------------------
# canonical forms


def _index_tuples(base: FiniteStructure, elems: list[int]):
    pos = {e: i for i, e in enumerate(elems)}
    rels = {
        n: [tuple(pos[c] for c in t) for t in base.rel(n)]
        for n in base.vocab.relation_names()
    }
    funs = {
        n: [(tuple(pos[c] for c in args), pos[v]) for args, v in base.fun(n).items()]
        for n in base.vocab.function_names()
    }
    return rels, funs


@lru_cache(maxsize=200_000)
def _normalize_cached(d: DecoratedStructure) -> DecoratedStructure:
    base = d.base
    m = base.size
    if m > CANONICAL_SIZE_CAP:
        raise CapacityError(
            f"canonical labeling caps at size {CANONICAL_SIZE_CAP}, got {m}",
            count=m,
            limit=CANONICAL_SIZE_CAP,
        )
    elems = sorted(base.universe)
    pos = {e: i for i, e in enumerate(elems)}
    idx_rels, idx_funs = _index_tuples(base, elems)
    idx_subsets = [sorted(pos[e] for e in s) for s in d.subsets]
    rel_names = base.vocab.relation_names()
    fun_names = base.vocab.function_names()

    best = None
    for perm in itertools.permutations(range(m)):
        enc_rels = tuple(
            tuple(sorted(tuple(perm[i] for i in t) for t in idx_rels[n])) for n in rel_names
        )
        enc_funs = tuple(
            tuple(sorted((tuple(perm[i] for i in args), perm[v]) for args, v in idx_funs[n]))
            for n in fun_names
        )
        enc_subs = tuple(tuple(sorted(perm[i] for i in s)) for s in idx_subsets)
        enc = (enc_rels, enc_funs, enc_subs)
        if best is None or enc < best:
            best = enc
    enc_rels, enc_funs, enc_subs = best
    relations = {n: set(enc_rels[j]) for j, n in enumerate(rel_names)}
    functions = {n: dict(enc_funs[j]) for j, n in enumerate(fun_names)}
    canon_base = FiniteStructure(base.vocab, range(m), relations, functions)
    return DecoratedStructure(canon_base, tuple(frozenset(s) for s in enc_subs))


def normalize(x):
    """Canonical isomorphic copy on {0..m-1}; equal outputs iff isomorphic inputs.

    Works for FiniteStructure and DecoratedStructure (subsets relabeled along).
    Sizes beyond CANONICAL_SIZE_CAP raise CapacityError.
    """
    if isinstance(x, DecoratedStructure):
        return _normalize_cached(x)
    return _normalize_cached(DecoratedStructure(x, ())).base


def canonical_key(x):
    return normalize(_as_decorated(x)).key


# ---------------------------------------------------------------------------
# enumeration


def _relation_interps(name: str, arity: int, elems: list[int]):
    cells = sorted(itertools.product(elems, repeat=arity))
    for mask in range(1 << len(cells)):
        yield name, frozenset(c for i, c in enumerate(cells) if mask >> i & 1)


def _function_interps(name: str, arity: int, elems: list[int]):
    cells = sorted(itertools.product(elems, repeat=arity))
    for values in itertools.product(elems, repeat=len(cells)):
        yield name, dict(zip(cells, values))


def _raw_count(vocab: Vocabulary, k: int) -> int:
    total = 1
    for name in vocab.relation_names():
        total *= 1 << (k ** vocab.rel_arity(name))
    for name in vocab.function_names():
        total *= k ** (k ** vocab.fun_arity(name)) if k else 1
    return total


def _raw_structures(vocab: Vocabulary, k: int, budget: list[int], limit: int):
    if k == 0:
        if not vocab.has_constants():
            budget[0] += 1
            yield FiniteStructure(vocab, ())
        return
    elems = list(range(k))
    rel_spaces = [
        _relation_interps(n, vocab.rel_arity(n), elems) for n in vocab.relation_names()
    ]
    fun_spaces = [
        _function_interps(n, vocab.fun_arity(n), elems) for n in vocab.function_names()
    ]
    for combo in itertools.product(*rel_spaces, *fun_spaces):
        budget[0] += 1
        if budget[0] > limit:
            raise CapacityError(
                f"structure enumeration exceeded the raw cap of {limit}",
                count=budget[0],
                limit=limit,
            )
        rels = {n: ts for n, ts in combo[: len(rel_spaces)]}
        funs = {n: table for n, table in combo[len(rel_spaces):]}
        yield FiniteStructure(vocab, elems, rels, funs)


def _augmented_reps(vocab: Vocabulary, k: int, prev: list[FiniteStructure], budget, limit):
    """Size-k canonical representatives from size-(k-1) ones, relational vocabularies only."""
    new = k - 1
    elems = list(range(k))
    rel_news = []
    for n in vocab.relation_names():
        arity = vocab.rel_arity(n)
        cells = sorted(t for t in itertools.product(elems, repeat=arity) if new in t)
        rel_news.append((n, cells))
    seen = {}
    for rep in prev:
        spaces = []
        for n, cells in rel_news:
            spaces.append([
                frozenset(c for i, c in enumerate(cells) if mask >> i & 1)
                for mask in range(1 << len(cells))
            ])
        for combo in itertools.product(*spaces):
            budget[0] += 1
            if budget[0] > limit:
                raise CapacityError(
                    f"structure enumeration exceeded the raw cap of {limit}",
                    count=budget[0],
                    limit=limit,
                )
            rels = {
                n: rep.rel(n) | combo[j] for j, (n, _) in enumerate(rel_news)
            }
            cand = FiniteStructure(vocab, elems, rels)
            canon = normalize(cand)
            seen.setdefault(canon.key, canon)
    return [seen[key] for key in sorted(seen)]


def enumerate_structures(
    vocab: Vocabulary,
    max_size: int,
    up_to_iso: bool = False,
    max_raw: int = 5_000_000,
):
    """All structures with universe {0..k-1}, k <= max_size, smallest first.

    With up_to_iso, exactly one canonical representative per isomorphism type,
    sorted by canonical key within each size.  Purely relational vocabularies
    go one element at a time (every structure extends one of its one-point
    deletions); vocabularies with functions fall back to filtering the raw
    stream, where one-point deletions need not be substructures.
    """
    budget = [0]
    if not up_to_iso:
        for k in range(max_size + 1):
            yield from _raw_structures(vocab, k, budget, max_raw)
        return
    if not vocab.functions:
        prev: list[FiniteStructure] = []
        for k in range(max_size + 1):
            if k == 0:
                prev = [FiniteStructure(vocab, ())]
            else:
                prev = _augmented_reps(vocab, k, prev, budget, max_raw)
            yield from prev
        return
    for k in range(max_size + 1):
        seen = {}
        for s in _raw_structures(vocab, k, budget, max_raw):
            canon = normalize(s)
            seen.setdefault(canon.key, canon)
        for key in sorted(seen):
            yield seen[key]


def enumerate_expansions(m: FiniteStructure, tau: Vocabulary, max_raw: int = 5_000_000):
    """All tau-structures whose reduct to m's vocabulary is m, one per tau-isomorphism type.

    Representatives keep m's universe and come in a deterministic order.
    """
    if not m.vocab.is_subvocabulary_of(tau):
        raise SignatureError("expansion vocabulary must extend the structure's vocabulary")
    new_rels = [n for n in tau.relation_names() if n not in m.vocab.relations]
    new_funs = [n for n in tau.function_names() if n not in m.vocab.functions]
    if not m.universe and any(tau.fun_arity(n) == 0 for n in new_funs):
        raise DomainError("cannot expand an empty structure with constants")
    elems = sorted(m.universe)
    spaces = [list(_relation_interps(n, tau.rel_arity(n), elems)) for n in new_rels]
    spaces += [list(_function_interps(n, tau.fun_arity(n), elems)) for n in new_funs]
    total = 1
    for sp in spaces:
        total *= len(sp)
    if total > max_raw:
        raise CapacityError(
            f"expansion enumeration exceeded the raw cap of {max_raw}",
            count=total,
            limit=max_raw,
        )
    out = []
    seen = set()
    for combo in itertools.product(*spaces):
        rels = {n: m.rel(n) for n in m.vocab.relation_names()}
        funs = {n: m.fun(n) for n in m.vocab.function_names()}
        for n, interp in combo:
            if n in new_rels:
                rels[n] = interp
            else:
                funs[n] = interp
        cand = FiniteStructure(tau, m.universe, rels, funs)
        key = normalize(cand).key
        if key not in seen:
            seen.add(key)
            out.append(cand)
    return out
