"""Deterministic pools of structure-quantifier formulas for oracle sweeps.

The pools are seeded, so every run sees the same formulas; targets come from
the canonical enumeration at size <= 3 and get random side subsets.
"""

from __future__ import annotations

import random

from structlogic.structures import decorated, enumerate_structures
from structlogic.syntax import And, App, Atomic, Equal, Exists, Not, Or, Var, qstruct
from structlogic.vocab import Vocabulary

BIN_VOCAB = Vocabulary({"R": 2})
FUN_VOCAB = Vocabulary(functions={"f": 1})


def _binary_body(rng: random.Random, x: str):
    atoms = [
        Atomic("R", (Var(x), Var(x))),
        Atomic("R", (Var(x), Var("z"))),
        Atomic("R", (Var("z"), Var(x))),
        Equal(Var(x), Var("z")),
        Equal(Var(x), Var(x)),
        Exists("w", Atomic("R", (Var("w"), Var(x)))),
        Exists("w", Atomic("R", (Var(x), Var("w")))),
    ]
    return _combine(rng, atoms)


def _function_body(rng: random.Random, x: str):
    fx = App("f", (Var(x),))
    atoms = [
        Equal(fx, Var(x)),
        Equal(fx, Var("z")),
        Equal(App("f", (Var("z"),)), Var(x)),
        Equal(App("f", (fx,)), Var(x)),
        Equal(Var(x), Var("z")),
        Exists("w", Equal(App("f", (Var("w"),)), Var(x))),
    ]
    return _combine(rng, atoms)


def _combine(rng: random.Random, atoms):
    shape = rng.randrange(5)
    a = rng.choice(atoms)
    b = rng.choice(atoms)
    if shape == 0:
        return a
    if shape == 1:
        return Not(a)
    if shape == 2:
        return And((a, b))
    if shape == 3:
        return Or((a, b))
    return Or((Not(a), b))


def qstruct_pool(vocab: Vocabulary, count: int, seed: int):
    """`count` quantifier formulas with free parameter z, one side slot each."""
    rng = random.Random(seed)
    body = _binary_body if vocab.relations else _function_body
    targets = [s for s in enumerate_structures(vocab, 3, up_to_iso=True) if s.size >= 1]
    pool = []
    while len(pool) < count:
        base = rng.choice(targets)
        with_side = rng.randrange(2) == 0
        if with_side:
            side = frozenset(e for e in base.universe if rng.randrange(2) == 0)
            target = decorated(base, (side,))
            q = qstruct(target, "x", ("y",), body(rng, "x"), (body(rng, "y"),))
        else:
            q = qstruct(base, "x", (), body(rng, "x"), ())
        pool.append(q)
    return pool
