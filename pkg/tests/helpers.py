"""Random formulas and structures shared by the test modules."""

import random

import numpy as np
from hypothesis import strategies as st

from gmlsat import formula as fm
from gmlsat.kripke import KripkeStructure, transitive_closure


def random_formula(rng, letters=("p", "q", "r"), depth=2, max_count=2, size=4):
    """A random formula with modal depth at most ``depth``."""
    if size <= 1 or rng.random() < 0.2:
        choice = rng.random()
        if choice < 0.9:
            return fm.Letter(rng.choice(letters))
        return fm.TRUE if choice < 0.95 else fm.FALSE
    ops = ["not", "and", "or", "imp", "iff"] + (["ge", "le"] * 2 if depth > 0 else [])
    op = rng.choice(ops)
    if op == "not":
        return fm.Not(random_formula(rng, letters, depth, max_count, size - 1))
    if op in ("ge", "le"):
        body = random_formula(rng, letters, depth - 1, max_count, size - 1)
        cls = fm.AtLeast if op == "ge" else fm.AtMost
        return cls(rng.randint(0, max_count), body)
    left = random_formula(rng, letters, depth, max_count, size // 2)
    right = random_formula(rng, letters, depth, max_count, size - size // 2)
    cls = {"and": fm.And, "or": fm.Or, "imp": fm.Implies, "iff": fm.Iff}[op]
    return cls(left, right)


def random_structure(rng, n, letters=("p", "q", "r"), density=0.3, transitive=False, reflexive=False):
    R = np.array([[rng.random() < density for _ in range(n)] for _ in range(n)], dtype=bool)
    if reflexive:
        R |= np.eye(n, dtype=bool)
    if transitive:
        R = transitive_closure(R)
    worlds = [f"w{i}" for i in range(n)]
    val = {p: [w for w in worlds if rng.random() < 0.5] for p in letters}
    return KripkeStructure(worlds, R, val)


@st.composite
def formulas(draw, letters=("p", "q", "r"), depth=3, max_count=3, size=12):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_formula(random.Random(seed), letters, depth, max_count, size)


@st.composite
def structures(draw, max_worlds=6, letters=("p", "q", "r"), transitive=False, reflexive=False):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_worlds))
    density = draw(st.sampled_from([0.1, 0.3, 0.6]))
    return random_structure(random.Random(seed), n, letters, density, transitive, reflexive)
