"""Exponential tiling problems as graded modal formulas over transitive frames.

``reduction(inst)`` writes a formula, with all subscripts at most 1, that is
satisfiable over transitive (or reflexive transitive) frames exactly when
the 2^n x 2^n grid can be tiled.  ``canonical_model(n)`` is the intended
model of the grid-building part, ``expand_with_tiling`` colours it from a
tiling, and ``analyze_grid`` / ``decode_tiling`` read a tiling back from any
model.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from . import formula as fm
from .formula import And, Implies, Letter, Not, conj, disj
from .kripke import KripkeStructure, PointedStructure, direct_successors, evaluate, is_transitive, transitive_closure

# -- tiling systems -----------------------------------------------------------


@dataclass(frozen=True)
class TilingSystem:
    colours: tuple
    horizontal: frozenset
    vertical: frozenset

    def __post_init__(self):
        colours = tuple(self.colours)
        if not colours:
            raise ValueError("a tiling system needs at least one colour")
        if len(set(colours)) != len(colours):
            raise ValueError("duplicate colours")
        for c in colours:
            colour_letter(c)
        object.__setattr__(self, "colours", colours)
        for name in ("horizontal", "vertical"):
            pairs = frozenset(tuple(p) for p in getattr(self, name))
            for a, b in pairs:
                if a not in colours or b not in colours:
                    raise ValueError(f"{name} constraint ({a}, {b}) uses an unknown colour")
            object.__setattr__(self, name, pairs)


@dataclass(frozen=True)
class TilingInstance:
    system: TilingSystem
    n: int
    initial: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        initial = tuple(self.initial)
        if len(initial) > 2 ** self.n:
            raise ValueError("initial configuration is longer than the grid")
        for c in initial:
            if c not in self.system.colours:
                raise ValueError(f"initial colour {c!r} is not in the system")
        object.__setattr__(self, "initial", initial)


@dataclass(frozen=True)
class TilingGrid:
    """``cells[i][j]`` is the colour f(i, j); i runs horizontally."""

    cells: tuple

    def __post_init__(self):
        cells = tuple(tuple(col) for col in self.cells)
        if not cells or any(len(col) != len(cells) for col in cells):
            raise ValueError("a grid must be square and nonempty")
        object.__setattr__(self, "cells", cells)

    @property
    def N(self) -> int:
        return len(self.cells)

    def __getitem__(self, ij):
        i, j = ij
        return self.cells[i][j]

    @classmethod
    def from_function(cls, N, f):
        return cls(tuple(tuple(f(i, j) for j in range(N)) for i in range(N)))


def load_instance(source) -> TilingInstance:
    """Read the tiling JSON format from a path, a JSON string or a dict."""
    if isinstance(source, dict):
        data = source
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        data = json.loads(source)
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    try:
        system = TilingSystem(tuple(data["colors"]), data.get("H", ()), data.get("V", ()))
        return TilingInstance(system, int(data["n"]), tuple(data.get("initial", ())))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tiling JSON: {exc}") from None


def instance_to_json(inst: TilingInstance) -> dict:
    s = inst.system
    return {
        "colors": list(s.colours),
        "H": sorted(map(list, s.horizontal)),
        "V": sorted(map(list, s.vertical)),
        "n": inst.n,
        "initial": list(inst.initial),
    }


def check_tiling(sys: TilingSystem, grid: TilingGrid, initial=()) -> bool:
    N = grid.N
    for col in grid.cells:
        for c in col:
            if c not in sys.colours:
                raise ValueError(f"colour {c!r} is not in the system")
    for i in range(N):
        for j in range(N):
            if i + 1 < N and (grid[i, j], grid[i + 1, j]) not in sys.horizontal:
                return False
            if j + 1 < N and (grid[i, j], grid[i, j + 1]) not in sys.vertical:
                return False
    if len(initial) > N:
        return False
    return all(grid[k, 0] == c for k, c in enumerate(initial))


def all_grids(sys: TilingSystem, N: int):
    for colours in itertools.product(sys.colours, repeat=N * N):
        yield TilingGrid(tuple(tuple(colours[i * N:(i + 1) * N]) for i in range(N)))


def find_tiling(inst: TilingInstance):
    """Brute force over all colourings; only sensible for tiny grids."""
    for grid in all_grids(inst.system, 2 ** inst.n):
        if check_tiling(inst.system, grid, inst.initial):
            return grid
    return None


# -- letters -------------------------------------------------------------------

def u(i):
    return Letter(f"u{i}")


def v(j):
    return Letter(f"v{j}")


def p(k):
    return Letter(f"p{k}")


def q(k):
    return Letter(f"q{k}")


Z = Letter("z")
OH = Letter("oh")
OV = Letter("ov")


def colour_letter(c: str) -> Letter:
    try:
        return Letter(f"c_{c}")
    except ValueError:
        raise ValueError(f"colour name {c!r} cannot be used as a letter") from None


def _signed(f, positive):
    return f if positive else Not(f)


def star(letters, i):
    """Bit pattern a_1..a_{i-1} 0 1..1 over the given letters."""
    n = len(letters)
    return conj([Not(letters[i - 1])] + [letters[k - 1] for k in range(i + 1, n + 1)])


def plus(letters, i):
    """Bit pattern a_1..a_{i-1} 1 0..0, the successor of ``star``."""
    n = len(letters)
    return conj([letters[i - 1]] + [Not(letters[k - 1]) for k in range(i + 1, n + 1)])


def _ps(n):
    return [p(k) for k in range(1, n + 1)]


def _qs(n):
    return [q(k) for k in range(1, n + 1)]


# -- the schemas ---------------------------------------------------------------

box, dia, boxdot = fm.box, fm.dia, fm.boxdot
SIGNS = (True, False)


def gamma1(n: int) -> dict:
    out = {}
    out["start"] = [conj([u(0), v(0), Z])]
    out["character"] = [
        boxdot(And(Not(And(u(i), u(j))), Not(And(v(i), v(j)))))
        for i in range(n + 1) for j in range(i + 1, n + 1)
    ]
    out["grow-x"] = [
        boxdot(Implies(conj([u(i), v(j), Z]), dia(conj([u(i + 1), v(j), Z, _signed(p(i + 1), s)]))))
        for i in range(n) for j in range(n + 1) for s in SIGNS
    ]
    out["grow-y"] = [
        boxdot(Implies(conj([u(i), v(j), Z]), dia(conj([u(i), v(j + 1), Z, _signed(q(j + 1), s)]))))
        for i in range(n + 1) for j in range(n) for s in SIGNS
    ]
    out["keep-x"] = [
        box(Implies(And(u(i), _signed(p(k), s)), box(Implies(Z, _signed(p(k), s)))))
        for i in range(1, n + 1) for k in range(1, i + 1) for s in SIGNS
    ]
    out["keep-y"] = [
        box(Implies(And(v(j), _signed(q(k), s)), box(Implies(Z, _signed(q(k), s)))))
        for j in range(1, n + 1) for k in range(1, j + 1) for s in SIGNS
    ]
    return out


def gamma2(n: int) -> dict:
    at_most_one = lambda f: fm.AtMost(1, f)
    out = {}
    out["merge-x"] = [
        boxdot(Implies(And(u(i), v(j)), at_most_one(conj([u(i + 1), v(j), _signed(p(i + 1), s)]))))
        for i in range(n) for j in range(n + 1) for s in SIGNS
    ]
    out["merge-y"] = [
        boxdot(Implies(And(u(i), v(j)), at_most_one(conj([u(i), v(j + 1), _signed(q(j + 1), s)]))))
        for i in range(n + 1) for j in range(n) for s in SIGNS
    ]
    out["merge-xy"] = [
        boxdot(
            Implies(
                And(u(i), v(j)),
                at_most_one(conj([u(i + 1), v(j + 1), _signed(p(i + 1), s1), _signed(q(j + 1), s2)])),
            )
        )
        for i in range(n) for j in range(n) for s1 in SIGNS for s2 in SIGNS
    ]
    return out


def _gamma3(n, bits, o, horizontal):
    grid = And(u(n), v(n))
    out = {}
    out["left"] = [box(Implies(And(grid, star(bits, i)), dia(And(o, plus(bits, i))))) for i in range(1, n + 1)]
    out["right"] = [box(Implies(And(grid, plus(bits, i)), dia(And(o, plus(bits, i))))) for i in range(1, n + 1)]
    lower = (lambda i: And(u(i - 1), v(n))) if horizontal else (lambda i: And(u(n), v(i - 1)))
    out["share"] = [box(Implies(lower(i), fm.AtMost(1, And(o, plus(bits, i))))) for i in range(1, n + 1)]
    return out


def gamma3h(n: int) -> dict:
    return _gamma3(n, _ps(n), OH, True)


def gamma3v(n: int) -> dict:
    return _gamma3(n, _qs(n), OV, False)


def delta(sys: TilingSystem, n: int) -> dict:
    grid = And(u(n), v(n))
    cs = [colour_letter(c) for c in sys.colours]
    exclusive = [
        fm.Or(Not(colour_letter(c)), Not(colour_letter(d)))
        for a, c in enumerate(sys.colours) for d in sys.colours[a + 1:]
    ]
    out = {"colour": [box(Implies(grid, And(disj(cs), conj(exclusive))))]}
    for name, bit, o, allowed in (("h", p(n), OH, sys.horizontal), ("v", q(n), OV, sys.vertical)):
        same = []
        forbid = []
        for s in SIGNS:
            b = _signed(bit, s)
            other = _signed(bit, not s)
            for c in sys.colours:
                head = conj([u(n), v(n), b, colour_letter(c)])
                same.append(box(Implies(head, box(Implies(And(o, b), colour_letter(c))))))
            for c in sys.colours:
                for d in sys.colours:
                    if (c, d) not in allowed:
                        head = conj([u(n), v(n), b, colour_letter(c)])
                        forbid.append(box(Implies(head, box(Implies(And(o, other), Not(colour_letter(d)))))))
        out[f"copy-{name}"] = same
        out[f"forbid-{name}"] = forbid
    return out


def theta(inst: TilingInstance) -> dict:
    n = inst.n
    out = []
    for k, colour in enumerate(inst.initial):
        bits = format(k, f"0{n}b")
        xs = [p(i + 1) if b == "1" else Not(p(i + 1)) for i, b in enumerate(bits)]
        ys = [Not(q(i + 1)) for i in range(n)]
        # restricted to grid worlds: other z-worlds share the bit pattern
        out.append(box(Implies(conj([u(n), v(n), Z] + xs + ys), colour_letter(colour))))
    return {"initial": out}


def reduction_parts(inst: TilingInstance) -> dict:
    """Schema name -> {sub-schema -> formulas}, in output order."""
    n = inst.n
    return {
        "gamma1": gamma1(n),
        "gamma2": gamma2(n),
        "gamma3h": gamma3h(n),
        "gamma3v": gamma3v(n),
        "delta": delta(inst.system, n),
        "theta": theta(inst),
    }


def _flatten(parts):
    return [f for group in parts.values() for fs in group.values() for f in fs]


def gamma(n: int) -> fm.Formula:
    parts = {"gamma1": gamma1(n), "gamma2": gamma2(n), "gamma3h": gamma3h(n), "gamma3v": gamma3v(n)}
    return conj(_flatten(parts))


def reduction(inst: TilingInstance) -> fm.Formula:
    return conj(_flatten(reduction_parts(inst)))


# -- the canonical model ------------------------------------------------------------

MAX_CANONICAL_N = 4


def _bitstrings(k):
    return ["".join(b) for b in itertools.product("01", repeat=k)]


def z_name(i, j, s, t):
    return f"z({i},{j},{s},{t})"


def o_name(kind, s, t):
    return f"{kind}({s},{t})"


def canonical_model(n: int) -> PointedStructure:
    """The intended reflexive transitive model of the grid formulas."""
    if not 1 <= n <= MAX_CANONICAL_N:
        raise ValueError(f"canonical model supported for 1 <= n <= {MAX_CANONICAL_N}")
    zs = [(i, j, s, t) for i in range(n + 1) for j in range(n + 1) for s in _bitstrings(i) for t in _bitstrings(j)]
    full = _bitstrings(n)
    ohs = [(s, t) for s in full for t in full if "1" in s]
    ovs = [(s, t) for s in full for t in full if "1" in t]
    worlds = [z_name(*w) for w in zs] + [o_name("h", *w) for w in ohs] + [o_name("v", *w) for w in ovs]
    index = {w: k for k, w in enumerate(worlds)}
    R = np.zeros((len(worlds), len(worlds)), dtype=bool)
    for a in zs:
        for b in zs:
            if a[0] <= b[0] and a[1] <= b[1] and b[2].startswith(a[2]) and b[3].startswith(a[3]):
                R[index[z_name(*a)], index[z_name(*b)]] = True
    top = 2 ** n - 1
    for s in full:
        for t in full:
            g = index[z_name(n, n, s, t)]
            x, y = int(s, 2), int(t, 2)
            for x2 in (x, x + 1):
                if 1 <= x2 <= top:
                    R[g, index[o_name("h", format(x2, f"0{n}b"), t)]] = True
            for y2 in (y, y + 1):
                if 1 <= y2 <= top:
                    R[g, index[o_name("v", s, format(y2, f"0{n}b"))]] = True
    R = transitive_closure(R, reflexive=True)
    val = {"z": [z_name(*w) for w in zs], "oh": [o_name("h", *w) for w in ohs], "ov": [o_name("v", *w) for w in ovs]}
    for k in range(n + 1):
        val[f"u{k}"] = [z_name(*w) for w in zs if w[0] == k]
        val[f"v{k}"] = [z_name(*w) for w in zs if w[1] == k]
    for k in range(1, n + 1):
        val[f"p{k}"] = (
            [z_name(*w) for w in zs if w[0] >= k and w[2][k - 1] == "1"]
            + [o_name("h", *w) for w in ohs if w[0][k - 1] == "1"]
            + [o_name("v", *w) for w in ovs if w[0][k - 1] == "1"]
        )
        val[f"q{k}"] = (
            [z_name(*w) for w in zs if w[1] >= k and w[3][k - 1] == "1"]
            + [o_name("h", *w) for w in ohs if w[1][k - 1] == "1"]
            + [o_name("v", *w) for w in ovs if w[1][k - 1] == "1"]
        )
    return PointedStructure(KripkeStructure(worlds, R, val), z_name(0, 0, "", ""))


def expand_with_tiling(S: PointedStructure, grid: TilingGrid, sys: TilingSystem) -> PointedStructure:
    """Colour the grid worlds of a canonical model and their o-worlds."""
    A = S.structure
    n = grid.N.bit_length() - 1
    if grid.N != 2 ** n or z_name(n, n, "0" * n, "0" * n) not in A._index or z_name(n + 1, 0, "0" * (n + 1), "") in A._index:
        raise ValueError("grid side does not match the canonical model")
    val = dict(A.valuation)
    for c in sys.colours:
        val[colour_letter(c).name] = []
    full = _bitstrings(n)
    for s in full:
        for t in full:
            c = grid[int(s, 2), int(t, 2)]
            if c not in sys.colours:
                raise ValueError(f"colour {c!r} is not in the system")
            members = [z_name(n, n, s, t)]
            if "1" in s:
                members.append(o_name("h", s, t))
            if "1" in t:
                members.append(o_name("v", s, t))
            val[colour_letter(c).name] = list(val[colour_letter(c).name]) + members
    return PointedStructure(A.with_valuation(val), S.world)


# -- reading a grid off a model ------------------------------------------------------


class GridError(ValueError):
    """The structure does not behave like a model of the grid formulas."""


@dataclass
class GridAnalysis:
    n: int
    z_worlds: dict = field(default_factory=dict)
    g_worlds: dict = field(default_factory=dict)
    horizontal: dict = field(default_factory=dict)
    vertical: dict = field(default_factory=dict)


def analyze_grid(P: PointedStructure, n: int) -> GridAnalysis:
    A, w0 = P
    if not is_transitive(A):
        raise GridError("structure is not transitive")
    truth = lambda f: evaluate(A, f)
    us = np.stack([truth(u(i)) for i in range(n + 1)], axis=1)
    vs = np.stack([truth(v(j)) for j in range(n + 1)], axis=1)
    ps = np.stack([truth(p(k)) for k in range(1, n + 1)], axis=1)
    qs = np.stack([truth(q(k)) for k in range(1, n + 1)], axis=1)
    zmask, oh, ov = truth(Z), truth(OH), truth(OV)
    D = direct_successors(A)
    start = A.index(w0)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for a in frontier:
            for b in np.flatnonzero(D[a] & zmask):
                if b not in seen:
                    seen.add(int(b))
                    nxt.append(int(b))
        frontier = nxt
    out = GridAnalysis(n)
    by_index = {}
    for k in sorted(seen):
        ci, cj = np.flatnonzero(us[k]), np.flatnonzero(vs[k])
        if len(ci) != 1 or len(cj) != 1:
            raise GridError(f"z-world {A.worlds[k]} has no unique character")
        i, j = int(ci[0]), int(cj[0])
        s = "".join("1" if b else "0" for b in ps[k, :i])
        t = "".join("1" if b else "0" for b in qs[k, :j])
        idx = (i, j, s, t)
        if idx in by_index:
            raise GridError(f"z-worlds {A.worlds[by_index[idx]]} and {A.worlds[k]} share the index {idx}")
        by_index[idx] = k
        out.z_worlds[A.worlds[k]] = idx
    for i in range(n + 1):
        for j in range(n + 1):
            for s in _bitstrings(i):
                for t in _bitstrings(j):
                    if (i, j, s, t) not in by_index:
                        raise GridError(f"no z-world with index {(i, j, s, t)}")
    for s in _bitstrings(n):
        for t in _bitstrings(n):
            out.g_worlds[(int(s, 2), int(t, 2))] = A.worlds[by_index[(n, n, s, t)]]
    R = A.matrix
    N = 2 ** n
    for (axis, omask, bit, inventory) in ((0, oh, ps[:, n - 1], out.horizontal), (1, ov, qs[:, n - 1], out.vertical)):
        for x in range(N):
            for y in range(N):
                nb = (x + 1, y) if axis == 0 else (x, y + 1)
                if nb[axis] >= N:
                    continue
                a, b = A.index(out.g_worlds[(x, y)]), A.index(out.g_worlds[nb])
                shared = np.flatnonzero(R[a] & R[b] & omask & (bit == bit[b]))
                if not len(shared):
                    raise GridError(f"g-worlds {(x, y)} and {nb} share no o-world")
                inventory[(x, y)] = tuple(A.worlds[o] for o in shared)
    return out


def decode_tiling(P: PointedStructure, n: int, sys: TilingSystem) -> TilingGrid:
    analysis = analyze_grid(P, n)
    A = P.structure
    N = 2 ** n
    colours = {c: evaluate(A, colour_letter(c)) for c in sys.colours}

    def colour(x, y):
        k = A.index(analysis.g_worlds[(x, y)])
        found = [c for c in sys.colours if colours[c][k]]
        if len(found) != 1:
            raise GridError(f"g-world {(x, y)} carries colours {found}")
        return found[0]

    return TilingGrid.from_function(N, colour)
