"""Finite Kripke structures and the graded modal satisfaction relation.

A structure stores its accessibility relation as a boolean adjacency
matrix; worlds are kept in a fixed order and that order is what the rest of
the package uses for tie-breaking.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import formula as fm


class FrameClass(enum.Enum):
    RFL = "rfl"
    SER = "ser"
    SYM = "sym"
    TR = "tr"
    EUCL = "eucl"

    def __repr__(self):
        return f"FrameClass.{self.name}"


ALL_CLASSES = tuple(FrameClass)


def parse_frames(text: str) -> frozenset:
    """Parse a comma separated list such as ``"rfl,tr"``; ``""`` is no class."""
    out = set()
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            out.add(FrameClass(part))
        except ValueError:
            raise ValueError(f"unknown frame class {part!r}") from None
    return frozenset(out)


def frames_label(frames: Iterable[FrameClass]) -> str:
    return ",".join(c.value for c in ALL_CLASSES if c in set(frames))


class KripkeStructure:
    """Worlds, an accessibility relation and a valuation.

    ``matrix[i, j]`` is true when world ``worlds[j]`` is accessible from
    ``worlds[i]``.  Letters missing from the valuation are false everywhere.
    """

    __slots__ = ("worlds", "matrix", "valuation", "_index", "_float")

    def __init__(self, worlds, matrix, valuation: Mapping[str, Iterable] = None):
        worlds = tuple(worlds)
        if not worlds:
            raise ValueError("a structure needs at least one world")
        index = {w: i for i, w in enumerate(worlds)}
        if len(index) != len(worlds):
            raise ValueError("duplicate world identifiers")
        matrix = np.array(matrix, dtype=bool)
        if matrix.shape != (len(worlds), len(worlds)):
            raise ValueError("relation matrix has the wrong shape")
        matrix.flags.writeable = False
        val = {}
        for name, members in (valuation or {}).items():
            members = frozenset(members)
            unknown = members - index.keys()
            if unknown:
                raise ValueError(f"valuation of {name!r} mentions unknown worlds {sorted(map(str, unknown))}")
            val[name] = members
        self.worlds = worlds
        self.matrix = matrix
        self.valuation = val
        self._index = index
        self._float = None

    @classmethod
    def from_edges(cls, worlds, edges, valuation=None):
        worlds = tuple(worlds)
        index = {w: i for i, w in enumerate(worlds)}
        m = np.zeros((len(worlds), len(worlds)), dtype=bool)
        for a, b in edges:
            if a not in index or b not in index:
                raise ValueError(f"edge ({a!r}, {b!r}) mentions an unknown world")
            m[index[a], index[b]] = True
        return cls(worlds, m, valuation)

    def __len__(self):
        return len(self.worlds)

    def __repr__(self):
        return f"KripkeStructure({len(self.worlds)} worlds, {int(self.matrix.sum())} edges)"

    def __eq__(self, other):
        if not isinstance(other, KripkeStructure):
            return NotImplemented
        strip = lambda v: {k: s for k, s in v.items() if s}
        return (
            self.worlds == other.worlds
            and np.array_equal(self.matrix, other.matrix)
            and strip(self.valuation) == strip(other.valuation)
        )

    __hash__ = None

    def index(self, w) -> int:
        try:
            return self._index[w]
        except KeyError:
            raise KeyError(f"unknown world {w!r}") from None

    @property
    def edges(self) -> frozenset:
        rows, cols = np.nonzero(self.matrix)
        return frozenset((self.worlds[i], self.worlds[j]) for i, j in zip(rows, cols))

    def successors(self, w) -> list:
        row = self.matrix[self.index(w)]
        return [self.worlds[j] for j in np.flatnonzero(row)]

    def letter_mask(self, name: str) -> np.ndarray:
        mask = np.zeros(len(self.worlds), dtype=bool)
        for w in self.valuation.get(name, ()):
            mask[self._index[w]] = True
        return mask

    def true_at(self, w) -> frozenset:
        return frozenset(p for p, s in self.valuation.items() if w in s)

    def float_matrix(self) -> np.ndarray:
        if self._float is None:
            self._float = self.matrix.astype(np.float64)
        return self._float

    def restrict(self, keep) -> "KripkeStructure":
        """Substructure on the worlds selected by a boolean mask or an iterable."""
        if isinstance(keep, np.ndarray) and keep.dtype == bool:
            mask = keep
        else:
            mask = np.zeros(len(self.worlds), dtype=bool)
            for w in keep:
                mask[self.index(w)] = True
        idx = np.flatnonzero(mask)
        worlds = [self.worlds[i] for i in idx]
        kept = set(worlds)
        val = {p: s & kept for p, s in self.valuation.items()}
        return KripkeStructure(worlds, self.matrix[np.ix_(idx, idx)], val)

    def with_relation(self, matrix) -> "KripkeStructure":
        return KripkeStructure(self.worlds, matrix, self.valuation)

    def with_valuation(self, valuation) -> "KripkeStructure":
        return KripkeStructure(self.worlds, self.matrix, valuation)


@dataclass(frozen=True)
class PointedStructure:
    structure: KripkeStructure
    world: object

    def __post_init__(self):
        self.structure.index(self.world)

    def __iter__(self):
        return iter((self.structure, self.world))


@dataclass(frozen=True)
class FrameMetrics:
    depth: int
    breadth: int
    width: int


# -- model checking -----------------------------------------------------------

def evaluate(A: KripkeStructure, f: fm.Formula, memo: dict = None) -> np.ndarray:
    """Truth value of ``f`` at every world, as a boolean vector."""
    n = len(A.worlds)
    memo = {} if memo is None else memo
    for g in fm.subformulas(f):
        if g in memo:
            continue
        if isinstance(g, fm.Letter):
            val = A.letter_mask(g.name)
        elif isinstance(g, fm.Top):
            val = np.ones(n, dtype=bool)
        elif isinstance(g, fm.Bottom):
            val = np.zeros(n, dtype=bool)
        elif isinstance(g, fm.Not):
            val = ~memo[g.arg]
        elif isinstance(g, fm.And):
            val = memo[g.left] & memo[g.right]
        elif isinstance(g, fm.Or):
            val = memo[g.left] | memo[g.right]
        elif isinstance(g, fm.Implies):
            val = ~memo[g.left] | memo[g.right]
        elif isinstance(g, fm.Iff):
            val = memo[g.left] == memo[g.right]
        else:
            # counts never exceed n, so huge subscripts are decided directly
            if g.count > n:
                val = np.full(n, isinstance(g, fm.AtMost))
            else:
                counts = A.float_matrix() @ memo[g.body].astype(np.float64)
                if isinstance(g, fm.AtLeast):
                    val = counts >= g.count - 0.5
                else:
                    val = counts <= g.count + 0.5
        memo[g] = val
    return memo[f]


def check(A: KripkeStructure, w, f: fm.Formula) -> bool:
    """Is ``f`` true at world ``w`` of ``A``?"""
    i = A.index(w)
    return bool(evaluate(A, f)[i])


# -- frame classes ------------------------------------------------------------

def _compose(R: np.ndarray, S: np.ndarray) -> np.ndarray:
    # boolean matrix product through BLAS
    return (R.astype(np.float32) @ S.astype(np.float32)) > 0.5


def frame_properties(A) -> frozenset:
    """The Table I classes whose defining sentence holds on the frame of ``A``."""
    R = A.matrix if isinstance(A, KripkeStructure) else np.asarray(A, dtype=bool)
    out = set()
    if np.all(np.diag(R)):
        out.add(FrameClass.RFL)
    if np.all(R.any(axis=1)):
        out.add(FrameClass.SER)
    if np.array_equal(R, R.T):
        out.add(FrameClass.SYM)
    if not np.any(_compose(R, R) & ~R):
        out.add(FrameClass.TR)
    if not np.any(_compose(R.T, R) & ~R):
        out.add(FrameClass.EUCL)
    return frozenset(out)


def transitive_closure(R: np.ndarray, reflexive: bool = False) -> np.ndarray:
    R = np.array(R, dtype=bool)
    if reflexive:
        R |= np.eye(len(R), dtype=bool)
    while True:
        nxt = R | _compose(R, R)
        if np.array_equal(nxt, R):
            return R
        R = nxt


def is_transitive(A) -> bool:
    return FrameClass.TR in frame_properties(A)


def reachable(A: KripkeStructure, X: Iterable) -> np.ndarray:
    """Boolean mask of R*(X)."""
    mask = np.zeros(len(A.worlds), dtype=bool)
    for w in X:
        mask[A.index(w)] = True
    frontier = mask.copy()
    R = A.matrix
    while frontier.any():
        nxt = R[frontier].any(axis=0) & ~mask
        mask |= nxt
        frontier = nxt
    return mask


def generated(A: KripkeStructure, X: Iterable) -> KripkeStructure:
    """The substructure generated by the worlds in ``X``."""
    X = list(X)
    if not X:
        raise ValueError("generated substructure needs a nonempty seed set")
    return A.restrict(reachable(A, X))


# -- cliques and metrics --------------------------------------------------------

def _require_transitive(A):
    if not is_transitive(A):
        raise ValueError("structure is not transitive")


def clique_ids(A: KripkeStructure) -> np.ndarray:
    """For each world the index of the smallest world in its R-clique."""
    R = A.matrix
    eq = (R & R.T) | np.eye(len(R), dtype=bool)
    return np.argmax(eq, axis=1)


def strict_successors(A: KripkeStructure) -> np.ndarray:
    R = A.matrix
    return R & ~R.T


def direct_successors(A: KripkeStructure) -> np.ndarray:
    """Matrix of the direct successor relation of a transitive structure."""
    _require_transitive(A)
    S = strict_successors(A)
    return S & ~_compose(S, S)


def metrics(A: KripkeStructure) -> FrameMetrics:
    _require_transitive(A)
    R = A.matrix
    n = len(R)
    S = R & ~R.T
    # in a transitive frame strict successors have strictly fewer strict successors
    order = np.argsort(S.sum(axis=1), kind="stable")
    height = np.zeros(n, dtype=int)
    for i in order:
        succ = np.flatnonzero(S[i])
        if len(succ):
            height[i] = 1 + height[succ].max()
    D = S & ~_compose(S, S)
    cid = clique_ids(A)
    breadth = max(len(set(cid[np.flatnonzero(D[i])])) for i in range(n))
    width = int(np.bincount(cid).max())
    return FrameMetrics(int(height.max()), int(breadth), width)


def size_bound(b: int, c: int, d: int) -> int:
    """Largest generated substructure with breadth b, width c and depth d."""
    if b == 0:
        return c
    if b == 1:
        return c * (d + 1)
    return c * (b ** (d + 1) - 1) // (b - 1)


# -- serialization ----------------------------------------------------------------

def to_json(P: PointedStructure) -> dict:
    A = P.structure
    name = str
    return {
        "worlds": [name(w) for w in A.worlds],
        "edges": [[name(A.worlds[i]), name(A.worlds[j])] for i, j in zip(*np.nonzero(A.matrix))],
        "valuation": {
            p: [name(w) for w in A.worlds if w in s] for p, s in sorted(A.valuation.items()) if s
        },
        "designated": name(P.world),
    }


def from_json(data) -> PointedStructure:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        worlds = [str(w) for w in data["worlds"]]
        A = KripkeStructure.from_edges(
            worlds,
            [(str(a), str(b)) for a, b in data.get("edges", [])],
            {p: [str(w) for w in ws] for p, ws in data.get("valuation", {}).items()},
        )
        return PointedStructure(A, str(data.get("designated", worlds[0])))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed model JSON: {exc}") from None


def dump(P: PointedStructure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json(P), fh, indent=1)
        fh.write("\n")


def load(path) -> PointedStructure:
    with open(path, encoding="utf-8") as fh:
        return from_json(json.load(fh))


def to_dot(P: PointedStructure) -> str:
    A = P.structure
    lines = ["digraph kripke {"]
    for w in A.worlds:
        label = ", ".join(sorted(A.true_at(w)))
        shape = "doublecircle" if w == P.world else "circle"
        lines.append(f'  "{w}" [shape={shape}, label="{w}\\n{label}"];')
    for i, j in zip(*np.nonzero(A.matrix)):
        lines.append(f'  "{A.worlds[i]}" -> "{A.worlds[j]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
