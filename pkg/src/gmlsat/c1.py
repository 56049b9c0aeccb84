"""One-variable first-order logic with counting quantifiers.

Graded formulas over Euclidean-type frames are translated into sentences of
this logic (``build_alpha``).  A sentence is decided by guessing the truth
values of its quantified subsentences and solving the resulting counting
constraints over one-types (``decide_c1``).  A satisfying profile is turned
back into a Kripke model by ``model_from_profile``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import formula as fm
from .kripke import FrameClass, KripkeStructure, PointedStructure, check, frame_properties, generated

# -- syntax -------------------------------------------------------------------


class C1Formula:
    __slots__ = ()

    def __str__(self):
        return render_c1(self)


@dataclass(frozen=True)
class Atom(C1Formula):
    name: str


@dataclass(frozen=True)
class Const(C1Formula):
    value: bool


@dataclass(frozen=True)
class Neg(C1Formula):
    arg: C1Formula


@dataclass(frozen=True)
class Conj(C1Formula):
    args: tuple


@dataclass(frozen=True)
class Disj(C1Formula):
    args: tuple


@dataclass(frozen=True)
class Impl(C1Formula):
    left: C1Formula
    right: C1Formula


@dataclass(frozen=True)
class Equiv(C1Formula):
    left: C1Formula
    right: C1Formula


@dataclass(frozen=True)
class CountQ(C1Formula):
    """``E>=C x. body`` (kind ``">="``) or ``E<=C x. body`` (kind ``"<="``)."""

    kind: str
    count: int
    body: C1Formula

    def __post_init__(self):
        if self.kind not in (">=", "<="):
            raise ValueError(f"bad quantifier kind {self.kind!r}")
        if self.count < 0:
            raise ValueError("quantifier count must be nonnegative")


def exists(body: C1Formula) -> CountQ:
    return CountQ(">=", 1, body)


def forall(body: C1Formula) -> CountQ:
    return CountQ("<=", 0, Neg(body))


def conj(*args) -> C1Formula:
    return args[0] if len(args) == 1 else Conj(tuple(args))


def _children(f):
    if isinstance(f, Neg):
        return (f.arg,)
    if isinstance(f, (Conj, Disj)):
        return f.args
    if isinstance(f, (Impl, Equiv)):
        return (f.left, f.right)
    if isinstance(f, CountQ):
        return (f.body,)
    return ()


def _postorder(f):
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if done:
            yield g
            continue
        stack.append((g, True))
        for c in reversed(_children(g)):
            stack.append((c, False))


def predicates(f: C1Formula) -> frozenset:
    return frozenset(g.name for g in _postorder(f) if isinstance(g, Atom))


def quantified(f: C1Formula) -> list:
    """Distinct quantified subsentences, inner ones first."""
    seen = {}
    for g in _postorder(f):
        if isinstance(g, CountQ) and g not in seen:
            seen[g] = None
    return list(seen)


def _check_closed(f):
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            raise ValueError(f"open formula: {g.name}(x) occurs outside every quantifier")
        if not isinstance(g, CountQ):
            stack.extend(_children(g))


def render_c1(f: C1Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.name}(x)"
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Neg):
        return "~" + render_c1(f.arg)
    if isinstance(f, Conj):
        return "(" + " & ".join(render_c1(a) for a in f.args) + ")"
    if isinstance(f, Disj):
        return "(" + " | ".join(render_c1(a) for a in f.args) + ")"
    if isinstance(f, Impl):
        return f"({render_c1(f.left)} -> {render_c1(f.right)})"
    if isinstance(f, Equiv):
        return f"({render_c1(f.left)} <-> {render_c1(f.right)})"
    if f.kind == ">=" and f.count == 1:
        return f"exists x. {render_c1(f.body)}"
    if f.kind == "<=" and f.count == 0 and isinstance(f.body, Neg):
        return f"forall x. {render_c1(f.body.arg)}"
    return f"E{f.kind}{f.count} x. {render_c1(f.body)}"


# -- translation ----------------------------------------------------------------

EUCLIDEAN_TYPE = frozenset({FrameClass.RFL, FrameClass.SER, FrameClass.SYM, FrameClass.TR})


def relativizers(f: fm.Formula) -> tuple:
    """The three predicate names q0, q1, q2 used when translating ``f``."""
    return tuple(fm.fresh_letters(3, fm.letters(f), prefix="q_"))


def translate(f: fm.Formula, guard: str, inner: str) -> C1Formula:
    """Relativize graded operators at the top to ``guard`` and below to ``inner``."""
    memo = {}

    def go(g, rel):
        key = (g, rel)
        if key in memo:
            return memo[key]
        if isinstance(g, fm.Letter):
            out = Atom(g.name)
        elif isinstance(g, fm.Top):
            out = Const(True)
        elif isinstance(g, fm.Bottom):
            out = Const(False)
        elif isinstance(g, fm.Not):
            out = Neg(go(g.arg, rel))
        elif isinstance(g, fm.And):
            out = Conj((go(g.left, rel), go(g.right, rel)))
        elif isinstance(g, fm.Or):
            out = Disj((go(g.left, rel), go(g.right, rel)))
        elif isinstance(g, fm.Implies):
            out = Impl(go(g.left, rel), go(g.right, rel))
        elif isinstance(g, fm.Iff):
            out = Equiv(go(g.left, rel), go(g.right, rel))
        else:
            kind = ">=" if isinstance(g, fm.AtLeast) else "<="
            out = CountQ(kind, g.count, Conj((go(g.body, inner), Atom(rel))))
        memo[key] = out
        return out

    return go(f, guard)


def epsilon(cls: FrameClass, q: tuple) -> C1Formula:
    q0, q1, q2 = (Atom(n) for n in q)
    # q2 -> q1 is added to the Rfl and Sym conditions: without it the
    # successors of the designated world need not coincide with q1
    closed = conj(forall(Impl(q0, q1)), forall(Impl(q2, q1)))
    if cls is FrameClass.RFL:
        return closed
    if cls is FrameClass.SER:
        return exists(q1)
    if cls is FrameClass.SYM:
        return Disj((closed, Neg(exists(q1))))
    if cls is FrameClass.TR:
        return forall(Impl(q2, q1))
    raise ValueError(f"no condition for {cls}")


def build_alpha(f: fm.Formula, frames=()) -> C1Formula:
    """The sentence that is satisfiable iff ``f`` is, over Eucl and ``frames``."""
    frames = frozenset(frames)
    bad = frames - EUCLIDEAN_TYPE
    if bad:
        raise ValueError(f"classes {sorted(c.value for c in bad)} are not allowed here")
    q = relativizers(f)
    q0, q1, q2 = (Atom(n) for n in q)
    parts = [exists(Conj((translate(f, q[1], q[2]), q0))), forall(Impl(q1, q2))]
    for cls in (FrameClass.RFL, FrameClass.SER, FrameClass.SYM, FrameClass.TR):
        if cls in frames:
            parts.append(epsilon(cls, q))
    return Conj(tuple(parts))


# -- semantics ----------------------------------------------------------------------


@dataclass(frozen=True)
class CardinalityProfile:
    """A finite model up to isomorphism: how many elements realize each one-type.

    One-types are frozensets of the predicates that hold; predicates listed in
    ``predicates`` but absent from a type are false for it.
    """

    predicates: tuple
    counts: dict = field(hash=False)

    def __post_init__(self):
        clean = {frozenset(t): int(n) for t, n in self.counts.items() if n}
        if any(n < 0 for n in clean.values()):
            raise ValueError("counts must be nonnegative")
        if not clean:
            raise ValueError("a profile needs at least one element")
        object.__setattr__(self, "counts", clean)

    @property
    def population(self) -> int:
        return sum(self.counts.values())


def _holds(f, t, sentence_value):
    if isinstance(f, Atom):
        return f.name in t
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Neg):
        return not _holds(f.arg, t, sentence_value)
    if isinstance(f, Conj):
        return all(_holds(a, t, sentence_value) for a in f.args)
    if isinstance(f, Disj):
        return any(_holds(a, t, sentence_value) for a in f.args)
    if isinstance(f, Impl):
        return (not _holds(f.left, t, sentence_value)) or _holds(f.right, t, sentence_value)
    if isinstance(f, Equiv):
        return _holds(f.left, t, sentence_value) == _holds(f.right, t, sentence_value)
    return sentence_value(f)


def eval_c1(profile: CardinalityProfile, sentence: C1Formula) -> bool:
    _check_closed(sentence)
    memo = {}

    def value(q):
        if q not in memo:
            total = sum(n for t, n in profile.counts.items() if _holds(q.body, t, value))
            memo[q] = total >= q.count if q.kind == ">=" else total <= q.count
        return memo[q]

    return _holds(sentence, frozenset(), value)


# -- decision procedure ----------------------------------------------------------------


def _eval3(f, guess):
    """Kleene evaluation of a sentence under a partial guess (None = unknown)."""
    if isinstance(f, CountQ):
        return guess.get(f)
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Neg):
        v = _eval3(f.arg, guess)
        return None if v is None else not v
    if isinstance(f, (Conj, Disj)):
        vals = [_eval3(a, guess) for a in f.args]
        absorbing = isinstance(f, Disj)
        if absorbing in vals:
            return absorbing
        return None if None in vals else not absorbing
    if isinstance(f, Impl):
        return _eval3(Disj((Neg(f.left), f.right)), guess)
    if isinstance(f, Equiv):
        a, b = _eval3(f.left, guess), _eval3(f.right, guess)
        return None if a is None or b is None else a == b
    raise ValueError("open formula")


def _truth_table(f, table, preds, guess):
    """Truth of an open formula on every one-type (rows of ``table``)."""
    if isinstance(f, Atom):
        return table[:, preds[f.name]]
    if isinstance(f, Const):
        return np.full(len(table), f.value)
    if isinstance(f, CountQ):
        return np.full(len(table), guess[f])
    vals = [_truth_table(c, table, preds, guess) for c in _children(f)]
    if isinstance(f, Neg):
        return ~vals[0]
    if isinstance(f, Conj):
        return np.logical_and.reduce(vals)
    if isinstance(f, Disj):
        return np.logical_or.reduce(vals)
    if isinstance(f, Impl):
        return ~vals[0] | vals[1]
    return vals[0] == vals[1]


def _propagate(cons, lo, hi):
    """Tighten variable bounds against sum constraints; False on conflict."""
    changed = True
    while changed:
        changed = False
        for members, clo, chi in cons:
            slo = sum(lo[v] for v in members)
            shi = sum(hi[v] for v in members)
            if slo > chi or shi < clo:
                return False
            for v in members:
                nlo = clo - (shi - hi[v])
                nhi = chi - (slo - lo[v])
                if nlo > lo[v]:
                    lo[v] = nlo
                    changed = True
                if nhi < hi[v]:
                    hi[v] = nhi
                    changed = True
                if lo[v] > hi[v]:
                    return False
            if changed:
                break
    return True


def _solve_counts(cons, nvars, cap):
    """Integer feasibility for sum constraints over 0..cap variables.

    ``cons`` holds (variables, lower, upper) triples.  Depth-first search
    that tries the smallest value of a variable first, with bound
    propagation at every node.
    """
    stack = [([0] * nvars, [cap] * nvars)]
    while stack:
        lo, hi = stack.pop()
        if not _propagate(cons, lo, hi):
            continue
        open_vars = [v for v in range(nvars) if lo[v] < hi[v]]
        if not open_vars:
            return lo
        v = open_vars[0]
        up_lo, up_hi = list(lo), list(hi)
        up_lo[v] += 1
        stack.append((up_lo, up_hi))
        fix_hi = list(hi)
        fix_hi[v] = lo[v]
        stack.append((list(lo), fix_hi))
    return None


def _constraint(q, holds):
    inf = float("inf")
    if q.kind == ">=":
        return (q.count, inf) if holds else (0, q.count - 1)
    return (0, q.count) if holds else (q.count + 1, inf)


class _Search:
    def __init__(self, sentence):
        _check_closed(sentence)
        self.sentence = sentence
        self.preds = sorted(predicates(sentence))
        self.index = {p: i for i, p in enumerate(self.preds)}
        self.table = np.array(
            list(itertools.product((False, True), repeat=len(self.preds))), dtype=bool
        ).reshape(-1, len(self.preds))
        self.quants = quantified(sentence)
        # Cap on every count variable.  Any solution stays a solution after
        # lowering each value above the cap to the cap: a capped variable on
        # its own exceeds every lower bound it occurs in (all bounds are
        # below the cap), and lowering values can only help upper bounds.
        self.cap = 1 + sum(q.count + 1 for q in self.quants)

    def feasible(self, rows):
        """Solve the count constraints; ``rows`` are (type mask, lo, hi)."""
        rows = list(rows) + [(np.ones(len(self.table), dtype=bool), 1, float("inf"))]
        # types with identical membership in every constraint share a variable
        sig = np.stack([r[0] for r in rows], axis=1)
        classes, first, inverse = np.unique(sig, axis=0, return_index=True, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        cons = []
        for k, (_, lo, hi) in enumerate(rows):
            members = [c for c in range(len(classes)) if classes[c, k]]
            cons.append((members, lo, hi))
        sol = _solve_counts(cons, len(classes), self.cap)
        if sol is None:
            return None
        return {int(first[c]): n for c, n in enumerate(sol) if n}

    def run(self):
        guess = {}
        rows = []

        def dfs(k):
            top = _eval3(self.sentence, guess)
            if top is False:
                return None
            if self.feasible(rows) is None:
                return None
            if k == len(self.quants):
                return self.feasible(rows) if top else None
            q = self.quants[k]
            mask = _truth_table(q.body, self.table, self.index, guess)
            for value in (False, True):
                lo, hi = _constraint(q, value)
                if lo > hi:
                    continue
                guess[q] = value
                rows.append((mask, lo, hi))
                found = dfs(k + 1)
                rows.pop()
                del guess[q]
                if found is not None:
                    return found
            return None

        sol = dfs(0)
        if sol is None:
            return None
        counts = {}
        for row, n in sol.items():
            t = frozenset(p for p, b in zip(self.preds, self.table[row]) if b)
            counts[t] = n
        return CardinalityProfile(tuple(self.preds), counts)


def decide_c1(sentence: C1Formula) -> Optional[CardinalityProfile]:
    """A satisfying cardinality profile, or None when the sentence is unsatisfiable."""
    profile = _Search(sentence).run()
    if profile is not None and not eval_c1(profile, sentence):
        raise RuntimeError("internal error: profile does not satisfy the sentence")
    return profile


# -- back to Kripke structures ---------------------------------------------------------

MAX_MATERIALIZE = 2_000_000


def model_from_profile(profile: CardinalityProfile, f: fm.Formula, frames=()) -> PointedStructure:
    """Build a pointed Kripke model of ``f`` from a profile of ``build_alpha(f, frames)``.

    Worlds are the elements in q0, q1 or q2; world a sees b when a is in q0
    and b in q1, or both are in q2.
    """
    frames = frozenset(frames)
    q = relativizers(f)
    names = set(q)
    elems = []
    for t in sorted(profile.counts, key=lambda t: sorted(t)):
        if t & names:
            elems.extend([t] * profile.counts[t])
    f1 = translate(f, q[1], q[2])
    witness = [t for t in elems if q[0] in t and _holds(f1, t, lambda s: eval_c1(profile, s))]
    if not witness:
        raise RuntimeError("profile has no element in q0 satisfying the translation")
    start = elems.index(witness[0])
    in_q1_only = sum(n for t, n in profile.counts.items() if q[1] in t) != sum(
        n for t, n in profile.counts.items() if q[2] in t
    )
    if q[2] in elems[start] and in_q1_only:
        # the witness sees all of q2 rather than q1; use a copy outside q2
        elems.append(elems[start] - {q[1], q[2]})
        start = len(elems) - 1
    if len(elems) > MAX_MATERIALIZE:
        raise ValueError(f"model with {len(elems)} worlds is too large to materialize")
    order = [start] + [i for i in range(len(elems)) if i != start]
    elems = [elems[i] for i in order]
    mask = {name: np.array([name in t for t in elems]) for name in q}
    R = np.outer(mask[q[0]], mask[q[1]]) | np.outer(mask[q[2]], mask[q[2]])
    worlds = [f"w{i}" for i in range(len(elems))]
    valuation = {}
    for p in fm.letters(f):
        valuation[p] = [w for w, t in zip(worlds, elems) if p in t]
    A = KripkeStructure(worlds, R, valuation)
    A = generated(A, ["w0"])
    if not check(A, "w0", f):
        raise RuntimeError("internal error: reconstructed model does not satisfy the formula")
    missing = (frames | {FrameClass.EUCL}) - frame_properties(A)
    if missing:
        raise RuntimeError(f"internal error: reconstructed frame is not in {sorted(c.value for c in missing)}")
    return PointedStructure(A, "w0")
