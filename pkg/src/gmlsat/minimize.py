"""Shrinking transitive models of a normal form.

Four stages bound, in turn, the depth of the structure, then its depth in
terms of the lower constraints alone, its breadth and its width.  Together
with the generated-substructure step the result has at most
``model_size_bound(nf)`` worlds.  All stages keep reflexivity and every
stage output is checked against the formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kripke import (
    KripkeStructure,
    PointedStructure,
    check,
    clique_ids,
    evaluate,
    generated,
    is_transitive,
    metrics,
    transitive_closure,
)
from .normal_form import NormalForm, to_formula


@dataclass
class StageTrace:
    """Intermediate sets of the stages, keyed by world identifier."""

    d: dict = field(default_factory=dict)
    index_sets: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    selected: dict = field(default_factory=dict)
    cliques: dict = field(default_factory=dict)
    kept: dict = field(default_factory=dict)


def _require(P: PointedStructure, nf: NormalForm):
    A, w = P
    if not is_transitive(A):
        raise ValueError("minimization needs a transitive structure")
    if not check(A, w, to_formula(nf)):
        raise ValueError("the structure does not satisfy the normal form at its designated world")


def _verify(P, nf, stage):
    if not check(P.structure, P.world, to_formula(nf)):
        raise RuntimeError(f"internal error: stage {stage} broke the formula")
    if not is_transitive(P.structure):
        raise RuntimeError(f"internal error: stage {stage} broke transitivity")
    return P


def _counts(A: KripkeStructure, R: np.ndarray, body) -> np.ndarray:
    truth = evaluate(A, body).astype(np.int64)
    return R.astype(np.int64) @ truth


def d_values(A: KripkeStructure, nf: NormalForm) -> np.ndarray:
    """min(D_j + 1, |R*(w, chi_j)|) for every world and upper constraint."""
    n = len(A.worlds)
    Rstar = A.matrix | np.eye(n, dtype=bool)
    out = np.zeros((n, len(nf.uppers)), dtype=np.int64)
    for j, c in enumerate(nf.uppers):
        out[:, j] = np.minimum(_counts(A, Rstar, c.body), min(c.count + 1, n + 1))
    return out


def stage1_finite_depth(P: PointedStructure, nf: NormalForm, trace: StageTrace = None) -> PointedStructure:
    """Merge worlds with equal upper-constraint profiles into cliques.

    A world w sees v and the d-values of w and v agree: then v is made to see
    w too.  Worlds that satisfy chi_j, are irreflexive and have exactly D_j
    chi_j-successors are left out of the merging, since a loop on such a
    world would give it one chi_j-successor too many.
    """
    _require(P, nf)
    A = generated(P.structure, [P.world])
    n = len(A.worlds)
    R = A.matrix
    d = d_values(A, nf)
    same = np.ones((n, n), dtype=bool)
    for j in range(d.shape[1]):
        same &= d[:, j][:, None] == d[:, j][None, :]
    tight = np.zeros(n, dtype=bool)
    irreflexive = ~np.diag(R)
    for c in nf.uppers:
        chi = evaluate(A, c.body)
        tight |= chi & irreflexive & (_counts(A, R, c.body) == c.count)
    Rd = R & same & ~tight[:, None] & ~tight[None, :]
    if trace is not None:
        trace.d = {w: tuple(int(x) for x in d[i]) for i, w in enumerate(A.worlds)}
    out = PointedStructure(A.with_relation(transitive_closure(R | Rd.T)), P.world)
    return _verify(out, nf, 1)


def index_sets(A: KripkeStructure, nf: NormalForm):
    """I(w) and I^s(w) as boolean arrays of shape (worlds, lower constraints)."""
    R = A.matrix
    n = len(R)
    cid = clique_ids(A)
    outside = cid[:, None] != cid[None, :]
    I = np.zeros((n, len(nf.lowers)), dtype=bool)
    Is = np.zeros_like(I)
    for i, c in enumerate(nf.lowers):
        I[:, i] = _counts(A, R, c.body) >= c.count
        Is[:, i] = _counts(A, R & outside, c.body) >= c.count
    return I, Is


def stage2_bound_depth(P: PointedStructure, nf: NormalForm, trace: StageTrace = None) -> PointedStructure:
    """Cut direct edges that do not change which lower constraints hold."""
    _require(P, nf)
    A = P.structure
    limit = 2 * len(nf.lowers)
    start = metrics(A).depth
    passes = 0
    while metrics(A).depth > limit:
        if passes > start:
            raise RuntimeError("internal error: stage 2 did not reach the depth bound")
        passes += 1
        R = A.matrix
        I, Is = index_sets(A, nf)
        if trace is not None:
            trace.index_sets.append(
                {w: (frozenset(np.flatnonzero(I[k])), frozenset(np.flatnonzero(Is[k]))) for k, w in enumerate(A.worlds)}
            )
        S = R & ~R.T
        direct = S & ~((S.astype(np.float32) @ S.astype(np.float32)) > 0.5)
        equal = np.all(Is[None, :, :] == I[:, None, :], axis=2)
        A = A.with_relation(R & ~(direct & equal))
        if not is_transitive(A):
            raise RuntimeError("internal error: stage 2 broke transitivity")
    return _verify(PointedStructure(A, P.world), nf, 2)


def stage3_bound_breadth(P: PointedStructure, nf: NormalForm, trace: StageTrace = None) -> PointedStructure:
    """Keep clique edges and, per lower constraint, the first C_i strict witnesses."""
    _require(P, nf)
    A = P.structure
    R = A.matrix
    n = len(R)
    Rq = R & R.T
    S = R & ~R.T
    keep = Rq.copy()
    for i, c in enumerate(nf.lowers):
        body = evaluate(A, c.body)
        for w in range(n):
            W = np.flatnonzero(S[w] & body)
            chosen = W[: c.count]
            keep[w, chosen] = True
            if trace is not None:
                trace.witnesses[(A.worlds[w], i)] = tuple(A.worlds[v] for v in W)
                trace.selected[(A.worlds[w], i)] = tuple(A.worlds[v] for v in chosen)
    out = PointedStructure(A.with_relation(transitive_closure(keep)), P.world)
    return _verify(out, nf, 3)


def stage4_bound_width(P: PointedStructure, nf: NormalForm, trace: StageTrace = None) -> PointedStructure:
    """Thin every clique to at most sum(C_i) + 1 worlds."""
    _require(P, nf)
    A, w0 = P
    phi = evaluate(A, to_formula(nf))
    cid = clique_ids(A)
    bodies = [evaluate(A, c.body) for c in nf.lowers]
    keep = np.zeros(len(A.worlds), dtype=bool)
    designated = A.index(w0)
    for rep in np.unique(cid):
        members = np.flatnonzero(cid == rep)
        if designated in members:
            q0 = designated
        else:
            good = members[phi[members]]
            q0 = good[0] if len(good) else members[0]
        keep[q0] = True
        chosen = [int(q0)]
        for c, body in zip(nf.lowers, bodies):
            sel = members[body[members]][: c.count]
            keep[sel] = True
            chosen.extend(int(v) for v in sel)
        if trace is not None:
            trace.cliques[A.worlds[rep]] = tuple(A.worlds[v] for v in members)
            trace.kept[A.worlds[rep]] = tuple(A.worlds[v] for v in sorted(set(chosen)))
    out = PointedStructure(A.restrict(keep), w0)
    return _verify(out, nf, 4)


def minimize(P: PointedStructure, nf: NormalForm, trace: StageTrace = None) -> PointedStructure:
    """Run the four stages and cut down to the part generated by the designated world."""
    _require(P, nf)
    for stage in (stage1_finite_depth, stage2_bound_depth, stage3_bound_breadth, stage4_bound_width):
        P = stage(P, nf, trace)
    out = PointedStructure(generated(P.structure, [P.world]), P.world)
    return _verify(out, nf, "final")
