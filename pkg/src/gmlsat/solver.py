"""Satisfiability of graded modal formulas over the 32 frame classes.

``decide`` picks a procedure from the frame conditions:

* Euclidean-type classes (Eucl, or both Sym and Tr) go through the
  one-variable counting translation and are always answered exactly.
* Other transitive classes are searched for models up to the small-model
  bound; with a smaller cap the answer may be unknown.
* The remaining classes only get a bounded search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import formula as fm
from . import search
from .c1 import build_alpha, decide_c1, model_from_profile
from .kripke import FrameClass, PointedStructure, check, frame_properties
from .normal_form import NormalForm, normalize, strip
from .verdict import Verdict

RFL, SER, SYM, TR, EUCL = FrameClass.RFL, FrameClass.SER, FrameClass.SYM, FrameClass.TR, FrameClass.EUCL

DEFAULT_CAP = 12


@dataclass(frozen=True)
class SolverOptions:
    """``cap`` bounds the size of searched models; ``seed`` is recorded for
    reproducibility (the search itself is deterministic)."""

    cap: Optional[int] = DEFAULT_CAP
    seed: int = 0
    sparse: bool = True

    def __post_init__(self):
        if self.cap is not None and self.cap < 1:
            raise ValueError("cap must be at least 1")


def is_euclidean_type(frames) -> bool:
    frames = set(frames)
    return EUCL in frames or {SYM, TR} <= frames


def _verified(model: PointedStructure, f, frames) -> Verdict:
    A, w = model
    if not check(A, w, f):
        raise RuntimeError("internal error: model does not satisfy the formula")
    missing = set(frames) - frame_properties(A)
    if missing:
        raise RuntimeError(f"internal error: model frame lacks {sorted(c.value for c in missing)}")
    return Verdict.sat(model)


def decide(f: fm.Formula, frames=(), opts: SolverOptions = SolverOptions()) -> Verdict:
    frames = frozenset(frames)
    if is_euclidean_type(frames):
        return decide_euclidean(f, frames)
    if TR in frames:
        return decide_transitive(f, frames, opts)
    return decide_bounded(f, frames, opts)


def decide_euclidean(f: fm.Formula, frames) -> Verdict:
    frames = frozenset(frames)
    if not is_euclidean_type(frames):
        raise ValueError("the class must contain Eucl or both Sym and Tr")
    rest = frames - {EUCL}
    profile = decide_c1(build_alpha(f, rest))
    if profile is None:
        return Verdict.unsat("counting translation is unsatisfiable")
    return _verified(model_from_profile(profile, f, rest), f, frames | {EUCL})


def model_size_bound(nf: NormalForm) -> int:
    """Small-model bound for transitive frames in terms of the lower constraints."""
    ell = len(nf.lowers)
    b = max(2, sum(c.count for c in nf.lowers))
    return (b + 1) * (b ** (2 * ell + 1) - 1) // (b - 1)


def decide_transitive(f: fm.Formula, frames, opts: SolverOptions = SolverOptions()) -> Verdict:
    frames = frozenset(frames)
    if TR not in frames or not frames <= {RFL, SER, TR}:
        raise ValueError("the class must contain Tr and lie within Rfl, Ser, Tr")
    if not search.boolean_abstraction_sat(f):
        return Verdict.unsat("propositionally unsatisfiable")
    g = f
    search_frames = frames
    if SER in frames:
        if RFL not in frames:
            # over transitive frames seriality is expressed by boxdot dia true
            g = fm.And(f, fm.boxdot(fm.dia(fm.TRUE)))
        search_frames = frames - {SER}
    nf = normalize(g)
    bound = model_size_bound(nf)
    limit = bound if opts.cap is None else min(bound, opts.cap)
    root, local, rules = search.nf_problem(nf)
    model = search.find_model(
        root, local, rules, search_frames, fm.letters(f) | nf.fresh, limit, sparse=opts.sparse
    )
    if model is not None:
        return _verified(strip(model, nf.fresh), f, frames)
    if limit == bound:
        return Verdict.unsat(f"no model with at most {bound} worlds (small-model bound)")
    return Verdict.unknown(f"cap {limit} reached below the small-model bound {bound}")


def decide_bounded(f: fm.Formula, frames, opts: SolverOptions = SolverOptions()) -> Verdict:
    """Bounded search for classes without a complete procedure here."""
    frames = frozenset(frames)
    if not search.boolean_abstraction_sat(f):
        return Verdict.unsat("propositionally unsatisfiable")
    cap = DEFAULT_CAP if opts.cap is None else opts.cap
    root, local, rules = search.hintikka_problem(f)
    model = search.find_model(root, local, rules, frames, fm.letters(f), cap, sparse=opts.sparse)
    if model is not None:
        return _verified(model, f, frames)
    return Verdict.unknown("cap reached; class lacks in-scope complete procedure")
