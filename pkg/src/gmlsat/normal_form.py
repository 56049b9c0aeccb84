"""Renaming graded subformulas into the flat normal form.

The result has the shape

    eta & boxdot(theta & (p_i -> dia>=C_i pi_i) & ... & (q_j -> dia<=D_j chi_j) & ...)

with propositional eta, theta, pi_i and chi_j.  Over transitive frames it is
satisfiable exactly when the input is; satisfying models differ only in the
valuation of the fresh guard letters.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import formula as fm
from .kripke import PointedStructure, evaluate


@dataclass(frozen=True)
class Constraint:
    guard: str
    count: int
    body: fm.Formula


@dataclass(frozen=True)
class Renaming:
    """One replaced subformula: ``positive`` names it, ``negative`` its complement."""

    positive: str
    negative: str
    formula: fm.Formula


@dataclass(frozen=True)
class NormalForm:
    eta: fm.Formula
    theta: fm.Formula
    lowers: tuple
    uppers: tuple
    fresh: frozenset
    renamings: tuple = ()

    @property
    def ell(self) -> int:
        return len(self.lowers)

    @property
    def m(self) -> int:
        return len(self.uppers)

    def lower_sum(self) -> int:
        return sum(c.count for c in self.lowers)

    def upper_sum(self) -> int:
        return sum(c.count for c in self.uppers)


def _drop_zero_lower(f: fm.Formula) -> fm.Formula:
    memo = {}
    for g in fm.subformulas(f):
        if g in memo:
            continue
        if isinstance(g, fm.AtLeast) and g.count == 0:
            memo[g] = fm.TRUE
        else:
            memo[g] = _rebuild(g, memo)
    return memo[f]


def _rebuild(g, memo):
    if isinstance(g, fm.Not):
        return fm.Not(memo[g.arg])
    if isinstance(g, (fm.And, fm.Or, fm.Implies, fm.Iff)):
        return type(g)(memo[g.left], memo[g.right])
    if isinstance(g, (fm.AtLeast, fm.AtMost)):
        return type(g)(g.count, memo[g.body])
    return g


def normalize(f: fm.Formula) -> NormalForm:
    """Rename graded subformulas, innermost first, into guard letters."""
    f = _drop_zero_lower(f)
    used = set(fm.letters(f))
    pairs = {}
    lowers, uppers, renamings = [], [], []

    def fresh(prefix):
        name = fm.fresh_letters(1, used, prefix)[0]
        used.add(name)
        return name

    memo = {}
    # post-order visits inner graded subformulas before outer ones, left to right
    for g in fm.subformulas(f):
        if g in memo:
            continue
        if isinstance(g, (fm.AtLeast, fm.AtMost)):
            rho = type(g)(g.count, memo[g.body])
            if rho not in pairs:
                p, q = fresh("p_"), fresh("q_")
                pairs[rho] = p
                renamings.append(Renaming(p, q, rho))
                if isinstance(rho, fm.AtLeast):
                    lowers.append(Constraint(p, rho.count, rho.body))
                    uppers.append(Constraint(q, rho.count - 1, rho.body))
                else:
                    uppers.append(Constraint(p, rho.count, rho.body))
                    lowers.append(Constraint(q, rho.count + 1, rho.body))
            memo[g] = fm.Letter(pairs[rho])
        else:
            memo[g] = _rebuild(g, memo)
    theta = fm.conj(fm.Or(fm.Letter(r.positive), fm.Letter(r.negative)) for r in renamings)
    fresh_names = frozenset(n for r in renamings for n in (r.positive, r.negative))
    return NormalForm(memo[f], theta, tuple(lowers), tuple(uppers), fresh_names, tuple(renamings))


def matrix(nf: NormalForm) -> fm.Formula:
    """The formula under the boxdot."""
    parts = [nf.theta]
    parts += [fm.Implies(fm.Letter(c.guard), fm.AtLeast(c.count, c.body)) for c in nf.lowers]
    parts += [fm.Implies(fm.Letter(c.guard), fm.AtMost(c.count, c.body)) for c in nf.uppers]
    return fm.conj(parts)


def to_formula(nf: NormalForm) -> fm.Formula:
    return fm.And(nf.eta, fm.boxdot(matrix(nf)))


def expand(P: PointedStructure, nf: NormalForm) -> PointedStructure:
    """Give the guard letters their intended meaning in a model of the input.

    Each positive guard is made true where its subformula holds and the
    negative guard where it fails.  If the original formula holds at the
    designated world, ``to_formula(nf)`` holds there afterwards.
    """
    A = P.structure
    val = {p: s for p, s in A.valuation.items() if p not in nf.fresh}
    B = A.with_valuation(val)
    for r in nf.renamings:
        truth = evaluate(B, r.formula)
        pos = [w for w, t in zip(A.worlds, truth) if t]
        neg = [w for w, t in zip(A.worlds, truth) if not t]
        val[r.positive] = pos
        val[r.negative] = neg
        B = A.with_valuation(val)
    return PointedStructure(B, P.world)


def strip(P: PointedStructure, names) -> PointedStructure:
    """Drop the given letters from the valuation."""
    names = set(names)
    A = P.structure
    val = {p: s for p, s in A.valuation.items() if p not in names}
    return PointedStructure(A.with_valuation(val), P.world)
