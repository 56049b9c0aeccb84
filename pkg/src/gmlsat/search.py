"""Bounded model search through a SAT encoding.

A search problem is a set of *labelled* structures: every world carries a
valuation of some letters, a propositional constraint must hold at every
world, another at the root, and each rule says that a guard letter (or its
negation) forces a lower or upper bound on the number of successors
satisfying a propositional body.  Both the normal form of the transitive
procedure and a Hintikka-style encoding of arbitrary formulas fit this
shape.

For each size n = 1, 2, ... the problem is handed to a CDCL solver, and the
first model found is thinned out to a locally edge-minimal one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from pysat.card import CardEnc, EncType, ITotalizer
from pysat.formula import IDPool
from pysat.solvers import Solver

from . import formula as fm
from .kripke import FrameClass, KripkeStructure, PointedStructure, generated
from .normal_form import NormalForm

SOLVER_NAME = "g4"


@dataclass(frozen=True)
class Rule:
    """``guard -> dia>=count body`` (kind ">=") or ``guard -> dia<=count body``.

    ``guard`` is a letter name and ``positive`` says whether the letter or its
    negation triggers the rule.  A guard of None means the rule always applies.
    """

    guard: Optional[str]
    positive: bool
    kind: str
    count: int
    body: fm.Formula


def nf_problem(nf: NormalForm):
    """Root constraint, local constraint and rules of a normal form."""
    rules = [Rule(c.guard, True, ">=", c.count, c.body) for c in nf.lowers]
    rules += [Rule(c.guard, True, "<=", c.count, c.body) for c in nf.uppers]
    return nf.eta, nf.theta, rules


def hintikka_problem(f: fm.Formula):
    """Name every graded subformula by a fresh letter that tracks its truth."""
    used = set(fm.letters(f))
    names = {}
    memo = {}
    rules = []
    for g in fm.subformulas(f):
        if g in memo:
            continue
        if isinstance(g, (fm.AtLeast, fm.AtMost)):
            rho = type(g)(g.count, memo[g.body])
            if rho not in names:
                b = fm.fresh_letters(1, used, "b_")[0]
                used.add(b)
                names[rho] = b
                body = rho.body
                if isinstance(rho, fm.AtLeast):
                    rules.append(Rule(b, True, ">=", rho.count, body))
                    rules.append(Rule(b, False, "<=", rho.count - 1, body))
                else:
                    rules.append(Rule(b, True, "<=", rho.count, body))
                    rules.append(Rule(b, False, ">=", rho.count + 1, body))
            memo[g] = fm.Letter(names[rho])
        elif isinstance(g, fm.Not):
            memo[g] = fm.Not(memo[g.arg])
        elif isinstance(g, (fm.And, fm.Or, fm.Implies, fm.Iff)):
            memo[g] = type(g)(memo[g.left], memo[g.right])
        else:
            memo[g] = g
    return memo[f], fm.TRUE, rules


class _Encoder:
    def __init__(self, n):
        self.n = n
        self.pool = IDPool()
        self.clauses = []
        self.memo = {}
        self.true = self.pool.id(("true",))
        self.clauses.append([self.true])

    def edge(self, a, b):
        return self.pool.id(("r", a, b))

    def letter(self, w, name):
        return self.pool.id(("v", w, name))

    def lit(self, f, w):
        """Literal equivalent to propositional ``f`` at world ``w`` (Tseitin)."""
        key = (f, w)
        if key in self.memo:
            return self.memo[key]
        if isinstance(f, fm.Letter):
            out = self.letter(w, f.name)
        elif isinstance(f, fm.Top):
            out = self.true
        elif isinstance(f, fm.Bottom):
            out = -self.true
        elif isinstance(f, fm.Not):
            out = -self.lit(f.arg, w)
        elif isinstance(f, (fm.And, fm.Or, fm.Implies, fm.Iff)):
            a, b = self.lit(f.left, w), self.lit(f.right, w)
            out = self.pool.id(("t", f, w))
            if isinstance(f, fm.Implies):
                f, a = fm.Or(f.left, f.right), -a
            if isinstance(f, fm.And):
                self.clauses += [[-out, a], [-out, b], [out, -a, -b]]
            elif isinstance(f, fm.Or):
                self.clauses += [[-out, a, b], [out, -a], [out, -b]]
            else:
                self.clauses += [[-out, -a, b], [-out, a, -b], [out, a, b], [out, -a, -b]]
        else:
            raise ValueError("graded operator inside a propositional constraint")
        self.memo[key] = out
        return out

    def rule(self, k, rule, w):
        n = self.n
        if rule.guard is None:
            trigger = self.true
        else:
            trigger = self.letter(w, rule.guard)
            trigger = trigger if rule.positive else -trigger
        if rule.kind == ">=":
            if rule.count <= 0:
                return
            if rule.count > n:
                self.clauses.append([-trigger])
                return
        else:
            if rule.count < 0:
                self.clauses.append([-trigger])
                return
            if rule.count >= n:
                return
        terms = []
        for u in range(n):
            e = self.pool.id(("e", k, w, u))
            r, b = self.edge(w, u), self.lit(rule.body, u)
            self.clauses += [[-e, r], [-e, b], [e, -r, -b]]
            terms.append(e)
        if rule.kind == ">=":
            enc = CardEnc.atleast(terms, bound=rule.count, vpool=self.pool, encoding=EncType.seqcounter)
        else:
            enc = CardEnc.atmost(terms, bound=rule.count, vpool=self.pool, encoding=EncType.seqcounter)
        self.clauses += [c + [-trigger] for c in enc.clauses]

    def frame(self, frames):
        n = self.n
        r = self.edge
        if FrameClass.RFL in frames:
            self.clauses += [[r(w, w)] for w in range(n)]
        if FrameClass.SER in frames:
            self.clauses += [[r(w, u) for u in range(n)] for w in range(n)]
        if FrameClass.SYM in frames:
            self.clauses += [[-r(a, b), r(b, a)] for a in range(n) for b in range(n) if a < b]
            self.clauses += [[r(a, b), -r(b, a)] for a in range(n) for b in range(n) if a < b]
        if FrameClass.TR in frames:
            self.clauses += [
                [-r(a, b), -r(b, c), r(a, c)] for a in range(n) for b in range(n) for c in range(n)
            ]
        if FrameClass.EUCL in frames:
            self.clauses += [
                [-r(a, b), -r(a, c), r(b, c)] for a in range(n) for b in range(n) for c in range(n)
            ]


def _solve_size(n, root, local, rules, frames, sparse):
    enc = _Encoder(n)
    enc.clauses.append([enc.lit(root, 0)])
    for w in range(n):
        if not isinstance(local, fm.Top):
            enc.clauses.append([enc.lit(local, w)])
        for k, rule in enumerate(rules):
            enc.rule(k, rule, w)
    enc.frame(frames)
    edges = [enc.edge(a, b) for a in range(n) for b in range(n)]
    with Solver(name=SOLVER_NAME, bootstrap_with=enc.clauses) as s:
        if not s.solve():
            return None
        model = set(l for l in s.get_model() if l > 0)
        if sparse:
            # shrink the number of edges while a model remains
            tot = ITotalizer(lits=edges, ubound=len(edges), top_id=enc.pool.top)
            s.append_formula(tot.cnf.clauses)
            while True:
                k = sum(1 for e in edges if e in model)
                if k == 0 or not s.solve(assumptions=[-tot.rhs[k - 1]]):
                    break
                model = set(l for l in s.get_model() if l > 0)
            tot.delete()
    return enc, model


def find_model(root, local, rules, frames, letters, max_size, min_size=1, sparse=True):
    """Smallest labelled structure (up to ``max_size`` worlds) meeting the constraints.

    Returns a pointed structure over ``letters`` rooted at ``"w0"``, or None.
    """
    frames = frozenset(frames)
    for n in range(min_size, max_size + 1):
        found = _solve_size(n, root, local, rules, frames, sparse)
        if found is None:
            continue
        enc, model = found
        R = np.array([[enc.edge(a, b) in model for b in range(n)] for a in range(n)], dtype=bool)
        worlds = [f"w{i}" for i in range(n)]
        valuation = {}
        for p in sorted(letters):
            key = ("v",)
            valuation[p] = [worlds[w] for w in range(n) if enc.pool.obj2id.get(key + (w, p)) in model]
        A = KripkeStructure(worlds, R, valuation)
        return PointedStructure(generated(A, ["w0"]), "w0")
    return None


def boolean_abstraction_sat(f: fm.Formula) -> bool:
    """Is ``f`` satisfiable when graded subformulas are read as free atoms?"""
    root, _, _ = hintikka_problem(f)
    enc = _Encoder(1)
    enc.clauses.append([enc.lit(root, 0)])
    with Solver(name=SOLVER_NAME, bootstrap_with=enc.clauses) as s:
        return s.solve()
