import random

from hypothesis import given, settings
from hypothesis import strategies as st

from gmlsat import formula as fm
from gmlsat.kripke import FrameClass as FC
from gmlsat.kripke import PointedStructure, check, is_transitive
from gmlsat.normal_form import expand, normalize, strip, to_formula
from gmlsat.oracle import brute_force

from helpers import formulas, random_formula, random_structure, structures

INTRO = fm.parse("q0 & dia>=2 (~q0 & q1 & dia>=1 (~q0 & ~q1)) & dia<=1 ~q1")


def test_propositional_input():
    nf = normalize(fm.Letter("p"))
    assert nf.eta == fm.Letter("p")
    assert nf.theta == fm.TRUE
    assert nf.ell == nf.m == 0


def test_intro_formula_counts():
    nf = normalize(INTRO)
    assert sorted(c.count for c in nf.lowers) == [1, 2, 2]
    assert sorted(c.count for c in nf.uppers) == [0, 1, 1]


def test_zero_lower_bound_becomes_true():
    nf = normalize(fm.parse("dia>=0 p & q"))
    assert nf.ell == nf.m == 0
    assert nf.eta == fm.And(fm.TRUE, fm.Letter("q"))


def test_to_formula_of_trivial_form():
    nf = normalize(fm.Letter("p"))
    assert to_formula(nf) == fm.And(fm.Letter("p"), fm.boxdot(fm.TRUE))


def test_shared_subformulas_share_guards():
    nf = normalize(fm.parse("dia>=1 p & (q | dia>=1 p)"))
    assert nf.ell == nf.m == 1


def test_guard_letter_clash_avoided():
    nf = normalize(fm.parse("p_0 & q_0 & dia>=1 p_0"))
    assert not nf.fresh & {"p_0", "q_0"}


@given(formulas(depth=3, max_count=4, size=14))
def test_shape(f):
    nf = normalize(f)
    guards = [c.guard for c in nf.lowers + nf.uppers]
    assert len(set(guards)) == len(guards)
    assert set(guards) == nf.fresh
    assert not nf.fresh & fm.letters(f)
    for part in [nf.eta, nf.theta] + [c.body for c in nf.lowers + nf.uppers]:
        assert fm.is_propositional(part)
    assert all(c.count >= 1 for c in nf.lowers)
    assert all(c.count >= 0 for c in nf.uppers)


@given(formulas(depth=3, max_count=4, size=14))
def test_guards_only_in_guard_positions(f):
    nf = normalize(f)
    g = to_formula(nf)
    constraints = [
        sub for sub in fm.subformulas(g.right.left)
        if isinstance(sub, fm.Implies) and fm.is_graded(sub.right)
    ]
    guards = [sub.left.name for sub in constraints]
    assert sorted(guards) == sorted(nf.fresh)
    for sub in constraints:
        assert fm.is_propositional(sub.right.body)


@given(formulas(depth=4, max_count=8, size=20))
def test_size_is_linear(f):
    assert fm.size(to_formula(normalize(f))) <= 40 * fm.size(f) + 40


@given(formulas(depth=3, max_count=3, size=12))
def test_renormalizing_counts(f):
    # every distinct graded subformula of the output (the outer box included)
    # gets one lower and one upper entry
    g = to_formula(normalize(f))
    graded = {s for s in fm.subformulas(g) if fm.is_graded(s) and not (isinstance(s, fm.AtLeast) and s.count == 0)}
    nf2 = normalize(g)
    assert nf2.ell == nf2.m == len(graded)


def test_deterministic():
    assert normalize(INTRO) == normalize(fm.parse(fm.render(INTRO)))


@given(structures(max_worlds=6, transitive=True), formulas(depth=3, size=10), st.data())
@settings(max_examples=300)
def test_expand_gives_a_model(A, f, data):
    w = data.draw(st.sampled_from(A.worlds))
    nf = normalize(f)
    P = expand(PointedStructure(A, w), nf)
    assert check(P.structure, w, f) == check(P.structure, w, nf.eta)
    if check(A, w, f):
        assert check(P.structure, w, to_formula(nf))
    back = strip(P, nf.fresh)
    assert back.structure.valuation == A.valuation


def test_models_of_the_normal_form_satisfy_the_input():
    rng = random.Random(11)
    checked = 0
    for _ in range(300):
        f = random_formula(rng, ("p", "q"), depth=2, max_count=2, size=5)
        nf = normalize(f)
        v = brute_force(to_formula(nf), {FC.TR}, 3)
        if v.is_sat:
            A, w = v.model
            assert is_transitive(A)
            assert check(A, w, f)
            checked += 1
    assert checked > 50


def _equisat(frames, seed, rounds):
    rng = random.Random(seed)
    for _ in range(rounds):
        f = random_formula(rng, ("p", "q"), depth=2, max_count=2, size=5)
        g = to_formula(normalize(f))
        for k in (1, 2, 3):
            assert brute_force(f, frames, k).is_sat == brute_force(g, frames, k).is_sat, (fm.render(f), k)


def test_bounded_equisatisfiable_transitive():
    _equisat({FC.TR}, 5, 150)


def test_bounded_equisatisfiable_reflexive_transitive():
    _equisat({FC.RFL, FC.TR}, 6, 100)
