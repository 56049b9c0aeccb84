"""Acceptance gate: one group of tests per criterion.

The conftest summary prints a PASS/FAIL line for every criterion at the end
of the run.
"""

import itertools
import json
import random
import time

import numpy as np
import pytest

from gmlsat import cli
from gmlsat import formula as fm
from gmlsat import search
from gmlsat import tiling as T
from gmlsat.kripke import ALL_CLASSES, FrameClass as FC
from gmlsat.kripke import KripkeStructure, PointedStructure, check, frame_properties, generated, metrics, strict_successors
from gmlsat.minimize import minimize
from gmlsat.normal_form import expand, normalize, to_formula
from gmlsat.oracle import brute_force, first_valuations, tree_frames
from gmlsat.solver import SolverOptions, decide, decide_transitive, is_euclidean_type, model_size_bound

from helpers import random_formula

INTRO = fm.parse("q0 & dia>=2 (~q0 & q1 & dia>=1 (~q0 & ~q1)) & dia<=1 ~q1")
ALL_SUBSETS = [frozenset(c) for r in range(6) for c in itertools.combinations(ALL_CLASSES, r)]


def _shares_strict_successor(A):
    S = strict_successors(A)
    n = len(A.worlds)
    return any((S[a] & S[b]).any() for a in range(n) for b in range(a + 1, n))


def _tree_model(f, max_size):
    """First model of ``f`` on a transitive tree frame, or None."""
    names = sorted(fm.letters(f))
    for k, rels in tree_frames(max_size):
        found = first_valuations(f, np.array(rels), names)
        for i in np.flatnonzero(found >= 0):
            bits = int(found[i])
            worlds = [f"w{j}" for j in range(k)]
            val = {p: [worlds[w] for w in range(k) if bits >> (w * len(names) + t) & 1] for t, p in enumerate(names)}
            return PointedStructure(KripkeStructure(worlds, rels[i], val), "w0")
    return None


# -- criterion 1 --------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_intro_formula_sat_with_shared_successor():
    start = time.perf_counter()
    v = decide_transitive(INTRO, {FC.TR}, SolverOptions(cap=8))
    assert time.perf_counter() - start < 60
    assert v.is_sat
    A, w = v.model
    assert check(A, w, INTRO)
    assert FC.TR in frame_properties(A)
    assert _shares_strict_successor(A)


@pytest.mark.criterion(1)
def test_intro_formula_model_on_a_chain():
    # a four-world transitive chain already satisfies the formula
    A = KripkeStructure.from_edges(
        ["w0", "w1", "w2", "w3"],
        [(a, b) for a, b in itertools.combinations(["w0", "w1", "w2", "w3"], 2)],
        {"q0": ["w0"], "q1": ["w1", "w2"]},
    )
    assert FC.TR in frame_properties(A)
    assert check(A, "w0", INTRO)


@pytest.mark.criterion(1)
@pytest.mark.xfail(
    strict=True,
    reason="unattainable: the transitive closure of the chain w0<w1<w2<w3 with "
    "q0={w0}, q1={w1,w2} is a tree-shaped model of the formula",
)
def test_intro_formula_has_no_tree_model():
    start = time.perf_counter()
    P = _tree_model(INTRO, 6)
    assert time.perf_counter() - start < 60
    if P is not None:
        assert check(P.structure, P.world, INTRO)
    assert P is None, f"tree model found: {sorted(P.structure.edges)} {P.structure.valuation}"


# -- criterion 2 --------------------------------------------------------------------


@pytest.mark.criterion(2)
@pytest.mark.parametrize("frames", [F for F in ALL_SUBSETS if FC.EUCL in F], ids=lambda F: ",".join(sorted(c.value for c in F)))
def test_sixteen_successors_need_sixteen_worlds(frames):
    f = fm.parse("dia>=16 p")
    v = decide(f, frames)
    assert v.is_sat
    A, w = v.model
    assert check(A, w, f)
    assert len(A.worlds) >= 16
    assert frames <= frame_properties(A)


@pytest.mark.criterion(2)
def test_large_count_stays_fast():
    start = time.perf_counter()
    v = decide(fm.parse(f"dia>={2**10} p"), {FC.EUCL})
    elapsed = time.perf_counter() - start
    assert v.is_sat
    assert elapsed < 5
    assert len(v.model.structure.worlds) >= 2**10


# -- criterion 3 --------------------------------------------------------------------


def _transitive_bound(f, frames):
    g = f
    if FC.SER in frames and FC.RFL not in frames:
        g = fm.And(f, fm.boxdot(fm.dia(fm.TRUE)))
    return model_size_bound(normalize(g))


@pytest.mark.criterion(3)
def test_oracle_agreement():
    rng = random.Random(2024)
    cap = 4
    start = time.perf_counter()
    discrepancies = []
    tally = {"sat": 0, "unsat": 0, "unknown": 0}
    for _ in range(520):
        f = random_formula(rng, ("p", "q", "r"), depth=2, max_count=2, size=7)
        assert fm.modal_depth(f) <= 2 and max(fm.subscripts(f), default=0) <= 2
        for frames in ALL_SUBSETS:
            v = decide(f, frames, SolverOptions(cap=cap))
            o = brute_force(f, frames, 4)
            tally[v.status] += 1
            if v.is_sat:
                A, w = v.model
                if not (check(A, w, f) and frames <= frame_properties(A)):
                    discrepancies.append(("bad model", fm.render(f), frames))
            if v.is_unsat and o.is_sat:
                discrepancies.append(("unsat but oracle sat", fm.render(f), frames))
            if is_euclidean_type(frames):
                if v.is_unknown or (o.is_sat and not v.is_sat):
                    discrepancies.append(("euclidean path", fm.render(f), frames))
            elif FC.TR in frames:
                if o.is_sat and v.is_unknown and cap >= _transitive_bound(f, frames):
                    discrepancies.append(("unknown at the bound", fm.render(f), frames))
            # all searches are complete up to the cap, which is the oracle's size
            if o.is_sat and not v.is_sat:
                discrepancies.append(("missed a small model", fm.render(f), frames))
    assert time.perf_counter() - start < 600
    assert not discrepancies, discrepancies[:10]
    assert tally["sat"] > 1000 and tally["unsat"] > 100


# -- criterion 4 --------------------------------------------------------------------


@pytest.mark.criterion(4)
def test_minimize_bounds_on_oracle_models():
    rng = random.Random(4)
    pairs = 0
    reflexive = 0
    violations = []
    for attempt in range(2000):
        if pairs >= 150:
            break
        f = random_formula(rng, ("p", "q"), depth=2, max_count=2, size=7)
        frames = {FC.RFL, FC.TR} if attempt % 2 else {FC.TR}
        o = brute_force(f, frames, 4)
        if not o.is_sat:
            continue
        pairs += 1
        nf = normalize(f)
        P = expand(o.model, nf)
        out = minimize(P, nf)
        B = out.structure
        m = metrics(B)
        C = nf.lower_sum()
        ok = (
            check(B, out.world, to_formula(nf))
            and check(B, out.world, f)
            and m.depth <= 2 * nf.ell
            and m.breadth <= C
            and m.width <= C + 1
            and len(B.worlds) <= model_size_bound(nf)
            and FC.TR in frame_properties(B)
        )
        if FC.RFL in frame_properties(generated(P.structure, [P.world])):
            reflexive += 1
            ok = ok and FC.RFL in frame_properties(B)
        if not ok:
            violations.append(fm.render(f))
    assert pairs >= 100
    assert reflexive >= 30
    assert not violations, violations[:10]


# -- criterion 5 --------------------------------------------------------------------


@pytest.mark.criterion(5)
@pytest.mark.parametrize("n", [1, 2])
def test_canonical_model_satisfies_gamma(n):
    start = time.perf_counter()
    A, w0 = T.canonical_model(n)
    assert {FC.RFL, FC.TR} <= frame_properties(A)
    assert check(A, w0, T.gamma(n))
    assert time.perf_counter() - start < 60


# -- criterion 6 --------------------------------------------------------------------


def _systems():
    for colours in (("a",), ("a", "b")):
        pairs = list(itertools.product(colours, repeat=2))
        subsets = [set(c) for r in range(len(pairs) + 1) for c in itertools.combinations(pairs, r)]
        for H in subsets:
            for V in subsets:
                yield T.TilingSystem(colours, H, V)


def _instances():
    for system in _systems():
        for length in range(3):
            for initial in itertools.product(system.colours, repeat=length):
                yield T.TilingInstance(system, 1, initial)


def test_instance_count():
    assert sum(1 for _ in _instances()) == 4 * 3 + 256 * 7


@pytest.mark.criterion(6)
def test_tiling_round_trip():
    base = T.canonical_model(1)
    assert {FC.RFL, FC.TR} <= frame_properties(base.structure)
    expanded = {}
    discrepancies = []
    count = 0
    for inst in _instances():
        count += 1
        system = inst.system
        exists = T.find_tiling(inst) is not None
        f = T.reduction(inst)
        witnessed = False
        for grid in T.all_grids(system, 2):
            key = (system, grid)
            if key not in expanded:
                expanded[key] = T.expand_with_tiling(base, grid, system)
            P = expanded[key]
            sat = check(P.structure, P.world, f)
            if sat != T.check_tiling(system, grid, inst.initial):
                discrepancies.append(("grid", T.instance_to_json(inst), grid.cells))
            if sat:
                witnessed = True
                decoded = T.decode_tiling(P, 1, system)
                if decoded != grid or not T.check_tiling(system, decoded, inst.initial):
                    discrepancies.append(("decode", T.instance_to_json(inst), grid.cells))
        if witnessed != exists:
            discrepancies.append(("existence", T.instance_to_json(inst)))
    assert count == 1804
    assert not discrepancies, discrepancies[:5]


# -- criterion 7 --------------------------------------------------------------------


def _generated_instances():
    yield from _instances()
    rng = random.Random(7)
    colours = ("a", "b", "c")
    pairs = list(itertools.product(colours, repeat=2))
    for n in (2, 3, 4):
        for _ in range(5):
            system = T.TilingSystem(colours, {p for p in pairs if rng.random() < 0.5}, {p for p in pairs if rng.random() < 0.5})
            initial = tuple(rng.choice(colours) for _ in range(rng.randint(0, 2**n)))
            yield T.TilingInstance(system, n, initial)


@pytest.mark.criterion(7)
def test_tiling_gen_subscripts(tmp_path, capsys):
    path = tmp_path / "t.json"
    bad = []
    count = 0
    seen_gamma = set()
    for inst in _generated_instances():
        path.write_text(json.dumps(T.instance_to_json(inst)))
        parts = ["full"] if inst.n in seen_gamma else ["full", "gamma"]
        seen_gamma.add(inst.n)
        for part in parts:
            assert cli.run(["tiling-gen", "--tiling", str(path), "--part", part]) == 0
            text = capsys.readouterr().out
            g = fm.parse(text)
            count += 1
            if not set(fm.subscripts(g)) <= {0, 1}:
                bad.append(T.instance_to_json(inst))
    assert count >= 1804
    assert not bad, bad[:3]


# -- criterion 8 --------------------------------------------------------------------


def _sat_on_transitive(g, k):
    """Whether ``g`` has a transitive model with at most ``k`` worlds."""
    if len(fm.letters(g)) * k <= 24:
        return brute_force(g, {FC.TR}, k).is_sat
    root, local, rules = search.hintikka_problem(g)
    return search.find_model(root, local, rules, {FC.TR}, fm.letters(g), k) is not None


@pytest.mark.criterion(8)
def test_normal_form_bounded_equisatisfiable():
    rng = random.Random(8)
    discrepancies = []
    for _ in range(220):
        f = random_formula(rng, ("p", "q", "r"), depth=2, max_count=2, size=6)
        g = to_formula(normalize(f))
        for k in (1, 2, 3):
            if brute_force(f, {FC.TR}, k).is_sat != _sat_on_transitive(g, k):
                discrepancies.append((fm.render(f), k))
    assert not discrepancies, discrepancies[:10]
