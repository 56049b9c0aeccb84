"""Normal form, guard letters and model minimization.

A formula is rewritten into a guarded normal form, an existing model is
expanded with the guard letters, and the four minimization stages cut it
down to the bounded shape the transitive search relies on.
"""

import numpy as np

from gmlsat import KripkeStructure, PointedStructure, check, normalize, parse, to_formula
from gmlsat.kripke import metrics
from gmlsat.minimize import StageTrace, minimize
from gmlsat.normal_form import expand, strip
from gmlsat.solver import model_size_bound

f = parse("dia>=2 (p & dia>=1 q) & box (q -> dia<=1 p)")
nf = normalize(f)
print("input:", f)
print("eta:", nf.eta)
print("theta:", nf.theta)
for c in nf.lowers:
    print(f"  {c.guard} -> dia>={c.count} {c.body}")
for c in nf.uppers:
    print(f"  {c.guard} -> dia<={c.count} {c.body}")
print("size bound for transitive models:", model_size_bound(nf))

# a root with three p-children, each seeing its own reflexive q-clique of size
# three; everything is closed under reflexivity and transitivity
worlds = ["r"] + [f"c{i}" for i in range(3)] + [f"d{i}{j}" for i in range(3) for j in range(3)]
n = len(worlds)
R = np.eye(n, dtype=bool)
R[0, 1:] = True
for i in range(3):
    for j in range(3):
        R[1 + i, 4 + 3 * i + j] = True
        R[4 + 3 * i + j, 4 + 3 * i: 7 + 3 * i] = True
A = KripkeStructure(worlds, R, {"p": worlds[1:4], "q": worlds[4:]})
print("structure satisfies the input:", check(A, "r", f))

P = expand(PointedStructure(A, "r"), nf)
trace = StageTrace()
out = minimize(P, nf, trace)
print("before:", metrics(P.structure))
print("after: ", metrics(out.structure))
print("still a model:", check(out.structure, out.world, to_formula(nf)))
small = strip(out, nf.fresh)
print("guards removed, input holds:", check(small.structure, small.world, f))
