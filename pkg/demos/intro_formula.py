"""A formula that needs two worlds sharing a successor.

Over transitive frames, q0 & dia>=2 (~q0 & q1 & dia>=1 (~q0 & ~q1)) & dia<=1 ~q1
asks for two q1-successors that each see a world where q0 and q1 fail,
while the root has at most one such world in view.  The search finds a
model where both q1-worlds point at the same world.
"""

from gmlsat import FrameClass, SolverOptions, check, decide, parse
from gmlsat.kripke import strict_successors

phi = parse("q0 & dia>=2 (~q0 & q1 & dia>=1 (~q0 & ~q1)) & dia<=1 ~q1")
verdict = decide(phi, {FrameClass.TR}, SolverOptions(cap=8))
print("verdict:", verdict)

A, root = verdict.model
print("worlds:", ", ".join(A.worlds))
for p, worlds in sorted(A.valuation.items()):
    print(f"  {p} holds at {sorted(worlds)}")
print("edges:", sorted(A.edges))
print("model checks:", check(A, root, phi))

S = strict_successors(A)
for a in range(len(A.worlds)):
    for b in range(a + 1, len(A.worlds)):
        shared = [A.worlds[c] for c in range(len(A.worlds)) if S[a, c] and S[b, c]]
        if shared:
            print(f"{A.worlds[a]} and {A.worlds[b]} share {shared}")
