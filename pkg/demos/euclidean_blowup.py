"""Counting stays symbolic over Euclidean frames.

dia>=N p is decided through the one-variable counting translation, whose
solution is a profile of type counts.  Worlds are only created when the
model is written out, so N = 16 yields 16 worlds and N = 1024 is still fast.
"""

import time

from gmlsat import FrameClass, check, decide, parse

for n in (2, 4, 10):
    f = parse(f"dia>={2**n} p")
    start = time.perf_counter()
    v = decide(f, {FrameClass.EUCL})
    elapsed = time.perf_counter() - start
    A, w = v.model
    print(f"dia>={2**n} p: {v}, {len(A.worlds)} worlds, {elapsed:.2f}s, checks={check(A, w, f)}")

# Sym and Tr together also put the class on the counting path
v = decide(parse("dia>=3 p & dia<=2 p"), {FrameClass.SYM, FrameClass.TR})
print("dia>=3 p & dia<=2 p over Sym+Tr:", v)
