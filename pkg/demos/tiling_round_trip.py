"""From a tiling problem to a formula and back.

A 2x2 tiling instance is turned into a formula.  The canonical grid model
satisfies the structural part, colouring its grid cells with a valid tiling
gives a model of the whole formula, and the tiling can be read off again.
"""

from gmlsat import check
from gmlsat import formula as fm
from gmlsat import tiling as T

system = T.TilingSystem(("a", "b"), {("a", "b"), ("b", "a")}, {("a", "a"), ("b", "b")})
inst = T.TilingInstance(system, 1, ("a", "b"))
f = T.reduction(inst)
print("formula size:", fm.size(f), "largest subscript:", max(fm.subscripts(f)))

base = T.canonical_model(1)
print("canonical model:", len(base.structure.worlds), "worlds")
print("structural part holds:", check(base.structure, base.world, T.gamma(1)))

grid = T.find_tiling(inst)
print("tiling found by search:", grid.cells)
P = T.expand_with_tiling(base, grid, system)
print("coloured model satisfies the formula:", check(P.structure, P.world, f))
back = T.decode_tiling(P, 1, system)
print("decoded:", back.cells, "valid:", T.check_tiling(system, back, inst.initial))

# a colouring that breaks the horizontal rule
bad = T.TilingGrid((("a", "a"), ("a", "a")))
Q = T.expand_with_tiling(base, bad, system)
print("invalid colouring satisfies the formula:", check(Q.structure, Q.world, f))
