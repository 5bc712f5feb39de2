"""Small systems shared by the test modules."""

from decdiag.ars import Ars, CommArs
from decdiag.decreasing import LabelledArs

E_ID = Ars(1, [])
E_AB = Ars(2, [(0, 1)])
E_PEAK = Ars(3, [(0, 1), (0, 2)])
E_DIA = Ars(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
E_CYC2 = Ars(2, [(0, 1), (1, 0)])

# Peak c <-1 a ->0 b; the b side takes one 1-step then a 0-step to d.
# a=0, b=1, c=2, d=3, b1=4
MIDDLE_TILE = LabelledArs(5, 2, [(0, 1, 0), (0, 2, 1), (1, 4, 1), (4, 3, 0), (2, 3, 0)])

# Example labelling figure: road m0..m5 (0..5), side nodes n0..n7 (6..13).
M = {f"m{i}": i for i in range(6)}
N = {f"n{i}": 6 + i for i in range(8)}
NAMES = {**M, **N}
_EXAMPLE_EDGES = [
    ("m0", "m1", 0), ("m1", "m2", 0), ("m2", "m3", 0), ("m3", "m4", 0), ("m4", "m5", 0),
    ("m2", "n0", 1), ("n0", "n1", 0), ("n1", "n2", 1), ("n2", "n3", 0), ("n3", "m5", 0),
    ("n1", "n4", 1), ("n4", "n5", 0), ("n5", "n6", 1), ("n6", "m0", 0),
    ("n1", "n5", 0), ("n5", "m1", 0), ("n4", "n6", 1),
    ("n2", "n7", 1), ("n3", "n7", 1), ("n7", "m4", 0), ("m2", "m5", 1),
]
EXAMPLE_LABELLED = LabelledArs(14, 2, [(NAMES[s], NAMES[d], lab) for s, d, lab in _EXAMPLE_EDGES])
EXAMPLE = EXAMPLE_LABELLED.unlabelled
EXAMPLE_ROAD = tuple(range(6))

SPLIT = CommArs(3, [(0, 1)], [(0, 2)])
