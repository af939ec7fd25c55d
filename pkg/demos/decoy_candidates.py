"""Look inside the yield bounds.

Y11, Y02 and Y20 are each bounded by a small family of expressions, one per
way of assigning the three decoy intensities to the roles in the bound.
Every member is a valid upper bound, so the tightest one wins.  This script
prints the family for one record, then checks soundness on a synthetic
experiment whose true yields are known.

    python demos/decoy_candidates.py [fixture]
"""

import math
import sys

import numpy as np

from tfqkd import load_fixture
from tfqkd.analysis import assignment_table
from tfqkd.decoy_bounds import GainsTable, IntensityTriple, Outcome, yield_bounds

name = sys.argv[1] if len(sys.argv) > 1 else "38dB"
print(assignment_table(load_fixture(name)))

# synthetic experiment: draw yields, build gains from the Poisson model
rng = np.random.default_rng(3)
N = 12
y = rng.uniform(0, 0.5, size=(N + 1, N + 1, 2))
s = IntensityTriple(0.1, 0.02, 0.001)
vals = [s.mu, s.nu, s.omega]
pois = np.array([[math.exp(-x) * x**n / math.factorial(n) for n in range(N + 1)] for x in vals])
q = np.einsum("an,bm,nmo->abo", pois, pois, y)
gains = GainsTable(q)

print("synthetic experiment, true yield vs upper bound")
for o in Outcome:
    b = yield_bounds(gains, s, o)
    for label, (n, m) in (("y00", (0, 0)), ("y11", (1, 1)), ("y02", (0, 2)), ("y20", (2, 0))):
        print(f"  {o.value} {label}: true {y[n, m, o.index]:.5f}  bound {getattr(b, label):.5f}")
