"""Check the gap projections and the KMS condition on concrete 2-graphs.

    python demos/path_checks.py
"""

import math

import numpy as np

from kgkms import fixtures
from kgkms import path2
from kgkms.kms import kms1_dominant_state

R = (math.log(8), math.log(12))

g = fixtures.concrete("uvw")
print(f"uvw graph: {len(g.edges)} edges, {len(g.theta)} squares")
for v in range(g.n):
    E = g.edges_at(v, path2.BLUE) + g.edges_at(v, path2.RED)
    if not E:
        continue
    for u in range(g.n):
        eps = np.eye(g.n)[u]
        val = path2.gap_projection_value(g, eps, 1.0, R, v, E)
        print(f"  v={g.vertices[v]} eps at {g.vertices[u]}: inclusion-exclusion {val.inclusion_exclusion:.12f}"
              f"  direct {val.direct:.12f}  tail {val.tail:.1e}")

g1 = fixtures.concrete("four_vertex")
m = kms1_dominant_state(fixtures.skeleton("four_vertex"), [3]).m
rep = path2.kms_spot_check(g1, m, 1.0, R, samples=200, seed=1)
print("dominant state:", rep.to_dict())
bad = m.copy()
bad[0] -= 0.05
bad[3] += 0.05
print("perturbed state:", path2.kms_spot_check(g1, bad, 1.0, R, samples=200, seed=1).to_dict())
