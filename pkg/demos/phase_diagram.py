"""Walk through the phase diagram of the four-vertex example.

    python demos/phase_diagram.py
"""

import math

import numpy as np

from kgkms import fixtures
from kgkms.classifier import phase_report
from kgkms.kms import kms1_dominant_state, preferred_dynamics, simplex

s = fixtures.skeleton("four_vertex")
dyn = preferred_dynamics(s)
print("vertices:", s.vertices)
print("dynamics r =", np.round(dyn.r, 6), "(ln 8, ln 12)")

rep = phase_report(s)
print(f"beta_c = {rep.beta_c:.12f}, ln6/ln12 = {math.log(6) / math.log(12):.12f}")
for reg in rep.regimes:
    print(f"  {reg.description}")
    for st in reg.states:
        print(f"    beta={st.beta:.6f}  m={np.round(st.m, 6)}")

dom = kms1_dominant_state(s, [3], dyn)
print("dominant KMS_1 state:", np.round(dom.m * 24, 9), "/ 24")

for beta in (1.5, 3.0):
    sx = simplex(s, dyn, beta)
    print(f"beta={beta}: {len(sx.extreme_m)} extreme points")
    for m in sx.extreme_m:
        print("   ", np.round(m, 6))
