"""
Where the exponent rule breaks
==============================

With one insertion the rule always picks ``p_0 = p_1 = 2``, and the bound
reads ``|Tr(A_1 rho^z A_0 rho^{1-z})| <= ||A_0||_2 ||A_1||_2``.  At ``z = 1/2``
this is Cauchy-Schwarz.  Far from ``1/2`` it fails once ``rho`` is strongly
non-tracial.
"""

import numpy as np

import modholder as mh

u = np.array([1.0, 0.3]) / np.hypot(1.0, 0.3)
v = u[::-1].copy()
a0, a1 = np.outer(u, u), np.outer(v, v)

# sweep the contrast of a two-level Gibbs state
for gap in (0.5, 2.0, 5.0, 9.0):
    ens = mh.make_gibbs(np.diag([0.0, gap]), 1.0)
    for z in (0.5, 0.75, 1.0):
        rec = mh.holder_check(ens, [a0, a1], [z])
        print(f"gap {gap:4.1f} z {z:.2f}: lhs {abs(rec.lhs):.4f} rhs {rec.rhs:.4f} pass {rec.passed}")

# two insertions in a tracial state: the rule gives p = (2, 2, 2), whose
# reciprocals sum to 3/2
tracial = mh.make_gibbs(np.zeros((2, 2)), 1.0)
p = np.diag([1.0, 0.0])
rec = mh.holder_check(tracial, [p, p, p], [0.5, 0.5])
print(f"tracial projector: lhs {abs(rec.lhs):.4f} rhs {rec.rhs:.4f} p {rec.meta['p']}")
