"""
Estimating Araki-Masuda norms
=============================

The L_p norm of a vector is a sup over unit vectors ``xi``.  For the
cone vector ``Delta^{1/2p} A Omega`` the answer is known in closed form, which
makes it a good test of the optimizer.
"""

import numpy as np

import modholder as mh
from modholder.harness import gen_hamiltonian, gen_positive

rng = np.random.default_rng(0)
h = gen_hamiltonian("gue", 4, 1)
h /= np.ptp(np.linalg.eigvalsh(h))
ens = mh.make_gibbs(h, 3.0)
a = gen_positive(4, 2, conditioning=50.0)

# phi(1)^{1/p} from the functional attached to the cone vector
for p in (2, 4, 8):
    target = mh.phi_from_cone_vector(ens, a, p).total() ** (1 / p)
    est = mh.am_norm(ens, mh.cone_vector(ens, a, p), p, mh.OptConfig(restarts=32))
    print(f"p = {p}: estimate {est.value:.10f} ({est.bound_kind}), closed form {target:.10f}")

# more restarts can only raise a sup estimate
zeta = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / 4
for r in (1, 4, 16, 64):
    print(f"restarts {r:3d}: {mh.am_norm(ens, zeta, 6.0, mh.OptConfig(restarts=r)).value:.12f}")

# below p = 2 the norm is an inf and the estimate is an upper bound
est = mh.am_norm(ens, zeta, 1.5, mh.OptConfig(restarts=32))
print(f"p = 1.5: {est.value:.10f} ({est.bound_kind})")
