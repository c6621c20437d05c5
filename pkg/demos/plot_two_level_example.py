"""
A two-level Gibbs state by hand
===============================

Everything in the standard form of a qubit at ``rho = diag(2/3, 1/3)``,
checked against numbers small enough to work out by hand.
"""

import numpy as np

import modholder as mh

# H = diag(0, ln 2) at beta = 1 gives Boltzmann weights 1 and 1/2
ens = mh.make_gibbs(np.diag([0.0, np.log(2.0)]), 1.0)
print("rho =\n", ens.rho.real)

sx = np.array([[0, 1], [1, 0]], dtype=complex)
e12 = np.array([[0, 1], [0, 0]], dtype=complex)

# the modular operator scales the off-diagonal unit by rho_1 / rho_2 = 2
print("Delta E12 =\n", mh.modular_power_apply(ens, 1.0, e12).real)

# KMS: F(t + i beta) equals omega(tau_t(B) A)
t = 0.7
upper = mh.kms_function(ens, sx, sx, t + 1j * ens.beta)
swapped = ens.expect(mh.heisenberg(ens, t, sx) @ sx)
print("KMS boundary residual:", abs(upper - swapped))

# the KMS 2-norm of sigma_x: Tr(rho^{1/2} sx rho^{1/2} sx) = 2 sqrt(2)/3
print("||sigma_x||_2 =", mh.kms_norm(ens, sx, 2), "expected", (2 * np.sqrt(2) / 3) ** 0.5)

# the functional behind the cone vector is a multiple of the identity here
phi = mh.phi_from_cone_vector(ens, sx, 2)
print("phi density =\n", phi.density.real)

# n = 1, z = 1/2 saturates the bound
rec = mh.holder_check(ens, [sx, sx], [0.5], diagnostic=True)
print(f"lhs {abs(rec.lhs):.15f}  rhs {rec.rhs:.15f}")
