import json

import numpy as np
import pytest

from modholder.errors import DimMismatch, EmptySample, FaithfulnessViolated, NotHermitian, NotPSD
from modholder.standard_form import (
    GibbsEnsemble,
    StateFunctional,
    cone_membership,
    embed,
    formal_adjoint_check,
    heisenberg,
    kms_boundary_check,
    kms_function,
    make_gibbs,
    modular_conjugation_apply,
    modular_power_apply,
    relative_modular_power_apply,
    tomita_check,
)

from conftest import E12, LN2, SIGMA_X, random_ensemble, random_hermitian, random_matrix, random_psd


def test_gibbs_two_level(two_level):
    np.testing.assert_allclose(two_level.rho, np.diag([2 / 3, 1 / 3]), atol=1e-15)
    np.testing.assert_allclose(two_level.omega_vec, np.diag(np.sqrt([2 / 3, 1 / 3])), atol=1e-15)
    assert two_level.log_partition == pytest.approx(np.log(1.5), abs=1e-15)


def test_gibbs_tracial(tracial):
    np.testing.assert_allclose(tracial.rho, np.eye(2) / 2, atol=1e-15)


def test_gibbs_large_beta_stable():
    ens = make_gibbs(np.diag([0.0, 0.5, 1.0]), 25.0)
    assert np.isfinite(ens.log_partition)
    assert ens.rho_values.min() > 0
    with pytest.raises(FaithfulnessViolated):
        make_gibbs(np.diag([0.0, 1.0]), 40.0)


def test_gibbs_rejects_bad_input():
    with pytest.raises(NotHermitian):
        make_gibbs(E12, 1.0)
    with pytest.raises(ValueError):
        make_gibbs(np.eye(2), 0.0)


def test_gibbs_invariants(rng):
    for _ in range(200):
        d = int(rng.integers(1, 9))
        ens = random_ensemble(rng, d)
        assert np.trace(ens.rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(ens.rho).min() > 0
        # oracle: rho = exp(-beta H) / Z via the eigenbasis of H directly
        e, v = np.linalg.eigh(ens.hamiltonian)
        w = np.exp(-ens.beta * (e - e.min()))
        ref = (v * (w / w.sum())) @ v.conj().T
        assert np.linalg.norm(ens.rho - ref) <= 1e-12
        assert np.linalg.norm(ens.omega_vec @ ens.omega_vec - ens.rho) <= 1e-12
        h = ens.hamiltonian
        assert np.linalg.norm(ens.rho @ h - h @ ens.rho) <= 1e-11 * max(1.0, np.linalg.norm(h))


def test_gibbs_serialization_roundtrip(rng):
    ens = random_ensemble(rng, 4)
    back = GibbsEnsemble.from_dict(json.loads(ens.to_json()))
    assert back.fingerprint() == ens.fingerprint()
    np.testing.assert_array_equal(back.rho, ens.rho)


def test_state_functional_basic():
    phi = StateFunctional(np.diag([0.5, 0.0]))
    assert not phi.is_faithful()
    assert phi.total() == pytest.approx(0.5)
    assert phi(SIGMA_X) == 0
    with pytest.raises(NotPSD):
        StateFunctional(np.diag([1.0, -0.5]))
    vs = StateFunctional.vector_state(E12)
    np.testing.assert_allclose(vs.density, np.diag([1.0, 0.0]))


def test_modular_worked_examples(two_level):
    np.testing.assert_allclose(modular_power_apply(two_level, 1, E12), 2 * E12, atol=1e-15)
    np.testing.assert_allclose(modular_power_apply(two_level, 1j, E12), np.exp(1j * LN2) * E12, atol=1e-15)
    np.testing.assert_allclose(modular_conjugation_apply(E12), E12.T, atol=0)


def test_modular_group_law(rng):
    for _ in range(100):
        d = int(rng.integers(2, 7))
        ens = random_ensemble(rng, d)
        xi = random_matrix(rng, d)
        s, t = rng.uniform(-2, 2, 2)
        lhs = modular_power_apply(ens, 1j * s, modular_power_apply(ens, 1j * t, xi))
        assert np.linalg.norm(lhs - modular_power_apply(ens, 1j * (s + t), xi)) <= 1e-11
        assert np.linalg.norm(modular_power_apply(ens, 1j * t, xi)) == pytest.approx(np.linalg.norm(xi), rel=1e-11)
        np.testing.assert_allclose(modular_power_apply(ens, 0.7, ens.omega_vec), ens.omega_vec, atol=1e-12)


def test_relative_modular_reduces_to_modular(rng):
    ens = random_ensemble(rng, 4)
    xi = random_matrix(rng, 4)
    a = relative_modular_power_apply(ens, ens.state(), 0.3 + 0.2j, xi)
    np.testing.assert_allclose(a, modular_power_apply(ens, 0.3 + 0.2j, xi), atol=1e-12)


def test_relative_modular_intertwines(rng):
    # Delta_{phi,Omega}^{it} A Omega = sigma^phi_t(A) Delta_{phi,Omega}^{it} Omega
    ens = random_ensemble(rng, 3)
    phi = StateFunctional(random_psd(rng, 3))
    a = random_matrix(rng, 3)
    t = 0.8
    lhs = relative_modular_power_apply(ens, phi, 1j * t, embed(ens, a))
    sig = phi.power(1j * t) @ a @ phi.power(-1j * t)
    rhs = sig @ relative_modular_power_apply(ens, phi, 1j * t, ens.omega_vec)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_dim_mismatch(two_level):
    with pytest.raises(DimMismatch):
        embed(two_level, np.eye(3))


def test_heisenberg_group_and_identity(rng):
    ens = random_ensemble(rng, 4)
    a = random_matrix(rng, 4)
    np.testing.assert_allclose(heisenberg(ens, 0.0, a), a, atol=1e-14)
    lhs = heisenberg(ens, 0.4, heisenberg(ens, 1.1, a))
    np.testing.assert_allclose(lhs, heisenberg(ens, 1.5, a), atol=1e-12)
    # oracle: direct matrix exponential of the Hamiltonian
    e, v = np.linalg.eigh(ens.hamiltonian)
    u = (v * np.exp(0.9j * e)) @ v.conj().T
    np.testing.assert_allclose(heisenberg(ens, 0.9, a), u @ a @ u.conj().T, atol=1e-12)


def test_kms_function_is_entire(rng):
    # Cauchy-Riemann by complex-step finite differences in the strip
    ens = random_ensemble(rng, 3)
    a, b = random_matrix(rng, 3), random_matrix(rng, 3)
    z, h = 0.3 + 0.4j * ens.beta, 1e-5
    dx = (kms_function(ens, a, b, z + h) - kms_function(ens, a, b, z - h)) / (2 * h)
    dy = (kms_function(ens, a, b, z + 1j * h) - kms_function(ens, a, b, z - 1j * h)) / (2 * h)
    assert abs(dy - 1j * dx) <= 1e-6 * max(1.0, abs(dx))


def test_kms_boundary_random(rng):
    for _ in range(200):
        d = int(rng.integers(2, 8))
        ens = random_ensemble(rng, d)
        rec = kms_boundary_check(ens, random_matrix(rng, d), random_matrix(rng, d), float(rng.uniform(-5, 5)))
        assert rec.passed, rec


def test_kms_fails_at_wrong_temperature(rng):
    ens = random_ensemble(rng, 3, beta=2.0)
    other = make_gibbs(ens.hamiltonian, 1.0)
    a, b = random_matrix(rng, 3), random_matrix(rng, 3)
    upper = kms_function(other, a, b, 0.2 + 2.0j)
    swapped = other.expect(heisenberg(other, 0.2, b) @ a)
    assert abs(upper - swapped) > 1e-6


def test_cone_membership(two_level, rng):
    ens = random_ensemble(rng, 3)
    a = random_psd(rng, 3)
    for alpha in (0.0, 0.1, 0.25, 0.5):
        xi = ens.rho_power(alpha) @ a @ ens.rho_power(0.5 - alpha)
        assert cone_membership(ens, xi, alpha)[0]
    assert cone_membership(two_level, np.eye(2), 0.25)[0]
    assert not cone_membership(two_level, np.diag([1.0, -1.0]), 0.25)[0]
    with pytest.raises(ValueError):
        cone_membership(two_level, np.eye(2), 0.7)


def test_cone_self_dual(rng):
    ens = random_ensemble(rng, 4)
    for _ in range(20):
        x = ens.rho_power(0.25) @ random_psd(rng, 4) @ ens.rho_power(0.25)
        y = ens.rho_power(0.25) @ random_psd(rng, 4) @ ens.rho_power(0.25)
        assert np.vdot(x, y).real >= 0


def test_tomita_random(rng):
    for _ in range(100):
        d = int(rng.integers(2, 9))
        ens = random_ensemble(rng, d)
        rec = tomita_check(ens, [random_matrix(rng, d) for _ in range(3)])
        assert rec.passed, rec.meta


def test_tomita_empty(two_level):
    with pytest.raises(EmptySample):
        tomita_check(two_level, [])


def test_formal_adjoint(rng):
    ens = random_ensemble(rng, 3)
    xs = [random_matrix(rng, 3) for _ in range(3)]
    phis = [StateFunctional(random_psd(rng, 3)) for _ in range(2)]
    rec = formal_adjoint_check(ens, xs, phis, [0.2 + 0.5j, 0.1 - 0.3j], [random_matrix(rng, 3) for _ in range(3)])
    assert rec.passed, rec
