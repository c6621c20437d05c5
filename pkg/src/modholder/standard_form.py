"""GNS standard form of a Gibbs state on the full matrix algebra.

The Hilbert space is the space of d x d matrices with ``<x, y> = Tr(x^* y)``.
The algebra acts by left multiplication, its commutant by right
multiplication, and the cyclic separating vector is ``Omega = rho^{1/2}``.
With this identification

* the modular operator is ``Delta^z xi = rho^z xi rho^{-z}``,
* the modular conjugation is ``J xi = xi^*``,
* the Liouvillean is ``L xi = H xi - xi H`` so that ``Delta = exp(-beta L)``,
* the relative modular operator of a functional with density ``phi`` is
  ``Delta_{phi,Omega}^z xi = phi^z xi rho^{-z}``.

Nothing here ever builds a d^2 x d^2 superoperator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimMismatch, EmptySample, FaithfulnessViolated, NotPSD, SingularNegativePower
from .records import VerificationRecord
from .spectral import (
    SUPPORT_CUTOFF,
    SpectralDecomposition,
    TOL_PSD,
    as_matrix,
    check_psd_values,
    dag,
    eig_hermitian,
    hs_inner,
    hs_norm,
    op_norm,
    power_from_spectrum,
    require_hermitian,
)

FAITHFULNESS_FLOOR = 1e-13
TOL_MODULAR = 1e-9
TOL_KMS = 1e-9


@dataclass(frozen=True)
class StateFunctional:
    """Positive functional ``X -> Tr(density X)``; need not be normalized or faithful."""

    density: np.ndarray
    _spec: SpectralDecomposition = field(init=False, repr=False, compare=False)
    _cutoff: float = field(init=False, repr=False, compare=False, default=SUPPORT_CUTOFF)

    def __post_init__(self):
        density = require_hermitian(self.density)
        dec = eig_hermitian(density)
        check_psd_values(dec.values, TOL_PSD)
        object.__setattr__(self, "density", density)
        object.__setattr__(self, "_spec", dec)

    @classmethod
    def from_spectrum(cls, values, basis) -> "StateFunctional":
        """Functional with exactly known eigenvalues and eigenbasis.

        Powers use the given spectrum and only drop exact zeros, so eigenvalues
        far below the dense-matrix noise floor keep their meaning.
        """
        values = np.asarray(values, dtype=float)
        if values.size and values.min() < 0:
            raise NotPSD("negative eigenvalue in a functional spectrum")
        basis = np.asarray(basis, dtype=complex)
        order = np.argsort(values)
        dec = SpectralDecomposition(values[order], basis[:, order])
        obj = cls.__new__(cls)
        object.__setattr__(obj, "density", dec.reconstruct())
        object.__setattr__(obj, "_spec", dec)
        object.__setattr__(obj, "_cutoff", 0.0)
        return obj

    @classmethod
    def vector_state(cls, xi) -> "StateFunctional":
        xi = as_matrix(xi)
        return cls(xi @ dag(xi))

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    def __call__(self, x) -> complex:
        return complex(np.trace(self.density @ np.asarray(x)))

    def total(self) -> float:
        """``phi(1)``."""
        return float(np.trace(self.density).real)

    def power(self, z: complex, support: bool = False) -> np.ndarray:
        return power_from_spectrum(self._spec, z, support=support, cutoff=self._cutoff)

    def is_faithful(self) -> bool:
        v = self._spec.values
        return bool(v.max() > 0 and v.min() > self._cutoff * v.max() and v.min() > 0)


@dataclass(frozen=True)
class GibbsEnsemble:
    """Gibbs state ``rho = exp(-beta H) / Z`` in standard form.

    Immutable; ``rho``, ``omega_vec`` and the shared eigenbasis of ``H`` and
    ``rho`` are computed once at construction.
    """

    hamiltonian: np.ndarray
    beta: float
    rho: np.ndarray
    omega_vec: np.ndarray
    log_partition: float
    energies: np.ndarray
    basis: np.ndarray
    rho_values: np.ndarray
    seed: int | None = None

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def rho_power(self, z: complex) -> np.ndarray:
        return (self.basis * np.exp(complex(z) * np.log(self.rho_values))) @ dag(self.basis)

    def state(self) -> StateFunctional:
        return StateFunctional(self.rho)

    def expect(self, a) -> complex:
        return complex(np.trace(self.rho @ a))

    def to_dict(self) -> dict:
        h = self.hamiltonian.reshape(-1)
        out = {
            "dim": self.dim,
            "beta": self.beta,
            "hamiltonian": [[float(c.real), float(c.imag)] for c in h],
        }
        if self.seed is not None:
            out["seed"] = int(self.seed)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "GibbsEnsemble":
        dim = int(d["dim"])
        h = np.array([complex(re, im) for re, im in d["hamiltonian"]]).reshape(dim, dim)
        return make_gibbs(h, float(d["beta"]), seed=d.get("seed"))

    def fingerprint(self) -> str:
        import hashlib

        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def make_gibbs(h, beta: float, seed: int | None = None) -> GibbsEnsemble:
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    h = require_hermitian(h)
    dec = eig_hermitian(h)
    x = -beta * dec.values
    shift = x.max()
    weights = np.exp(x - shift)
    total = weights.sum()
    rho_values = weights / total
    if rho_values.min() < FAITHFULNESS_FLOOR:
        raise FaithfulnessViolated(
            f"smallest Gibbs weight {rho_values.min():.3e} below floor {FAITHFULNESS_FLOOR:.0e}"
        )
    basis = dec.basis
    rho = (basis * rho_values) @ dag(basis)
    omega = (basis * np.sqrt(rho_values)) @ dag(basis)
    return GibbsEnsemble(
        hamiltonian=h,
        beta=float(beta),
        rho=rho,
        omega_vec=omega,
        log_partition=float(shift + np.log(total)),
        energies=dec.values,
        basis=basis,
        rho_values=rho_values,
        seed=seed,
    )


def _check_dim(ens: GibbsEnsemble, *mats) -> None:
    for m in mats:
        if np.shape(m) != (ens.dim, ens.dim):
            raise DimMismatch(f"expected ({ens.dim}, {ens.dim}), got {np.shape(m)}")


def embed(ens: GibbsEnsemble, a) -> np.ndarray:
    """The GNS vector ``A Omega``."""
    _check_dim(ens, a)
    return np.asarray(a) @ ens.omega_vec


def modular_power_apply(ens: GibbsEnsemble, z: complex, xi) -> np.ndarray:
    _check_dim(ens, xi)
    return ens.rho_power(z) @ xi @ ens.rho_power(-z)


def relative_modular_power_apply(
    ens: GibbsEnsemble, phi: StateFunctional, z: complex, xi, support: bool = False
) -> np.ndarray:
    """``Delta_{phi,Omega}^z xi = phi^z xi rho^{-z}`` with ``phi^z`` on its support."""
    _check_dim(ens, xi, phi.density)
    return phi.power(z, support=support) @ xi @ ens.rho_power(-z)


def modular_conjugation_apply(xi) -> np.ndarray:
    return dag(np.asarray(xi))


def heisenberg(ens: GibbsEnsemble, z: complex, a) -> np.ndarray:
    """``exp(izH) A exp(-izH)`` for complex ``z``, computed in the energy eigenbasis."""
    _check_dim(ens, a)
    v = ens.basis
    e = ens.energies
    phase = np.exp(1j * complex(z) * (e[:, None] - e[None, :]))
    return v @ ((dag(v) @ a @ v) * phase) @ dag(v)


def kms_function(ens: GibbsEnsemble, a, b, z: complex) -> complex:
    """``F_{A,B}(z) = omega(A tau_z(B))``."""
    _check_dim(ens, a)
    return ens.expect(np.asarray(a) @ heisenberg(ens, z, b))


def kms_boundary_check(ens: GibbsEnsemble, a, b, t: float, tol: float = TOL_KMS) -> VerificationRecord:
    upper = kms_function(ens, a, b, t + 1j * ens.beta)
    swapped = ens.expect(heisenberg(ens, t, b) @ a)
    scale = max(1.0, op_norm(a) * op_norm(b))
    return VerificationRecord.residual(
        "kms", abs(upper - swapped), tol * scale, dim=ens.dim, beta=ens.beta, t=t
    )


def cone_membership(ens: GibbsEnsemble, xi, alpha: float, tol: float = TOL_PSD) -> tuple[bool, float]:
    """Membership of ``xi`` in ``P^alpha = closure{Delta^alpha A Omega : A >= 0}``.

    ``xi = rho^alpha A rho^{1/2 - alpha}`` so membership is positivity of
    ``rho^{-alpha} xi rho^{alpha - 1/2}``.
    """
    if not 0.0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    _check_dim(ens, xi)
    a = ens.rho_power(-alpha) @ xi @ ens.rho_power(alpha - 0.5)
    herm = 0.5 * (a + dag(a))
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    hermitian = np.linalg.norm(a - dag(a)) <= tol * scale
    return bool(hermitian and min_eig >= -tol * scale), min_eig


def tomita_check(
    ens: GibbsEnsemble, sample_ops: Sequence[np.ndarray], tol: float = TOL_MODULAR
) -> VerificationRecord:
    """Modular identities and standard-form axioms on sample operators.

    Residuals (each normalized by the size of what is compared):

    * ``tomita``: ``J Delta^{1/2} A Omega = A^* Omega``
    * ``involution``: ``J J xi = xi``
    * ``j_omega`` / ``delta_omega``: ``J Omega = Omega``, ``Delta Omega = Omega``
    * ``commutant``: ``J A^* J`` acts as right multiplication by ``A`` and commutes with ``B``
    * ``center``: ``J c J = c^*`` for scalars
    * ``cone``: ``A J A J`` keeps ``P^{1/4}`` in ``P^{1/4}`` and ``J`` fixes it
    """
    if len(sample_ops) == 0:
        raise EmptySample("tomita_check needs at least one sample operator")
    ops = [as_matrix(a) for a in sample_ops]
    _check_dim(ens, *ops)
    omega = ens.omega_vec
    res = dict.fromkeys(
        ["tomita", "involution", "j_omega", "delta_omega", "commutant", "center", "cone"], 0.0
    )

    def rel(x, ref):
        return hs_norm(x) / max(1.0, hs_norm(ref))

    j = modular_conjugation_apply
    res["j_omega"] = rel(j(omega) - omega, omega)
    res["delta_omega"] = rel(modular_power_apply(ens, 1.0, omega) - omega, omega)
    c = 0.3 - 1.7j
    for a in ops:
        a_om = embed(ens, a)
        lhs = j(modular_power_apply(ens, 0.5, a_om))
        res["tomita"] = max(res["tomita"], rel(lhs - embed(ens, dag(a)), a_om))
        res["involution"] = max(res["involution"], rel(j(j(a_om)) - a_om, a_om))
        res["center"] = max(res["center"], rel(j(c * j(a_om)) - np.conj(c) * a_om, a_om))
        positive = dag(a) @ a
        eta = modular_power_apply(ens, 0.25, embed(ens, positive))
        mapped = a @ j(a @ j(eta))
        pulled = ens.rho_power(-0.25) @ mapped @ ens.rho_power(-0.25)
        scale = max(1.0, hs_norm(pulled))
        min_eig = float(np.linalg.eigvalsh(0.5 * (pulled + dag(pulled)))[0])
        res["cone"] = max(res["cone"], max(0.0, -min_eig) / scale, hs_norm(pulled - dag(pulled)) / scale)
        res["cone"] = max(res["cone"], rel(j(eta) - eta, eta))
        for b in ops:
            xi = embed(ens, b)
            jaj = lambda v: j(dag(a) @ j(v))  # noqa: E731
            res["commutant"] = max(
                res["commutant"],
                rel(jaj(xi) - xi @ a, xi),
                rel(jaj(b @ xi) - b @ jaj(xi), b @ xi),
            )
    worst = max(res.values())
    return VerificationRecord.residual(
        "tomita", worst, tol, dim=ens.dim, beta=ens.beta, residuals=res, samples=len(ops)
    )


def formal_adjoint_check(
    ens: GibbsEnsemble,
    x_list: Sequence[np.ndarray],
    phi_list: Sequence[StateFunctional],
    z: Sequence[complex],
    sample_xi: Sequence[np.ndarray],
    tol: float = TOL_MODULAR,
) -> VerificationRecord:
    """Adjoint of ``X_0 Delta_{phi_1}^{z_1} X_1 ... Delta_{phi_n}^{z_n} X_n``.

    The claimed adjoint is ``X_n^* Delta_{phi_n}^{conj z_n} ... Delta_{phi_1}^{conj z_1} X_0^*``;
    the residual is ``|<T^dag eta, xi> - <eta, T xi>|`` over sample pairs.
    """
    z = list(getattr(z, "z", z))
    n = len(z)
    if len(x_list) != n + 1 or len(phi_list) != n:
        raise ValueError("need n+1 operators and n functionals for n exponents")
    for zj, phi in zip(z, phi_list):
        if complex(zj).real < 0 and not phi.is_faithful():
            raise SingularNegativePower("negative power of a non-faithful functional")

    def t_apply(xi):
        v = x_list[n] @ xi
        for j in range(n, 0, -1):
            v = x_list[j - 1] @ relative_modular_power_apply(ens, phi_list[j - 1], z[j - 1], v)
        return v

    def t_adj_apply(eta):
        v = dag(x_list[0]) @ eta
        for j in range(1, n + 1):
            v = dag(x_list[j]) @ relative_modular_power_apply(ens, phi_list[j - 1], np.conj(z[j - 1]), v)
        return v

    worst = 0.0
    for xi in sample_xi:
        for eta in sample_xi:
            a = hs_inner(t_adj_apply(eta), xi)
            b = hs_inner(eta, t_apply(xi))
            scale = max(1.0, abs(a), abs(b))
            worst = max(worst, abs(a - b) / scale)
    return VerificationRecord.residual(
        "formal_adjoint", worst, tol, dim=ens.dim, beta=ens.beta, n=n, z=[complex(v) for v in z]
    )
