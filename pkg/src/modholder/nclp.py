"""Non-commutative L_p machinery for a Gibbs state in standard form.

Two families of norms live here:

* the KMS p-norm of a positive element, an analytically continued p-fold
  correlation ``omega(Delta^{1/p} A ... Delta^{1/p} A)^{1/p}``;
* the Araki-Masuda norm of a Hilbert-space vector, a sup (p >= 2) or inf
  (1 <= p < 2) of ``||Delta_{xi,Omega}^{1/2 - 1/p} zeta||`` over unit vectors
  ``xi``.  It is estimated by multi-start projected gradient on the unit
  sphere of the Hilbert-Schmidt space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadExponent, BudgetViolation, ExponentMismatch, ImaginaryResidue, OddP, SupportRequired
from .records import VerificationRecord
from .spectral import (
    SUPPORT_CUTOFF,
    TOL_PSD,
    as_matrix,
    check_psd_values,
    dag,
    eig_hermitian,
    hs_norm,
    op_norm,
    polar_parts,
    support_projection,
)
from .standard_form import (
    TOL_MODULAR,
    GibbsEnsemble,
    StateFunctional,
    embed,
    heisenberg,
    modular_power_apply,
    relative_modular_power_apply,
)

__all__ = [
    "OptConfig",
    "NormEstimate",
    "kms_norm",
    "kms_norm_analytic",
    "am_norm",
    "opt_tolerance",
    "support_projection",
    "polar_parts",
    "cone_vector",
    "phi_from_cone_vector",
    "lemma41_check",
    "chain_identity_check",
    "lemma42_check",
    "lp_holder_contraction_check",
]

IMAG_TOL = 1e-9


@dataclass(frozen=True)
class OptConfig:
    restarts: int = 64
    max_iters: int = 500
    step_init: float = 1.0
    grad_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")


@dataclass(frozen=True)
class NormEstimate:
    value: float
    converged: bool
    best_xi: np.ndarray
    bound_kind: str  # "lower" (sup estimate), "upper" (inf estimate) or "exact"
    best_restart: int = 0


def opt_tolerance(dim: int) -> float:
    """Relative acceptance slack for optimized Araki-Masuda estimates."""
    return 0.02 if dim <= 3 else 0.05


def _require_psd(a) -> np.ndarray:
    a = as_matrix(a)
    check_psd_values(eig_hermitian(a).values, TOL_PSD)
    return a


def _require_operand(a, p) -> np.ndarray:
    """PSD for odd ``p``; any Hermitian ``A`` for even ``p``, where ``B^p`` stays positive."""
    if float(p).is_integer() and int(p) % 2 == 0:
        eig_hermitian(a)
        return as_matrix(a)
    return _require_psd(a)


def _real(value: complex, what: str, tol: float = IMAG_TOL) -> float:
    value = complex(value)
    if abs(value.imag) > tol * max(abs(value), np.finfo(float).tiny):
        raise ImaginaryResidue(f"{what}: imaginary part {value.imag:.3e} of {value:.6e}")
    return value.real


def _kms_chain(ens: GibbsEnsemble, a: np.ndarray, p: int) -> complex:
    v = ens.omega_vec
    for _ in range(p):
        v = modular_power_apply(ens, 1.0 / p, a @ v)
    return complex(np.vdot(ens.omega_vec, v))


def kms_norm(ens: GibbsEnsemble, a, p: int) -> float:
    """KMS p-norm ``omega(Delta^{1/p} A ... Delta^{1/p} A)^{1/p}`` with p factors of ``A``.

    ``A`` must be PSD; for even ``p`` a Hermitian ``A`` is also accepted.
    """
    a = _require_operand(a, p)
    if p < 1 or int(p) != p:
        raise BadExponent(f"p must be a positive integer, got {p}")
    p = int(p)
    value = _real(_kms_chain(ens, a, p), "kms_norm", tol=1e-10)
    return max(value, 0.0) ** (1.0 / p)


def kms_norm_analytic(ens: GibbsEnsemble, a, p: int, literal_trailing_factor: bool = False):
    """KMS p-norm through imaginary-time translates of ``A``.

    Evaluates ``omega(tau_{i beta/2p}(A) tau_{3i beta/2p}(A) ... tau_{(2p-1) i beta/2p}(A))^{1/p}``.

    With ``literal_trailing_factor`` an extra ``tau_{i beta}(A)`` is appended and
    the raw complex correlation (no root) is returned; this (p+1)-factor
    product is a diagnostic only and is not a norm.
    """
    a = _require_operand(a, p)
    if p < 1 or int(p) != p:
        raise BadExponent(f"p must be a positive integer, got {p}")
    p = int(p)
    prod = np.eye(ens.dim, dtype=complex)
    for k in range(1, p + 1):
        prod = prod @ heisenberg(ens, 1j * ens.beta * (2 * k - 1) / (2 * p), a)
    if literal_trailing_factor:
        return ens.expect(prod @ heisenberg(ens, 1j * ens.beta, a))
    value = _real(ens.expect(prod), "kms_norm_analytic")
    return max(value, 0.0) ** (1.0 / p)


# --- Araki-Masuda norms -----------------------------------------------------


def _batched_dag(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


class _PowerTraceObjective:
    """``f(xi) = Tr(C (xi xi^*)^a)`` with the power taken on the support of ``xi xi^*``."""

    def __init__(self, c: np.ndarray, a: float, proj: np.ndarray | None):
        self.c = c
        self.a = a
        self.proj = proj

    def _spectrum(self, xi):
        sigma = xi @ _batched_dag(xi)
        sigma = 0.5 * (sigma + _batched_dag(sigma))
        lam, u = np.linalg.eigh(sigma)
        lam_max = np.maximum(lam[..., -1:], np.finfo(float).tiny)
        on = lam > SUPPORT_CUTOFF * lam_max
        return lam, u, on, lam_max

    def value(self, xi):
        lam, u, on, _ = self._spectrum(xi)
        ct = _batched_dag(u) @ self.c @ u
        diag = np.real(np.diagonal(ct, axis1=-2, axis2=-1))
        pw = np.where(on, np.where(on, lam, 1.0) ** self.a, 0.0)
        return np.sum(pw * diag, axis=-1)

    def value_and_grad(self, xi):
        lam, u, on, lam_max = self._spectrum(xi)
        a = self.a
        ct = _batched_dag(u) @ self.c @ u
        diag = np.real(np.diagonal(ct, axis1=-2, axis2=-1))
        f = np.sum(np.where(on, np.where(on, lam, 1.0) ** a, 0.0) * diag, axis=-1)
        # divided differences of t -> t^a, eigenvalues floored at the cutoff
        le = np.maximum(lam, SUPPORT_CUTOFF * lam_max)
        li = le[..., :, None]
        lj = le[..., None, :]
        diff = li - lj
        close = np.abs(diff) <= 1e-9 * np.maximum(li, lj)
        mid = 0.5 * (li + lj)
        gamma = np.where(close, a * mid ** (a - 1.0), (li**a - lj**a) / np.where(close, 1.0, diff))
        g = u @ (gamma * ct) @ _batched_dag(u)
        egrad = 2.0 * g @ xi
        if self.proj is not None:
            egrad = self.proj @ egrad
        radial = np.real(np.sum(np.conj(xi) * egrad, axis=(-2, -1)))
        rgrad = egrad - radial[:, None, None] * xi
        return f, rgrad


def _normalize(xi):
    return xi / np.linalg.norm(xi, axis=(-2, -1), keepdims=True)


def _initial_points(dim: int, cfg: OptConfig, proj: np.ndarray | None) -> np.ndarray:
    pts = np.empty((cfg.restarts, dim, dim), dtype=complex)
    for k in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, k])
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        pts[k] = g if proj is None else proj @ g
    return _normalize(pts)


def _sphere_search(obj: _PowerTraceObjective, xi: np.ndarray, sign: float, cfg: OptConfig):
    """Projected gradient with backtracking on each restart independently.

    ``sign = +1`` maximizes, ``-1`` minimizes.  Every restart follows its own
    trajectory, so adding restarts never changes the existing ones.
    """
    r = xi.shape[0]
    f, grad = obj.value_and_grad(xi)
    step = np.full(r, float(cfg.step_init))
    active = np.ones(r, dtype=bool)
    converged = np.zeros(r, dtype=bool)
    for _ in range(cfg.max_iters):
        gnorm = np.linalg.norm(grad, axis=(-2, -1))
        done = active & (gnorm <= cfg.grad_tol * np.maximum(np.abs(f), 1.0))
        converged |= done
        active &= ~done
        if not active.any():
            break
        idx = np.flatnonzero(active)
        pending = idx
        for _halving in range(60):
            cand = _normalize(xi[pending] + sign * step[pending, None, None] * grad[pending])
            fc = obj.value(cand)
            ok = sign * (fc - f[pending]) > 0
            acc = pending[ok]
            xi[acc] = cand[ok]
            step[pending[~ok]] *= 0.5
            pending = pending[~ok]
            if pending.size == 0:
                break
        if pending.size:
            # no ascent direction left at working precision
            converged[pending] = True
            active[pending] = False
        moved = np.setdiff1d(idx, pending)
        if moved.size:
            f[moved], grad[moved] = obj.value_and_grad(xi[moved])
            step[moved] *= 2.0
    return f, converged


def am_norm(
    ens: GibbsEnsemble,
    zeta,
    p: float,
    cfg: OptConfig | None = None,
    support: np.ndarray | None = None,
) -> NormEstimate:
    """Araki-Masuda L_p norm of the vector ``zeta``.

    For ``p >= 2`` the norm is ``sup ||Delta_{xi,Omega}^{1/2-1/p} zeta||`` over unit
    ``xi``; the returned value is the best restart and a lower bound.  For
    ``1 <= p < 2`` it is the inf over unit ``xi`` whose left support dominates
    that of ``zeta``; the returned value is an upper bound.  Rank-deficient
    ``zeta`` with ``p < 2`` needs ``support``, a projection containing the left
    support of ``zeta``, to which every ``xi`` is confined.

    The relative modular power of the vector state ``xi xi^*`` gives
    ``||Delta_{xi,Omega}^s zeta||^2 = Tr(C (xi xi^*)^{2s})`` with
    ``C = zeta rho^{-2s} zeta^*``, which is what is optimized.
    """
    if not p >= 1:
        raise BadExponent(f"p must be >= 1, got {p}")
    cfg = cfg or OptConfig()
    zeta = as_matrix(zeta)
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    s = 0.5 - inv_p
    if s == 0.0:
        return NormEstimate(hs_norm(zeta), True, ens.omega_vec.copy(), "exact")
    proj = None
    if s < 0:
        left = support_projection(zeta)
        if support is None:
            if np.linalg.matrix_rank(left, tol=0.5) < ens.dim:
                raise SupportRequired("p < 2 on a rank-deficient vector needs an explicit support projection")
        else:
            proj = as_matrix(support)
            if hs_norm(proj @ left - left) > 1e-9 * max(1.0, hs_norm(left)):
                raise SupportRequired("support projection does not contain the left support of zeta")
    c = zeta @ ens.rho_power(-2.0 * s) @ dag(zeta)
    c = 0.5 * (c + dag(c))
    obj = _PowerTraceObjective(c, 2.0 * s, proj)
    xi0 = _initial_points(ens.dim, cfg, proj)
    sign = 1.0 if s > 0 else -1.0
    xi = xi0.copy()
    f, conv = _sphere_search(obj, xi, sign, cfg)
    # argmax/argmin return the lowest index among ties
    best = int(np.argmax(f) if s > 0 else np.argmin(f))
    value = float(np.sqrt(max(f[best], 0.0)))
    return NormEstimate(value, bool(conv[best]), xi[best], "lower" if s > 0 else "upper", best)


# --- Cone vectors and the functionals they determine ------------------------


def cone_vector(ens: GibbsEnsemble, a, p: float) -> np.ndarray:
    """``Delta^{1/2p} A Omega``."""
    return modular_power_apply(ens, 0.5 / p, embed(ens, as_matrix(a)))


def phi_from_cone_vector(ens: GibbsEnsemble, a, p: int) -> StateFunctional:
    """The functional with ``Delta_{phi,Omega}^{1/p} Omega = Delta^{1/2p} A Omega``.

    Its density is ``(rho^{1/2p} A rho^{1/2p})^p``.  For even ``p`` a Hermitian
    ``A`` is accepted and the density is still positive, though the cone
    identity then holds with ``|B|`` in place of ``B``.
    """
    if p < 2:
        raise BadExponent(f"need 1/p <= 1/2, got p = {p}")
    a = _require_operand(a, p)
    r = ens.rho_power(0.5 / p)
    b = r @ a @ r
    dec = eig_hermitian(0.5 * (b + dag(b)))
    return StateFunctional.from_spectrum(np.abs(dec.values) ** p, dec.basis)


def lemma41_check(ens: GibbsEnsemble, a, p: int, tol: float = TOL_MODULAR) -> VerificationRecord:
    """Cone-vector identity and round-trip uniqueness for ``phi_from_cone_vector``.

    Residual (a): ``Delta_{phi,Omega}^{1/p} Omega`` against ``Delta^{1/2p} A Omega``.
    Residual (b): rebuilding the density as ``(zeta rho^{1/p - 1/2})^p`` from the
    cone vector ``zeta``.
    """
    _require_psd(a)
    phi = phi_from_cone_vector(ens, a, p)
    zeta = cone_vector(ens, a, p)
    lhs = relative_modular_power_apply(ens, phi, 1.0 / p, ens.omega_vec)
    res_a = hs_norm(lhs - zeta) / max(1.0, hs_norm(zeta))
    rebuilt = np.linalg.matrix_power(zeta @ ens.rho_power(1.0 / p - 0.5), int(p))
    res_b = hs_norm(rebuilt - phi.density) / max(1.0, hs_norm(phi.density))
    return VerificationRecord.residual(
        "lemma41",
        max(res_a, res_b),
        tol,
        dim=ens.dim,
        beta=ens.beta,
        p=[int(p)],
        residual_cone=res_a,
        residual_roundtrip=res_b,
        phi_total=phi.total(),
    )


def chain_identity_check(
    ens: GibbsEnsemble, a_list: Sequence[np.ndarray], p_list: Sequence[int], tol: float = TOL_MODULAR
) -> VerificationRecord:
    """Product of relative modular powers on ``Omega`` against the interleaved modular chain.

    Left: ``Delta_{phi_n}^{1/p_n} ... Delta_{phi_1}^{1/p_1} Omega``.
    Right: ``Delta^{1/2p_n} A_n Delta^{1/2p_n} ... Delta^{1/2p_1} A_1 Omega``.
    Requires ``sum 1/p_j = 1/2``.
    """
    if len(a_list) != len(p_list) or not a_list:
        raise ValueError("a_list and p_list must be nonempty and of equal length")
    budget = sum(1.0 / p for p in p_list)
    if abs(budget - 0.5) > 1e-12:
        raise BudgetViolation(f"sum of 1/p_j is {budget}, expected 1/2")
    if any(p < 2 for p in p_list):
        raise BadExponent("every p_j must be >= 2")
    left = ens.omega_vec
    right = ens.omega_vec
    for a, p in zip(a_list, p_list):
        phi = phi_from_cone_vector(ens, a, p)
        left = relative_modular_power_apply(ens, phi, 1.0 / p, left)
        right = modular_power_apply(ens, 0.5 / p, a @ modular_power_apply(ens, 0.5 / p, right))
    scale = max(1.0, hs_norm(right))
    return VerificationRecord.residual(
        "chain",
        hs_norm(left - right) / scale,
        tol,
        dim=ens.dim,
        beta=ens.beta,
        n=len(a_list),
        p=[int(p) for p in p_list],
    )


def lemma42_check(
    ens: GibbsEnsemble, a, p: int, cfg: OptConfig | None = None, tol: float = 1e-9
) -> VerificationRecord:
    """Three-way agreement for even ``p``.

    (a) ``phi(1)^{1/p}`` of the functional built from the cone vector,
    (b) ``omega(A Delta^{1/p} A ... Delta^{1/p} A)^{1/p}`` through the
    multi-insertion correlation, (c) the optimized Araki-Masuda norm of
    ``Delta^{1/2p} A Omega``.  (a) and (b) must agree to ``tol`` relative,
    (c) and (a) to the optimization slack.
    """
    from .holder import InsertionTuple, multi_correlation

    if p < 2 or p % 2:
        raise OddP(f"p must be an even integer >= 2, got {p}")
    a = _require_operand(a, p)
    val_a = phi_from_cone_vector(ens, a, p).total() ** (1.0 / p)
    corr = multi_correlation(ens, [a] * p, InsertionTuple([1.0 / p] * (p - 1)))
    val_b = max(_real(corr, "lemma42 correlation"), 0.0) ** (1.0 / p)
    est = am_norm(ens, cone_vector(ens, a, p), p, cfg)
    val_c = est.value
    scale = max(val_a, np.finfo(float).tiny)
    slack = opt_tolerance(ens.dim)
    ratio = max(abs(val_a - val_b) / (tol * scale), abs(val_c - val_a) / (slack * scale))
    return VerificationRecord.residual(
        "lemma42",
        ratio,
        1.0,
        dim=ens.dim,
        beta=ens.beta,
        p=[int(p)],
        phi_root=val_a,
        correlation_root=val_b,
        am_estimate=val_c,
        am_converged=est.converged,
        op_norm=op_norm(a),
    )


def lp_holder_contraction_check(
    ens: GibbsEnsemble,
    x,
    a_list: Sequence[np.ndarray],
    p_list: Sequence[int],
    cfg: OptConfig | None = None,
    r: float | None = None,
) -> list[VerificationRecord]:
    """Contraction ``||x zeta||_p <= ||x|| ||zeta||_p`` and vector Hoelder for cone vectors.

    ``zeta_j = Delta^{1/2p_j} A_j Omega``.  The product of ``zeta_1`` and
    ``zeta_2`` is the chain ``Delta^{1/2p_2} A_2 Delta^{1/2p_2} Delta^{1/2p_1} A_1 Omega``,
    an element of L_r with ``1/r = 1/p_1 + 1/p_2``.  Left-hand sides are sup
    estimates (lower bounds); right-hand sides are also lower bounds, so the
    comparison allows ``rhs / (1 - slack)``.
    """
    if len(a_list) != 2 or len(p_list) != 2:
        raise ValueError("need exactly two cone vectors")
    p1, p2 = p_list
    inv_r = 1.0 / p1 + 1.0 / p2
    if r is not None and abs(1.0 / r - inv_r) > 1e-12:
        raise ExponentMismatch(f"1/{p1} + 1/{p2} != 1/{r}")
    if inv_r > 0.5 + 1e-12:
        raise ExponentMismatch("1/p_1 + 1/p_2 must not exceed 1/2 for the sup representation")
    r_val = np.inf if inv_r == 0 else 1.0 / inv_r
    x = as_matrix(x)
    a1, a2 = (_require_psd(a) for a in a_list)
    slack = opt_tolerance(ens.dim)
    meta = dict(dim=ens.dim, beta=ens.beta, p=[int(p1), int(p2)], slack=slack)

    zeta1 = cone_vector(ens, a1, p1)
    n_xz = am_norm(ens, x @ zeta1, p1, cfg).value
    n_z = am_norm(ens, zeta1, p1, cfg).value
    contraction = VerificationRecord.inequality(
        "lp_contraction", n_xz, op_norm(x) * n_z / (1.0 - slack), **meta
    )

    prod = modular_power_apply(ens, 0.5 / p2, a2 @ modular_power_apply(ens, 0.5 / p2, zeta1))
    n_prod = am_norm(ens, prod, r_val, cfg).value
    n1 = n_z
    n2 = am_norm(ens, cone_vector(ens, a2, p2), p2, cfg).value
    holder = VerificationRecord.inequality("lp_holder", n_prod, n1 * n2 / (1.0 - slack), r=r_val, **meta)
    return [contraction, holder]
