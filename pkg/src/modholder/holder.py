"""Executable inequality checks for multi-insertion KMS correlations.

``multi_correlation`` evaluates ``omega(A_n Delta^{z_n} ... A_1 Delta^{z_1} A_0)``;
``holder_check`` compares it with the product of KMS norms chosen by
``exponent_rule``.  ``araki_bound_check`` handles the relative modular
version with split exponents and ``finite_trace_holder_check`` the plain
trace inequalities for density matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BudgetViolation,
    InconsistentEvaluation,
    InvalidSplit,
    SingularState,
    ZeroRealPart,
)
from .nclp import kms_norm
from .records import TOL_INEQ, VerificationRecord
from .spectral import (
    SUPPORT_CUTOFF,
    TOL_PSD,
    as_matrix,
    check_psd_values,
    dag,
    eig_hermitian,
    fractional_power,
    hs_norm,
    op_norm,
)
from .standard_form import GibbsEnsemble, StateFunctional, relative_modular_power_apply

TOL_BUDGET = 1e-12
TOL_PATHS = 1e-10


@dataclass(frozen=True)
class InsertionTuple:
    """Complex exponents ``(z_1, ..., z_n)`` with ``Re z_j >= 0`` and ``sum Re z_j <= alpha``."""

    z: tuple
    alpha: float = 1.0

    def __init__(self, z: Sequence[complex], alpha: float = 1.0):
        zs = tuple(complex(v) for v in z)
        if any(v.real < 0 for v in zs):
            raise ValueError("real parts must be nonnegative")
        if sum(v.real for v in zs) > alpha + TOL_BUDGET:
            raise BudgetViolation(f"sum of real parts {sum(v.real for v in zs)} exceeds {alpha}")
        object.__setattr__(self, "z", zs)
        object.__setattr__(self, "alpha", float(alpha))

    def __len__(self) -> int:
        return len(self.z)

    def __iter__(self):
        return iter(self.z)

    def __getitem__(self, i):
        return self.z[i]

    @property
    def re_sum(self) -> float:
        return sum(v.real for v in self.z)

    @property
    def z0(self) -> float:
        """``1 - sum Re z_j``."""
        return 1.0 - self.re_sum


@dataclass(frozen=True)
class SplitSpec:
    """Split ``z_m = z_prime + z_dprime`` of one exponent (``m`` is 1-based)."""

    m: int
    z_prime: complex
    z_dprime: complex

    def validate(self, z: InsertionTuple, tol: float = TOL_BUDGET) -> None:
        n = len(z)
        if not 1 <= self.m <= n:
            raise InvalidSplit(f"m = {self.m} outside 1..{n}")
        zm = z[self.m - 1]
        if not (self.z_prime.real > 0 and self.z_dprime.real > 0):
            raise InvalidSplit("both split parts need positive real part")
        if abs(self.z_prime + self.z_dprime - zm) > tol * max(1.0, abs(zm)):
            raise InvalidSplit("z_prime + z_dprime != z_m")
        before = sum(v.real for v in z.z[: self.m - 1]) + self.z_dprime.real
        after = sum(v.real for v in z.z[self.m :]) + self.z_prime.real
        if before > 0.5 + tol:
            raise InvalidSplit(f"leading real parts plus z_dprime sum to {before} > 1/2")
        if after > 0.5 + tol:
            raise InvalidSplit(f"trailing real parts plus z_prime sum to {after} > 1/2")


def _smallest_even(bound: float) -> int:
    """Smallest even ``p >= 2`` with ``1/p <= bound``."""
    p = max(2, 2 * math.ceil(1.0 / (2.0 * bound)))
    while p > 2 and 1.0 / (p - 2) <= bound:
        p -= 2
    while 1.0 / p > bound:
        p += 2
    return p


def exponent_rule(z: InsertionTuple | Sequence[complex]) -> list[int]:
    """Even exponents ``p_0..p_n`` with ``1/p_j <= min(Re z_{j+1}, Re z_j)``.

    Boundary convention ``z_0 = z_1`` and ``z_{n+1} = z_n``.
    """
    re = [complex(v).real for v in z]
    if not re:
        raise ValueError("need at least one insertion")
    if any(r <= 0 for r in re):
        raise ZeroRealPart("no even exponent satisfies 1/p <= 0")
    ext = [re[0]] + re + [re[-1]]
    return [_smallest_even(min(ext[j], ext[j + 1])) for j in range(len(re) + 1)]


def _correlation_trace(ens: GibbsEnsemble, a_list, z) -> complex:
    m = a_list[0]
    for j, zj in enumerate(z):
        m = a_list[j + 1] @ ens.rho_power(zj) @ m
    return complex(np.trace(m @ ens.rho_power(1.0 - sum(z))))


def _correlation_nested(ens: GibbsEnsemble, a_list, z) -> complex:
    v = a_list[0] @ ens.omega_vec
    for j, zj in enumerate(z):
        v = a_list[j + 1] @ (ens.rho_power(zj) @ v @ ens.rho_power(-zj))
    return complex(np.vdot(ens.omega_vec, v))


def multi_correlation(ens: GibbsEnsemble, a_list: Sequence[np.ndarray], z: InsertionTuple, return_paths: bool = False):
    """``<Omega, A_n Delta^{z_n}( ... A_1 Delta^{z_1}(A_0 Omega))>``.

    Cross-checked against the single trace
    ``Tr(A_n rho^{z_n} ... A_1 rho^{z_1} A_0 rho^{1 - sum z_j})``; the two must
    agree to ``1e-10`` relative to ``prod ||A_j||``.
    """
    if not isinstance(z, InsertionTuple):
        z = InsertionTuple(z)
    if z.re_sum > 1.0 + TOL_BUDGET:
        raise BudgetViolation(f"sum of real parts {z.re_sum} exceeds 1")
    if len(a_list) != len(z) + 1:
        raise ValueError(f"need {len(z) + 1} operators for {len(z)} insertions")
    mats = [as_matrix(a) for a in a_list]
    nested = _correlation_nested(ens, mats, z.z)
    traced = _correlation_trace(ens, mats, z.z)
    scale = max(float(np.prod([op_norm(a) for a in mats])), np.finfo(float).tiny)
    gap = abs(nested - traced) / scale
    if gap > TOL_PATHS:
        raise InconsistentEvaluation(f"nested and trace evaluations differ by {gap:.3e} (relative)")
    if return_paths:
        return nested, traced
    return nested


def holder_check(
    ens: GibbsEnsemble,
    a_list: Sequence[np.ndarray],
    z: InsertionTuple,
    diagnostic: bool = False,
    tol: float = TOL_INEQ,
) -> VerificationRecord:
    """``|omega(A_n Delta^{z_n} ... A_1 Delta^{z_1} A_0)| <= prod_j ||A_j||_{p_j}``.

    Each ``A_j`` must be PSD.  ``diagnostic=True`` drops that requirement and
    uses ``|...|^{1/p}`` for the norms; the record is then informational.
    """
    if not isinstance(z, InsertionTuple):
        z = InsertionTuple(z)
    ps = exponent_rule(z)
    mats = [as_matrix(a) for a in a_list]
    if not diagnostic:
        for a in mats:
            check_psd_values(eig_hermitian(a).values, TOL_PSD)
    nested, traced = multi_correlation(ens, mats, z, return_paths=True)
    if diagnostic:
        norms = [_kms_norm_abs(ens, a, p) for a, p in zip(mats, ps)]
    else:
        norms = [kms_norm(ens, a, p) for a, p in zip(mats, ps)]
    # interior exponents of the rewritten chain: w_j = z_j - 1/(2p_j) - 1/(2p_{j-1})
    w = [z[j - 1] - 0.5 / ps[j] - 0.5 / ps[j - 1] for j in range(1, len(z) + 1)]
    min_re_w = min(v.real for v in w)
    if min_re_w < -1e-12:
        raise AssertionError(f"interior exponent with negative real part {min_re_w}")
    scale = max(float(np.prod([op_norm(a) for a in mats])), np.finfo(float).tiny)
    return VerificationRecord.inequality(
        "holder",
        nested,
        float(np.prod(norms)),
        tol=tol,
        dim=ens.dim,
        beta=ens.beta,
        n=len(z),
        p=ps,
        z=list(z.z),
        norms=norms,
        inv_p_sum=sum(1.0 / p for p in ps),
        min_re_w=min_re_w,
        path_gap=abs(nested - traced) / scale,
        diagnostic=diagnostic,
        ensemble=ens.fingerprint(),
        **({"seed": ens.seed} if ens.seed is not None else {}),
    )


def _kms_norm_abs(ens: GibbsEnsemble, a, p: int) -> float:
    """``|omega(Delta^{1/p} A ... Delta^{1/p} A)|^{1/p}`` without the positivity check."""
    v = ens.omega_vec
    for _ in range(p):
        v = ens.rho_power(1.0 / p) @ (a @ v) @ ens.rho_power(-1.0 / p)
    return abs(complex(np.vdot(ens.omega_vec, v))) ** (1.0 / p)


def araki_bound_check(
    ens: GibbsEnsemble,
    x_list: Sequence[np.ndarray],
    phi_list: Sequence[StateFunctional],
    z: InsertionTuple,
    split: SplitSpec,
    tol: float = TOL_INEQ,
) -> VerificationRecord:
    """Relative modular bound with a split exponent.

    ``left = Delta_{phi_m}^{conj z'} X_m^* Delta_{phi_{m+1}}^{conj z_{m+1}} X_{m+1}^* ... Delta_{phi_n}^{conj z_n} X_n^* Omega``
    ``right = Delta_{phi_m}^{conj z''} X_{m-1} Delta_{phi_{m-1}}^{conj z_{m-1}} ... Delta_{phi_1}^{conj z_1} X_0 Omega``

    and ``|<left, right>| <= prod ||X_j|| (Omega, Omega)^{z_0} prod phi_j(1)^{Re z_j}``
    with ``z_0 = 1 - sum Re z_j``.  Invalid splits are rejected before any
    evaluation.
    """
    if not isinstance(z, InsertionTuple):
        z = InsertionTuple(z)
    n = len(z)
    if len(x_list) != n + 1 or len(phi_list) != n:
        raise ValueError("need n+1 operators and n functionals")
    if z.re_sum > 1.0 + TOL_BUDGET:
        raise BudgetViolation(f"sum of real parts {z.re_sum} exceeds 1")
    split.validate(z)
    m = split.m
    xs = [as_matrix(x) for x in x_list]

    def delta(j, exponent, v):
        return relative_modular_power_apply(ens, phi_list[j - 1], np.conj(exponent), v)

    left = dag(xs[n]) @ ens.omega_vec
    for j in range(n, m, -1):
        left = dag(xs[j - 1]) @ delta(j, z[j - 1], left)
    left = delta(m, split.z_prime, left)

    right = xs[0] @ ens.omega_vec
    for j in range(1, m):
        right = xs[j] @ delta(j, z[j - 1], right)
    right = delta(m, split.z_dprime, right)

    lhs = complex(np.vdot(left, right))
    omega_sq = hs_norm(ens.omega_vec) ** 2
    rhs = float(np.prod([op_norm(x) for x in xs]))
    rhs *= omega_sq ** z.z0
    rhs *= float(np.prod([phi.total() ** zj.real for phi, zj in zip(phi_list, z.z)]))
    return VerificationRecord.inequality(
        "araki",
        lhs,
        rhs,
        tol=tol,
        dim=ens.dim,
        beta=ens.beta,
        n=n,
        z=list(z.z),
        split={"m": m, "z_prime": split.z_prime, "z_dprime": split.z_dprime},
        phi_totals=[phi.total() for phi in phi_list],
        phi_faithful=[phi.is_faithful() for phi in phi_list],
    )


def _conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def weighted_norm(omega_density: np.ndarray, a, p: float) -> float:
    """``Tr((omega^{1/2p} |A| omega^{1/2p})^p)^{1/p}``; ``p = inf`` gives ``||A||``."""
    a = as_matrix(a)
    if math.isinf(p):
        return op_norm(a)
    absval = fractional_power(dag(a) @ a, 0.5)
    r = fractional_power(omega_density, 0.5 / p)
    vals = np.clip(np.linalg.eigvalsh(0.5 * (r @ absval @ r + dag(r @ absval @ r))), 0.0, None)
    top = vals.max(initial=0.0)
    if top == 0.0:
        return 0.0
    # rescale so large p does not underflow
    return float(top * np.sum((vals / top) ** p) ** (1.0 / p))


def finite_trace_holder_check(
    nu_list: Sequence[np.ndarray],
    omega_density,
    a_list: Sequence[np.ndarray],
    p: float,
    tol: float = TOL_INEQ,
) -> list[VerificationRecord]:
    """Weighted trace Hoelder inequalities for density matrices.

    Returns two records:

    * ``trace_holder_pair``: ``|Tr(omega A B)| <= ||A||_{omega,p} ||B||_{omega,q}``
      with ``A, B`` the first two entries of ``a_list``.  The symmetric
      pairing ``|Tr(omega^{1/2} A omega^{1/2} B)|`` is reported in the meta as
      ``lhs_symmetric`` for comparison.
    * ``trace_holder_modular``: ``|<A_2 Delta_{nu_2,omega}^{1/p} A_1 Delta_{nu_1,omega}^{1/q} A_0>_omega|
      <= prod ||A_j|| (Tr nu_2)^{1/p} (Tr nu_1)^{1/q}``, evaluated as the vector
      pairing on the GNS space of ``omega`` where
      ``Delta_{nu,omega}^s xi = nu^s xi omega^{-s}``.
    """
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    q = _conjugate_exponent(p)
    w = as_matrix(omega_density)
    wdec = eig_hermitian(w)
    check_psd_values(wdec.values, TOL_PSD)
    if wdec.values[0] <= SUPPORT_CUTOFF * wdec.values[-1]:
        raise SingularState("omega must be faithful")
    if abs(np.trace(w).real - 1.0) > 1e-10:
        raise ValueError("omega must have unit trace")
    nus = [as_matrix(v) for v in nu_list]
    for v in nus:
        dec = eig_hermitian(v)
        check_psd_values(dec.values, TOL_PSD)
        if dec.values[0] <= SUPPORT_CUTOFF * dec.values[-1]:
            raise SingularState("nu_j must be faithful")
    if len(nus) != 2 or len(a_list) != 3:
        raise ValueError("need two nu's and three operators")
    a0, a1, a2 = (as_matrix(a) for a in a_list)
    meta = dict(dim=w.shape[0], p=float(p), q=float(q))

    lhs9 = complex(np.trace(w @ a0 @ a1))
    half = fractional_power(w, 0.5)
    sym = complex(np.trace(half @ a0 @ half @ a1))
    rhs9 = weighted_norm(w, a0, p) * weighted_norm(w, a1, q)
    pair = VerificationRecord.inequality("trace_holder_pair", lhs9, rhs9, tol=tol, lhs_symmetric=abs(sym), **meta)

    def rel_mod(nu, s, xi):
        if math.isinf(s):
            raise ValueError("exponent must be finite")
        return fractional_power(nu, s) @ xi @ fractional_power(w, -s)

    inv_p, inv_q = 1.0 / p, (0.0 if math.isinf(q) else 1.0 / q)
    v = a0 @ half
    v = a1 @ rel_mod(nus[0], inv_q, v)
    v = a2 @ rel_mod(nus[1], inv_p, v)
    lhs10 = complex(np.vdot(half, v))
    rhs10 = op_norm(a0) * op_norm(a1) * op_norm(a2)
    rhs10 *= np.trace(nus[1]).real ** inv_p * np.trace(nus[0]).real ** inv_q
    modular = VerificationRecord.inequality("trace_holder_modular", lhs10, rhs10, tol=tol, **meta)
    return [pair, modular]
