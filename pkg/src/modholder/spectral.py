"""Dense Hermitian spectral calculus.

Matrices are plain complex ``numpy`` arrays of shape ``(d, d)``.  They serve
both as algebra elements and as vectors of the Hilbert-Schmidt space with
inner product ``<x, y> = Tr(x^* y)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotPSD, SingularNegativePower

TOL_HERM = 1e-10
TOL_PSD = 1e-10
SUPPORT_CUTOFF = 1e-12


def tol_recon(dim: int) -> float:
    return 1e-11 * dim


tol_unitary = tol_recon


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hs_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """``Tr(x^* y)``, conjugate-linear in the first slot."""
    return complex(np.vdot(x, y))


def hs_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def _hermitian_residual(m: np.ndarray) -> float:
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(m - dag(m)) / scale)


def require_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> np.ndarray:
    """Return the Hermitian part of ``m`` after checking it is Hermitian to ``tol``."""
    m = as_matrix(m)
    res = _hermitian_residual(m)
    if res > tol:
        raise NotHermitian(f"relative anti-Hermitian part {res:.3e} exceeds {tol:.1e}")
    return 0.5 * (m + dag(m))


@dataclass(frozen=True)
class SpectralDecomposition:
    values: np.ndarray  # ascending, real
    basis: np.ndarray  # orthonormal columns

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.values) @ dag(self.basis)

    def apply(self, f) -> np.ndarray:
        """Spectral calculus ``f(M)`` for a scalar function applied to the eigenvalues."""
        return (self.basis * f(self.values)) @ dag(self.basis)


def eig_hermitian(m) -> SpectralDecomposition:
    h = require_hermitian(m)
    values, basis = np.linalg.eigh(h)
    return SpectralDecomposition(values=values, basis=basis)


def _power_weights(values: np.ndarray, z: complex, support: bool, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    lam_max = values.max() if values.size else 0.0
    if lam_max <= 0.0:
        on = np.zeros(values.shape, dtype=bool)
    else:
        on = values > cutoff * lam_max
    if complex(z).real < 0 and not support and not on.all():
        raise SingularNegativePower(
            "negative real-part power of a singular matrix; pass support=True "
            "to invert on the support"
        )
    logs = np.log(np.where(on, values, 1.0))
    return np.where(on, np.exp(complex(z) * logs), 0.0)


def check_psd_values(values: np.ndarray, tol: float = TOL_PSD) -> None:
    scale = max(np.abs(values).max(initial=0.0), 0.0)
    if values.size and values.min() < -tol * max(scale, np.finfo(float).tiny):
        raise NotPSD(f"minimum eigenvalue {values.min():.3e} below -{tol:.1e} * {scale:.3e}")


def fractional_power(p, z: complex, support: bool = False) -> np.ndarray:
    """Complex power ``P^z`` of a positive semidefinite matrix, taken on its support.

    Eigenvalues at or below ``1e-12 * max eigenvalue`` are treated as zero and
    dropped, so ``fractional_power(P, 0)`` is the support projection of ``P``.
    A negative real part on a singular ``P`` raises unless ``support`` is set,
    in which case the inverse power is taken on the support only.
    """
    dec = eig_hermitian(p)
    check_psd_values(dec.values)
    return power_from_spectrum(dec, z, support=support)


def power_from_spectrum(
    dec: SpectralDecomposition, z: complex, support: bool = False, cutoff: float = SUPPORT_CUTOFF
) -> np.ndarray:
    """Power from a known spectrum; ``cutoff = 0`` keeps every positive eigenvalue."""
    w = _power_weights(dec.values, z, support, cutoff)
    return (dec.basis * w) @ dag(dec.basis)


def psd_check(m, tol: float) -> tuple[bool, float]:
    dec = eig_hermitian(m)
    min_eig = float(dec.values[0])
    return min_eig >= -tol, min_eig


def norms_and_trace(m) -> tuple[float, float, complex]:
    m = as_matrix(m)
    op = float(np.linalg.norm(m, 2))
    return op, hs_norm(m), complex(np.trace(m))


def op_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m), 2))


def support_projection(xi) -> np.ndarray:
    """Orthogonal projection onto the range (column space) of ``xi``."""
    xi = as_matrix(xi)
    u, s, _ = np.linalg.svd(xi)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros_like(xi)
    rank = int(np.count_nonzero(s > SUPPORT_CUTOFF * s[0]))
    ur = u[:, :rank]
    return ur @ dag(ur)


def polar_parts(xi) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``xi = u |xi|`` with ``u`` a partial isometry.

    ``u^* u`` is the support projection of ``|xi| = (xi^* xi)^{1/2}``.
    """
    xi = as_matrix(xi)
    w, s, vh = np.linalg.svd(xi)
    v = dag(vh)
    if s.size == 0 or s[0] == 0.0:
        z = np.zeros_like(xi)
        return z, z
    rank = int(np.count_nonzero(s > SUPPORT_CUTOFF * s[0]))
    absval = (v[:, :rank] * s[:rank]) @ dag(v[:, :rank])
    u = w[:, :rank] @ dag(v[:, :rank])
    return u, absval
