"""Verification records: one inequality or identity check and its outcome."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

TOL_INEQ = 1e-9
MARGIN_FLOOR = 1e-300


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


@dataclass(frozen=True)
class VerificationRecord:
    """Outcome of one check.

    ``margin = rhs - |lhs|`` and the check passes iff
    ``margin >= -tol * max(rhs, floor)``.  Identity checks are expressed the
    same way with ``lhs`` a residual, ``rhs`` its allowed bound and ``tol = 0``.
    """

    check: str
    lhs: complex
    rhs: float
    margin: float
    rel_margin: float
    passed: bool
    meta: dict = field(default_factory=dict)

    @classmethod
    def inequality(cls, check: str, lhs, rhs, tol: float = TOL_INEQ, **meta) -> "VerificationRecord":
        lhs = complex(lhs)
        rhs = float(rhs)
        margin = rhs - abs(lhs)
        denom = max(rhs, MARGIN_FLOOR)
        passed = bool(np.isfinite(margin) and margin >= -tol * denom)
        return cls(check, lhs, rhs, margin, margin / denom, passed, meta)

    @classmethod
    def residual(cls, check: str, residual, bound, **meta) -> "VerificationRecord":
        return cls.inequality(check, residual, bound, tol=0.0, **meta)

    @classmethod
    def failure(cls, check: str, error: Exception, **meta) -> "VerificationRecord":
        meta = dict(meta, error=f"{type(error).__name__}: {error}")
        return cls(check, complex(np.nan), float("nan"), float("nan"), float("nan"), False, meta)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": self.rhs,
            "margin": self.margin,
            "rel_margin": self.rel_margin,
            "pass": self.passed,
            "meta": _jsonable(self.meta),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationRecord":
        re, im = d["lhs"]
        return cls(d["check"], complex(re, im), d["rhs"], d["margin"], d["rel_margin"], d["pass"], d.get("meta", {}))
