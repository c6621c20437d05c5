"""Random instance generation and reproducible verification campaigns.

Seeds.  Trial ``i`` of check ``c`` draws all of its randomness from
``numpy.random.default_rng(trial_seed(master, i, c))`` where::

    splitmix64(x) = the SplitMix64 finalizer applied to x + 0x9E3779B97F4A7C15
    tag(c)        = 64-bit FNV-1a hash of the UTF-8 check name
    trial_seed    = splitmix64(splitmix64(master ^ splitmix64(i)) ^ tag(c))

all arithmetic modulo 2**64.  The instance stream therefore depends only on
``(master, i, c)`` and never on worker count or execution order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import holder, nclp, standard_form
from .errors import ConfigError, InfeasibleFloor, ModHolderError, SizeTooLarge
from .holder import InsertionTuple, SplitSpec
from .records import VerificationRecord
from .spectral import dag

SCHEMA_VERSION = "1"
MAX_DIM = 16
MASK64 = (1 << 64) - 1

CHECKS = ("holder", "araki", "kms", "tomita", "lemma41", "lemma42", "lp", "trace_holder", "chain")
HAMILTONIAN_KINDS = ("gue", "diagonal", "ising_chain")

# p-lists with sum 1/p_j = 1/2 used by the chain check
CHAIN_P_LISTS = ((2,), (4, 4), (8, 8, 8, 8), (6, 6, 6), (4, 8, 8), (6, 6, 12, 12), (4, 6, 12))


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & MASK64
    return h


def trial_seed(master_seed: int, index: int, tag: str) -> int:
    inner = splitmix64((master_seed & MASK64) ^ splitmix64(index))
    return splitmix64(inner ^ fnv1a64(tag))


# --- generators --------------------------------------------------------------

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _site_op(op: np.ndarray, site: int, sites: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for k in range(sites):
        out = np.kron(out, op if k == site else np.eye(2))
    return out


def ising_chain(sites: int, g: float = 1.0) -> np.ndarray:
    """Open transverse-field Ising chain ``-sum Z_i Z_{i+1} - g sum X_i``."""
    d = 2**sites
    h = np.zeros((d, d), dtype=complex)
    for i in range(sites - 1):
        h -= _site_op(_PAULI_Z, i, sites) @ _site_op(_PAULI_Z, i + 1, sites)
    for i in range(sites):
        h -= g * _site_op(_PAULI_X, i, sites)
    return h


def gen_hamiltonian(kind: str, size_param: int, seed, g: float = 1.0) -> np.ndarray:
    """Random Hamiltonian.

    ``gue``: ``(G + G^*)/2`` with standard complex Gaussian entries.
    ``diagonal``: diagonal with entries uniform in [0, 1].
    ``ising_chain``: ``size_param`` is the number of sites (``2**sites <= 16``).
    """
    rng = np.random.default_rng(seed)
    if kind == "ising_chain":
        if size_param < 1 or 2**size_param > MAX_DIM:
            raise SizeTooLarge(f"2**{size_param} exceeds {MAX_DIM}")
        return ising_chain(size_param, g)
    if size_param < 1 or size_param > MAX_DIM:
        raise SizeTooLarge(f"dimension {size_param} outside 1..{MAX_DIM}")
    d = size_param
    if kind == "gue":
        gmat = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
        return 0.5 * (gmat + dag(gmat))
    if kind == "diagonal":
        return np.diag(rng.uniform(0.0, 1.0, d)).astype(complex)
    raise ValueError(f"unknown Hamiltonian kind {kind!r}")


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def gen_positive(dim: int, seed, conditioning: float = 1.0) -> np.ndarray:
    """``U diag(s) U^*`` with Haar-like ``U`` and ``s`` log-uniform in [1/conditioning, 1]."""
    if conditioning < 1:
        raise ValueError("conditioning must be >= 1")
    rng = np.random.default_rng(seed)
    u = random_unitary(dim, rng)
    s = np.exp(rng.uniform(-math.log(conditioning), 0.0, dim)) if conditioning > 1 else np.ones(dim)
    a = (u * s) @ dag(u)
    return 0.5 * (a + dag(a))


def gen_insertions(n: int, alpha: float, re_floor: float, im_t: float, seed) -> InsertionTuple:
    """Sample ``(z_1..z_n)`` in the region ``Re z_j >= re_floor, sum Re z_j <= alpha``.

    ``Re z_j = re_floor + (alpha - n re_floor) * u * w_j`` with ``w`` flat
    Dirichlet and ``u`` uniform in ``[n re_floor / alpha, 1]``; imaginary parts
    are uniform in ``[-im_t, im_t]``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not n * re_floor < alpha:
        raise InfeasibleFloor(f"{n} * {re_floor} >= {alpha}")
    rng = np.random.default_rng(seed)
    spacings = rng.exponential(1.0, n)
    w = spacings / spacings.sum()
    u = rng.uniform(n * re_floor / alpha, 1.0)
    re = re_floor + (alpha - n * re_floor) * u * w
    im = rng.uniform(-im_t, im_t, n)
    return InsertionTuple(re + 1j * im, alpha=alpha)


def gen_split(z: InsertionTuple, rng: np.random.Generator) -> SplitSpec:
    """A random split satisfying both half-budget conditions."""
    re = [v.real for v in z]
    n = len(re)
    options = []
    for m in range(1, n + 1):
        before = sum(re[: m - 1])
        after = sum(re[m:])
        lo = max(0.0, re[m - 1] - (0.5 - after))
        hi = min(re[m - 1], 0.5 - before)
        if hi - lo > 1e-9:
            options.append((m, lo, hi))
    if not options:
        raise ConfigError("no admissible split")
    m, lo, hi = options[rng.integers(len(options))]
    width = hi - lo
    dre = rng.uniform(lo + 0.01 * width, hi - 0.01 * width)
    zm = z[m - 1]
    dim_ = rng.uniform(-1.0, 1.0) * abs(zm.imag + 1.0)
    z_dprime = complex(dre, dim_)
    return SplitSpec(m, zm - z_dprime, z_dprime)


# --- campaign ----------------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    dims: tuple = (2, 3, 4)
    beta_range: tuple = (0.1, 10.0)
    n_range: tuple = (1, 4)
    trials: int = 10
    master_seed: int = 0
    re_floor: float = 0.05
    im_range: float = 5.0
    hamiltonian_kinds: tuple = HAMILTONIAN_KINDS
    normalize_hamiltonian: bool = True
    conditioning_max: float = 1e3
    checks: tuple = ("holder",)
    restarts: int = 64
    max_iters: int = 500
    tolerance_overrides: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.dims or any(not 2 <= d <= MAX_DIM for d in self.dims):
            raise ConfigError(f"dims must lie in 2..{MAX_DIM}")
        lo, hi = self.beta_range
        if not 0 < lo <= hi:
            raise ConfigError("beta_range must be positive and ordered")
        n_lo, n_hi = self.n_range
        if not 1 <= n_lo <= n_hi:
            raise ConfigError("n_range must satisfy 1 <= lo <= hi")
        if not self.re_floor * (n_hi + 1) < 1:
            raise ConfigError("re_floor * (max n + 1) must be < 1")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ConfigError(f"unknown checks {sorted(unknown)}")
        unknown = set(self.hamiltonian_kinds) - set(HAMILTONIAN_KINDS)
        if unknown:
            raise ConfigError(f"unknown Hamiltonian kinds {sorted(unknown)}")
        if self.conditioning_max < 1:
            raise ConfigError("conditioning_max must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        kw = {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}
        if "checks" in kw:
            kw["checks"] = tuple(c.replace("-", "_") for c in kw["checks"])
        cfg = cls(**kw)
        cfg.validate()
        return cfg


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def sample_ensemble(cfg: CampaignConfig, rng: np.random.Generator, seed: int) -> standard_form.GibbsEnsemble:
    dim = int(rng.choice(cfg.dims))
    kind = cfg.hamiltonian_kinds[rng.integers(len(cfg.hamiltonian_kinds))]
    if kind == "ising_chain" and (dim & (dim - 1)) != 0:
        kind = "gue"
    size = int(round(math.log2(dim))) if kind == "ising_chain" else dim
    h = gen_hamiltonian(kind, size, rng.integers(2**63))
    if cfg.normalize_hamiltonian:
        e = np.linalg.eigvalsh(h)
        width = e[-1] - e[0]
        if width > 0:
            h = h / width
    beta = _log_uniform(rng, *cfg.beta_range)
    return standard_form.make_gibbs(h, beta, seed=seed)


def _positive(cfg: CampaignConfig, dim: int, rng: np.random.Generator) -> np.ndarray:
    return gen_positive(dim, rng.integers(2**63), _log_uniform(rng, 1.0, cfg.conditioning_max))


def _general(dim: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2 * dim)


def _functional(dim: int, rng: np.random.Generator) -> standard_form.StateFunctional:
    rank = dim if rng.uniform() < 0.75 else int(rng.integers(1, dim))
    v = _general(dim, rng)[:, :rank]
    density = v @ dag(v)
    density *= _log_uniform(rng, 0.1, 10.0) / np.trace(density).real
    return standard_form.StateFunctional(density)


def _opt(cfg: CampaignConfig, seed: int) -> nclp.OptConfig:
    return nclp.OptConfig(restarts=cfg.restarts, max_iters=cfg.max_iters, seed=seed % (2**63))


def _run_holder(cfg, ens, rng, seed):
    n = int(rng.integers(cfg.n_range[0], cfg.n_range[1] + 1))
    z = gen_insertions(n, 1.0, cfg.re_floor, cfg.im_range, rng.integers(2**63))
    a_list = [_positive(cfg, ens.dim, rng) for _ in range(n + 1)]
    tol = cfg.tolerance_overrides.get("holder", holder.TOL_INEQ)
    return [holder.holder_check(ens, a_list, z, tol=tol)]


def _run_araki(cfg, ens, rng, seed):
    n = int(rng.integers(cfg.n_range[0], min(cfg.n_range[1], 3) + 1))
    z = gen_insertions(n, 1.0, cfg.re_floor, cfg.im_range, rng.integers(2**63))
    split = gen_split(z, rng)
    x_list = [_general(ens.dim, rng) for _ in range(n + 1)]
    phi_list = [_functional(ens.dim, rng) for _ in range(n)]
    tol = cfg.tolerance_overrides.get("araki", holder.TOL_INEQ)
    return [holder.araki_bound_check(ens, x_list, phi_list, z, split, tol=tol)]


def _run_kms(cfg, ens, rng, seed):
    a, b = _general(ens.dim, rng), _general(ens.dim, rng)
    t = float(rng.uniform(-cfg.im_range, cfg.im_range))
    return [standard_form.kms_boundary_check(ens, a, b, t)]


def _run_tomita(cfg, ens, rng, seed):
    ops = [_general(ens.dim, rng) for _ in range(3)]
    return [standard_form.tomita_check(ens, ops)]


def _run_lemma41(cfg, ens, rng, seed):
    p = int(rng.choice([2, 4, 6, 8]))
    return [nclp.lemma41_check(ens, _positive(cfg, ens.dim, rng), p)]


def _run_chain(cfg, ens, rng, seed):
    p_list = CHAIN_P_LISTS[rng.integers(len(CHAIN_P_LISTS))]
    a_list = [_positive(cfg, ens.dim, rng) for _ in p_list]
    return [nclp.chain_identity_check(ens, a_list, p_list)]


def _run_lemma42(cfg, ens, rng, seed):
    p = int(rng.choice([2, 4, 8]))
    return [nclp.lemma42_check(ens, _positive(cfg, ens.dim, rng), p, _opt(cfg, seed))]


def _run_lp(cfg, ens, rng, seed):
    p_list = [(4, 4), (4, 8), (8, 8), (6, 12), (4, 12)][rng.integers(5)]
    a_list = [_positive(cfg, ens.dim, rng) for _ in p_list]
    x = _general(ens.dim, rng)
    return nclp.lp_holder_contraction_check(ens, x, a_list, p_list, _opt(cfg, seed))


def _run_trace_holder(cfg, ens, rng, seed):
    d = ens.dim
    omega = _positive(cfg, d, rng)
    omega /= np.trace(omega).real
    nus = [_positive(cfg, d, rng) * _log_uniform(rng, 0.1, 10.0) for _ in range(2)]
    a_list = [_positive(cfg, d, rng) for _ in range(3)]
    p = float(rng.uniform(1.0, 6.0))
    return holder.finite_trace_holder_check(nus, omega, a_list, p)


_RUNNERS: dict[str, Callable] = {
    "holder": _run_holder,
    "araki": _run_araki,
    "kms": _run_kms,
    "tomita": _run_tomita,
    "lemma41": _run_lemma41,
    "lemma42": _run_lemma42,
    "lp": _run_lp,
    "trace_holder": _run_trace_holder,
    "chain": _run_chain,
}


def run_trial(cfg: CampaignConfig, index: int, check: str) -> list[VerificationRecord]:
    """All records of one (trial, check) pair; check errors become failed records."""
    seed = trial_seed(cfg.master_seed, index, check)
    rng = np.random.default_rng(seed)
    base = {"seed": seed, "trial": index}
    try:
        ens = sample_ensemble(cfg, rng, seed)
        records = _RUNNERS[check](cfg, ens, rng, seed)
    except (ModHolderError, AssertionError, np.linalg.LinAlgError) as exc:
        return [VerificationRecord.failure(check, exc, **base)]
    return [VerificationRecord(r.check, r.lhs, r.rhs, r.margin, r.rel_margin, r.passed, {**r.meta, **base}) for r in records]


def _run_chunk(args):
    cfg_dict, jobs = args
    cfg = CampaignConfig.from_dict(cfg_dict)
    out = []
    for index, check in jobs:
        t0 = time.perf_counter()
        recs = run_trial(cfg, index, check)
        out.append((index, check, recs, time.perf_counter() - t0))
    return out


@dataclass
class Report:
    config: dict
    records: list
    summary: dict
    schema_version: str = SCHEMA_VERSION
    runtime: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def pass_vector(self) -> list[bool]:
        return [r.passed for r in self.records]

    def to_dict(self, include_runtime: bool = True) -> dict:
        out = {
            "schema_version": self.schema_version,
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
            "summary": self.summary,
        }
        if include_runtime:
            out["runtime"] = self.runtime
        return out

    def to_json(self, include_runtime: bool = True) -> str:
        return json.dumps(self.to_dict(include_runtime), indent=1, sort_keys=True)

    def fingerprint(self) -> str:
        """SHA-256 of the report without wall-clock data."""
        return hashlib.sha256(self.to_json(include_runtime=False).encode()).hexdigest()

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = ["check", "lhs_re", "lhs_im", "rhs", "margin", "rel_margin", "pass", "trial", "seed", "dim", "beta", "n", "p", "meta"]
        writer = csv.DictWriter(buf, fieldnames=fields)
        writer.writeheader()
        for r in self.records:
            d = r.to_dict()
            meta = d["meta"]
            writer.writerow(
                {
                    "check": r.check,
                    "lhs_re": d["lhs"][0],
                    "lhs_im": d["lhs"][1],
                    "rhs": d["rhs"],
                    "margin": d["margin"],
                    "rel_margin": d["rel_margin"],
                    "pass": d["pass"],
                    "trial": meta.get("trial"),
                    "seed": meta.get("seed"),
                    "dim": meta.get("dim"),
                    "beta": meta.get("beta"),
                    "n": meta.get("n"),
                    "p": json.dumps(meta.get("p")) if "p" in meta else "",
                    "meta": json.dumps(meta, sort_keys=True),
                }
            )
        return buf.getvalue()

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(
            config=d["config"],
            records=[VerificationRecord.from_dict(r) for r in d["records"]],
            summary=d["summary"],
            schema_version=d["schema_version"],
            runtime=d.get("runtime", {}),
        )


def summarize(records: Sequence[VerificationRecord]) -> dict:
    summary: dict = {}
    for r in records:
        s = summary.setdefault(r.check, {"count": 0, "passes": 0, "worst_rel_margin": None})
        s["count"] += 1
        s["passes"] += int(r.passed)
        rm = r.rel_margin
        if not math.isfinite(rm):
            rm = -math.inf
        if s["worst_rel_margin"] is None or rm < s["worst_rel_margin"]:
            s["worst_rel_margin"] = rm
    return summary


def run_campaign(cfg: CampaignConfig, workers: int = 1) -> Report:
    """Run every enabled check on ``cfg.trials`` trials.

    Records are ordered by (trial, check order in the config); the result is
    the same for any ``workers``.
    """
    cfg.validate()
    jobs = [(i, c) for i in range(cfg.trials) for c in cfg.checks]
    if workers <= 1:
        results = _run_chunk((cfg.to_dict(), jobs))
    else:
        chunks = [jobs[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [item for part in pool.map(_run_chunk, [(cfg.to_dict(), ch) for ch in chunks]) for item in part]
    order = {c: k for k, c in enumerate(cfg.checks)}
    results.sort(key=lambda item: (item[0], order[item[1]]))
    records = [r for item in results for r in item[2]]
    runtime: dict = {}
    for _, check, _, dt in results:
        runtime[check] = runtime.get(check, 0.0) + dt
    return Report(config=cfg.to_dict(), records=records, summary=summarize(records), runtime=runtime)
