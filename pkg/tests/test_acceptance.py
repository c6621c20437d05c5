"""Acceptance criteria, one test per criterion at the stated tolerance.

Every test appends a one-line PASS/FAIL summary that is printed at the end of
the pytest run (see ``conftest.pytest_terminal_summary``).
"""

import time

import numpy as np
import pytest
import sympy as sp

from modholder.harness import CampaignConfig, gen_positive, run_campaign
from modholder.holder import holder_check
from modholder.nclp import OptConfig, am_norm, cone_vector, kms_norm, kms_norm_analytic, phi_from_cone_vector
from modholder.standard_form import make_gibbs

from conftest import ACCEPTANCE_LINES, SIGMA_X, random_ensemble

ALL_DIMS = tuple(range(2, 9))


def record(criterion, ok, detail):
    line = f"{criterion:4s} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def campaign_stats(report, check=None):
    recs = [r for r in report.records if check is None or r.check == check]
    fails = [r for r in recs if not r.passed]
    worst = min(r.rel_margin for r in recs)
    return recs, fails, worst


def test_c1_holder_campaign():
    cfg = CampaignConfig(
        dims=ALL_DIMS,
        n_range=(1, 4),
        beta_range=(0.1, 10.0),
        re_floor=0.05,
        conditioning_max=1e3,
        trials=10_000,
        master_seed=20181,
        checks=("holder",),
    )
    t0 = time.perf_counter()
    report = run_campaign(cfg)
    elapsed = time.perf_counter() - t0
    recs, fails, worst = campaign_stats(report)
    n_one = sum(1 for r in fails if r.meta.get("n") == 1)
    ok = not fails and worst >= -1e-9 and elapsed <= 120.0 and len(recs) == 10_000
    record(
        "C1",
        ok,
        f"Hoelder campaign: {len(recs) - len(fails)}/{len(recs)} pass, worst rel_margin {worst:.3e}, "
        f"{n_one} failures with n = 1, {elapsed:.1f} s",
    )


def test_c2_saturation():
    rng = np.random.default_rng(2)
    worst = 0.0
    for k in range(100):
        d = int(rng.integers(2, 7))
        ens = random_ensemble(rng, d)
        a = gen_positive(d, rng.integers(2**63), float(np.exp(rng.uniform(0, np.log(1e3)))))
        rec = holder_check(ens, [a, a], [0.5])
        worst = max(worst, abs(abs(rec.lhs) - rec.rhs) / rec.rhs)
    record("C2", worst <= 1e-10, f"saturation n = 1, z = 1/2: max |lhs - rhs| / rhs = {worst:.2e} over 100 instances")


def test_c3_araki():
    cfg = CampaignConfig(dims=(2, 3, 4, 5, 6), n_range=(1, 3), trials=1000, master_seed=3, checks=("araki",))
    recs, fails, worst = campaign_stats(run_campaign(cfg))
    record("C3", not fails and worst >= -1e-9, f"Araki bound: {len(recs) - len(fails)}/{len(recs)} pass, worst rel_margin {worst:.3e}")


def test_c4_kms():
    cfg = CampaignConfig(dims=ALL_DIMS, trials=1000, master_seed=4, checks=("kms",))
    recs, fails, _ = campaign_stats(run_campaign(cfg))
    worst = max(r.lhs.real / r.rhs * 1e-9 for r in recs)
    record("C4", not fails, f"KMS boundary: {len(recs) - len(fails)}/{len(recs)} pass, worst residual / scale {worst:.2e}")


def test_c5_tomita():
    cfg = CampaignConfig(dims=ALL_DIMS, trials=1000, master_seed=5, checks=("tomita",))
    recs, fails, _ = campaign_stats(run_campaign(cfg))
    worst = max(r.lhs.real for r in recs)
    record("C5", not fails and worst <= 1e-9, f"modular identities: {len(recs) - len(fails)}/{len(recs)} pass, worst residual {worst:.2e}")


def test_c6_cone_functionals():
    dims = (2, 3, 4, 5, 6)
    r41 = run_campaign(CampaignConfig(dims=dims, trials=100, master_seed=61, checks=("lemma41",)))
    rch = run_campaign(CampaignConfig(dims=dims, trials=100, master_seed=62, checks=("chain",)))
    r42 = run_campaign(CampaignConfig(dims=dims, trials=100, master_seed=63, checks=("lemma42",), restarts=16))
    res41 = max(r.lhs.real for r in r41.records)
    resch = max(r.lhs.real for r in rch.records)
    gap42 = max(abs(r.meta["phi_root"] - r.meta["correlation_root"]) / r.meta["phi_root"] for r in r42.records)
    ok = r41.all_passed and rch.all_passed and res41 <= 1e-9 and resch <= 1e-9 and gap42 <= 1e-9
    record(
        "C6",
        ok,
        f"cone functionals: round-trip residual {res41:.2e}, chain residual {resch:.2e}, "
        f"(a) vs (b) relative gap {gap42:.2e} (100 instances each)",
    )


def test_c7_am_norm_consistency():
    rng = np.random.default_rng(7)
    cfg = OptConfig(restarts=64)
    worst = {"small": 0.0, "large": 0.0, "p2": 0.0}
    over_op = -np.inf
    count = 0
    for bucket, dims in (("small", (2, 3)), ("large", (4, 5, 6))):
        for p in (2, 4, 8):
            for _ in range(10):
                d = int(rng.choice(dims))
                ens = random_ensemble(rng, d)
                a = gen_positive(d, rng.integers(2**63), float(np.exp(rng.uniform(0, np.log(1e3)))))
                target = phi_from_cone_vector(ens, a, p).total() ** (1.0 / p)
                est = am_norm(ens, cone_vector(ens, a, p), p, cfg)
                rel = abs(est.value - target) / target
                if p == 2:
                    worst["p2"] = max(worst["p2"], rel)
                else:
                    worst[bucket] = max(worst[bucket], rel)
                over_op = max(over_op, est.value - np.linalg.norm(a, 2))
                count += 1
    ok = worst["small"] <= 0.02 and worst["large"] <= 0.05 and worst["p2"] <= 1e-10 and over_op <= 1e-9
    record(
        "C7",
        ok,
        f"AM norm vs phi(1)^(1/p): d<=3 {worst['small']:.2e}, d<=6 {worst['large']:.2e}, p=2 {worst['p2']:.1e}, "
        f"max(estimate - ||A||) {over_op:.2e} ({count} instances)",
    )


def test_c8_vector_holder_and_contraction():
    cfg = CampaignConfig(dims=(2, 3, 4), trials=100, master_seed=8, checks=("lp",))
    report = run_campaign(cfg)
    con = [r for r in report.records if r.check == "lp_contraction"]
    hol = [r for r in report.records if r.check == "lp_holder"]
    ok = len(con) == 100 and len(hol) == 100 and all(r.passed for r in con + hol)
    record(
        "C8",
        ok,
        f"contraction {sum(r.passed for r in con)}/{len(con)}, vector Hoelder {sum(r.passed for r in hol)}/{len(hol)} "
        f"within optimization slack",
    )


def test_c9_finite_trace_holder():
    # exact 2x2 validation of the trace closed form for rho = diag(2/3, 1/3), A = sigma_x, p = 2
    r = sp.diag(sp.Rational(2, 3), sp.Rational(1, 3))
    sx = sp.Matrix([[0, 1], [1, 0]])
    pw = lambda s: sp.diag(r[0, 0] ** s, r[1, 1] ** s)  # noqa: E731
    omega = pw(sp.Rational(1, 2))
    v = omega
    for _ in range(2):
        v = pw(sp.Rational(1, 2)) * sx * v * pw(-sp.Rational(1, 2))
    chain = sp.nsimplify((omega.H * v).trace())
    closed = sp.simplify(((pw(sp.Rational(1, 4)) * sx * pw(sp.Rational(1, 4))) ** 2).trace())
    exact_ok = sp.simplify(chain - closed) == 0 and sp.simplify(closed - 2 * sp.sqrt(2) / 3) == 0
    ens = make_gibbs(np.diag([0.0, np.log(2.0)]), 1.0)
    example_err = abs(kms_norm(ens, SIGMA_X, 2) - (2 * np.sqrt(2) / 3) ** 0.5)

    cfg = CampaignConfig(dims=(2, 3, 4, 5, 6), trials=1000, master_seed=9, checks=("trace_holder",))
    report = run_campaign(cfg)
    pair = [r for r in report.records if r.check == "trace_holder_pair"]
    mod = [r for r in report.records if r.check == "trace_holder_modular"]
    worst_pair = min(r.rel_margin for r in pair)
    worst_mod = min(r.rel_margin for r in mod)
    sym_ok = all(r.meta["lhs_symmetric"] <= r.rhs * (1 + 1e-9) for r in pair)
    ok = exact_ok and example_err <= 1e-12 and worst_pair >= -1e-9 and worst_mod >= -1e-9
    record(
        "C9",
        ok,
        f"trace Hoelder: pair {sum(r.passed for r in pair)}/{len(pair)} (worst rel_margin {worst_pair:.3e}, "
        f"symmetric pairing within bound: {sym_ok}), modular {sum(r.passed for r in mod)}/{len(mod)} "
        f"(worst {worst_mod:.3e}); exact 2x2 closed form {exact_ok}, sigma_x example error {example_err:.1e}",
    )


def test_c10_cross_presentation():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 9))
        ens = random_ensemble(rng, d)
        a = gen_positive(d, rng.integers(2**63), float(np.exp(rng.uniform(0, np.log(1e3)))))
        p = int(rng.integers(1, 9))
        x, y = kms_norm(ens, a, p), kms_norm_analytic(ens, a, p)
        worst = max(worst, abs(x - y) / x)
    record("C10", worst <= 1e-9, f"chain vs imaginary-time KMS norm: max relative gap {worst:.2e} over 1000 instances")


def test_c11_determinism():
    cfg = CampaignConfig(dims=(2, 3), trials=4, master_seed=11, checks=tuple(
        ("holder", "araki", "kms", "tomita", "lemma41", "lemma42", "lp", "trace_holder", "chain")), restarts=16)
    a, b = run_campaign(cfg), run_campaign(cfg)
    same_pass = a.pass_vector() == b.pass_vector()
    same_stream = [(r.meta.get("seed"), r.meta.get("trial"), r.check) for r in a.records] == [
        (r.meta.get("seed"), r.meta.get("trial"), r.check) for r in b.records
    ]
    same_bytes = a.to_json(include_runtime=False) == b.to_json(include_runtime=False)
    record("C11", same_pass and same_stream and same_bytes, f"two full runs: identical pass vectors {same_pass}, "
           f"instance streams {same_stream}, reports {same_bytes} ({len(a.records)} records)")
