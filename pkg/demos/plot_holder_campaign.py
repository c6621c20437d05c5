"""
Running a verification campaign
===============================

A campaign draws random Gibbs states, insertion exponents and positive
operators from a single master seed and records every check.
"""

import json

from modholder.harness import CampaignConfig, run_campaign

cfg = CampaignConfig(
    dims=(2, 3, 4, 5),
    trials=200,
    master_seed=7,
    checks=("holder", "araki", "kms", "tomita", "chain"),
)
report = run_campaign(cfg)

for check, s in report.summary.items():
    print(f"{check:8s} {s['passes']:4d}/{s['count']:<4d} worst rel_margin {s['worst_rel_margin']:+.3e}")

# the same config reproduces the same report, whatever the worker count
again = run_campaign(cfg, workers=2)
print("fingerprints agree:", report.fingerprint() == again.fingerprint())

# a failing record carries everything needed to rebuild its instance
worst = min(report.records, key=lambda r: r.rel_margin)
print(json.dumps(worst.to_dict(), indent=1)[:600])
