"""``mh`` command line: verification campaigns and KMS norms from files.

Exit codes: 0 all checks pass, 1 some check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness, nclp, standard_form
from .errors import ModHolderError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

VERIFY_CHOICES = ["holder", "araki", "kms", "tomita", "lemma41", "lemma42", "lp", "trace-holder", "chain", "all"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def read_matrix(path: str) -> np.ndarray:
    with open(path) as fh:
        d = json.load(fh)
    dim = int(d["dim"])
    entries = d["entries"]
    if len(entries) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, got {len(entries)}")
    return np.array([complex(re, im) for re, im in entries]).reshape(dim, dim)


def write_matrix(path: str, m: np.ndarray) -> None:
    m = np.asarray(m, dtype=complex)
    with open(path, "w") as fh:
        json.dump({"dim": m.shape[0], "entries": [[c.real, c.imag] for c in m.reshape(-1)]}, fh)


def _emit(report: harness.Report, args) -> int:
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(report.to_csv())
    for check, s in report.summary.items():
        print(f"{check:22s} {s['passes']:6d}/{s['count']:<6d} worst rel_margin {s['worst_rel_margin']:.3e}")
    failed = [r for r in report.records if not r.passed]
    for r in failed[:10]:
        print(f"FAIL {r.check} trial={r.meta.get('trial')} seed={r.meta.get('seed')} margin={r.margin:.3e}"
              + (f" {r.meta['error']}" if "error" in r.meta else ""))
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_verify(args) -> int:
    checks = harness.CHECKS if args.check == "all" else (args.check.replace("-", "_"),)
    cfg = harness.CampaignConfig(
        dims=tuple(args.dim) if args.dim else (2, 3, 4),
        beta_range=(args.beta, args.beta) if args.beta else (0.1, 10.0),
        n_range=(args.n, args.n) if args.n else (1, 4),
        trials=args.trials,
        master_seed=args.seed,
        re_floor=args.re_floor,
        checks=checks,
    )
    cfg.validate()
    return _emit(harness.run_campaign(cfg, workers=args.workers), args)


def cmd_campaign(args) -> int:
    with open(args.config) as fh:
        cfg = harness.CampaignConfig.from_dict(json.load(fh))
    return _emit(harness.run_campaign(cfg, workers=args.workers), args)


def cmd_norm(args) -> int:
    a = read_matrix(args.matrix)
    h = read_matrix(args.hamiltonian) if args.hamiltonian else np.zeros_like(a)
    ens = standard_form.make_gibbs(h, args.beta)
    value = nclp.kms_norm(ens, a, args.p)
    print(json.dumps({"p": args.p, "beta": args.beta, "kms_norm": value}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mh", description="Modular-theory Hoelder inequality verification")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a randomized campaign for one check")
    v.add_argument("check", choices=VERIFY_CHOICES)
    v.add_argument("--dim", type=int, action="append", help="matrix dimension (repeatable)")
    v.add_argument("--beta", type=float, help="fixed inverse temperature")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--n", type=int, help="number of insertions")
    v.add_argument("--re-floor", type=float, default=0.05)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--report")
    v.add_argument("--csv")
    v.set_defaults(func=cmd_verify)

    n = sub.add_parser("norm", help="KMS p-norm of a PSD matrix")
    n.add_argument("--p", type=int, required=True)
    n.add_argument("--matrix", required=True)
    n.add_argument("--hamiltonian", help="matrix file; default is H = 0")
    n.add_argument("--beta", type=float, default=1.0)
    n.set_defaults(func=cmd_norm)

    c = sub.add_parser("campaign", help="run a campaign from a JSON config")
    c.add_argument("--config", required=True)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--report")
    c.add_argument("--csv")
    c.set_defaults(func=cmd_campaign)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModHolderError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"mh: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
