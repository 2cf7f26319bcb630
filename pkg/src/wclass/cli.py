"""Command-line front end.

    wclass verify {states,entanglement,optics,dynamics,protocols,all}
    wclass optics run <scheme>
    wclass protocol {qkd,qss,teleport,distill}

Exit status: 0 when every check passes, 1 on a failed check, 2 on usage or IO errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import optics as opt
from . import protocols as proto
from .corelin import fidelity
from .states import w_state
from .verify import SCHEMA_VERSION, SUITES, VerifyConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _config(args) -> VerifyConfig:
    return VerifyConfig(seed=args.seed, rounds=args.rounds or 100_000, truncation=args.truncation,
                        tol_structural=args.tol_structural, tol_assert=args.tol_assert)


def cmd_verify(args) -> int:
    cfg = _config(args)
    if cfg.rounds < 1:
        raise UsageError("--rounds must be >= 1")
    report = run_suite(args.suite, cfg)
    text = report.to_json()
    _emit(text, args.json)
    failed = [c.id for c in report.checks if not c.passed]
    print(f"{args.suite}: {len(report.checks) - len(failed)}/{len(report.checks)} checks passed",
          file=sys.stderr)
    for cid in failed:
        print(f"  FAIL {cid}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _scheme_path(ref: str) -> Path:
    p = Path(ref)
    if p.exists():
        return p
    try:
        return opt.shipped_scheme(ref)
    except FileNotFoundError:
        raise UsageError(f"no scheme file {ref!r}") from None


def cmd_optics_run(args) -> int:
    path = _scheme_path(args.scheme)
    try:
        scheme = opt.load_scheme(path, args.truncation)
        report = opt.run_scheme(scheme)
    except opt.SchemeError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except OverflowError as exc:
        raise UsageError(f"{path}: truncation overflow: {exc}") from None
    d = {"schema_version": SCHEMA_VERSION, "truncation": args.truncation, **report.to_dict()}
    _emit(json.dumps(d, indent=2, sort_keys=True) + "\n", args.json)
    fid = "n/a" if report.fidelity is None else f"{report.fidelity:.15g}"
    print(f"{report.name}: probability {report.probability:.15g}, fidelity {fid}", file=sys.stderr)
    return EXIT_OK


def cmd_protocol(args) -> int:
    name = args.name
    rounds = args.rounds if args.rounds is not None else 100_000
    if name in ("qkd", "qss"):
        if rounds < 1:
            raise UsageError("--rounds must be >= 1")
        t = (proto.qkd_simulate if name == "qkd" else proto.qss_simulate)(rounds, args.seed)
        d = t.summary()
        line = (f"{name}: success_rate {d['success_rate']} (exact {d['exact_success_rate']}), "
                f"qubits_per_key_bit {d['qubits_per_key_bit']}")
    elif name == "distill":
        if None in (args.a, args.b, args.c):
            raise UsageError("distill needs --a, --b and --c")
        try:
            p, out = proto.distill_w(args.a, args.b, args.c)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        d = {"protocol": "distill", "a": args.a, "b": args.b, "c": args.c,
             "success_probability": p, "fidelity_w3": fidelity(out, w_state(3))}
        line = f"distill: success {p:.15g}, fidelity {d['fidelity_w3']:.15g}"
    else:
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        channel = proto.w_channel() if args.channel == "w" else proto.ghz_channel()
        rng = np.random.default_rng(args.seed)
        fids = [proto.teleport(proto.random_ent_state(rng), channel).min_fidelity
                for _ in range(args.trials)]
        d = {"protocol": "teleport", "channel": channel.label, "trials": args.trials,
             "seed": args.seed, "min_fidelity": min(fids), "classical_bits": 3}
        line = f"teleport ({channel.label}): min fidelity {min(fids):.15g} over {args.trials} trials"
    d = {"schema_version": SCHEMA_VERSION, **{k: _sig(v) for k, v in d.items()}}
    _emit(json.dumps(d, indent=2) + "\n", args.json)
    print(line, file=sys.stderr)
    return EXIT_OK


def _sig(v):
    return float(f"{v:.15g}") if isinstance(v, float) else v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--truncation", type=int, default=opt.N_MAX, help="photon-number cutoff")
    p.add_argument("--tol-structural", type=float, default=1e-10)
    p.add_argument("--tol-assert", type=float, default=1e-12)
    p.add_argument("--json", metavar="PATH", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wclass", description="W-class entanglement toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    _common(v)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("optics", help="optical schemes")
    osub = o.add_subparsers(dest="action", required=True, parser_class=_Parser)
    run = osub.add_parser("run", help="run a scheme file or a shipped scheme name")
    run.add_argument("scheme")
    _common(run)
    run.set_defaults(func=cmd_optics_run)

    pr = sub.add_parser("protocol", help="protocol simulations")
    pr.add_argument("name", choices=("qkd", "qss", "teleport", "distill"))
    pr.add_argument("--a", type=float)
    pr.add_argument("--b", type=float)
    pr.add_argument("--c", type=float)
    pr.add_argument("--channel", choices=("ghz", "w"), default="w")
    pr.add_argument("--trials", type=int, default=100)
    _common(pr)
    pr.set_defaults(func=cmd_protocol)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wclass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
