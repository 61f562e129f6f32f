"""Command-line entry point.

Exit codes: 0 on success, 1 on a configuration error, 2 on a numerical
failure (including a failed ``selftest``).
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, load_config
from .linalg import NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _key_value(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value experiment file")
    common.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--solver", choices=("ihooi", "alsas", "both", "hooi"))
    common.add_argument("--threads", type=int, metavar="N", help="worker processes for grid trials")
    common.add_argument("--early-exit", action="store_true", default=None,
                        help="skip grid cells implied by monotone success/failure")
    common.add_argument("--set", dest="overrides", action="append", default=[], type=_key_value,
                        metavar="KEY=VALUE", help="override one config key (repeatable)")

    parser = argparse.ArgumentParser(prog="ihosvd", description="HOSVD from partial observations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("convergence", "per-iteration error traces of each solver"),
        ("phase", "success-rate grid over rank and sample ratio"),
        ("recover", "factor-recovery success rates over rank and sample ratio"),
        ("complete", "relative error and time on noisy synthetic data"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    st = sub.add_parser("selftest", help="run the randomized property checks")
    st.add_argument("--full", action="store_true", help="ten times more random instances")
    return parser


def _overrides(args) -> dict[str, str]:
    pairs = dict(args.overrides)
    for flag in ("seed", "out", "solver", "threads"):
        value = getattr(args, flag)
        if value is not None:
            pairs[flag] = str(value)
    if args.early_exit:
        pairs["early_exit"] = "true"
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return pairs


def _selftest(full: bool) -> int:
    from .selfcheck import run_all

    checks = run_all(quick=not full)
    for check in checks:
        print(check.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return _selftest(args.full)

    from .experiments import RUNNERS, format_summary

    try:
        cfg = load_config(args.config, _overrides(args), kind=args.command)
        if cfg.kind != args.command:
            raise ConfigError(f"config kind {cfg.kind!r} does not match subcommand {args.command!r}")
        with np.errstate(invalid="raise", divide="raise", over="raise"):
            result = RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    print(f"wrote {result['csv']}")
    for fig in result.get("figures", [result.get("figure")]):
        if fig is not None:
            print(f"wrote {fig}")
    if "summary" in result:
        print(format_summary(result["summary"]))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
