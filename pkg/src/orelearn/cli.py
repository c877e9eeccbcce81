"""Command-line entry point for the experiment harness.

Subcommands mirror the experiment families: correctness, pac, trace,
games, hybrid, sq, validsig.  Parameters come either from a JSON config
file (--config) or from flags; flags override file values.  Exit codes:
0 success, 2 config error, 3 gate-threshold failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import ConfigError, ExperimentConfig, run


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", type=str, default=None, help="JSON config file")
    sub.add_argument("--seed", type=int, default=None, help="master seed (u64)")
    sub.add_argument("--out", type=str, default=None, help="report output directory")
    sub.add_argument(
        "--format", choices=("json", "csv", "both"), default="both", dest="out_format"
    )
    sub.add_argument("--transcripts", action="store_true", default=None)
    sub.add_argument("--ell", type=int, default=None)
    sub.add_argument("--lam", type=int, default=None)
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--gamma", type=float, default=None)
    sub.add_argument("--xi", type=float, default=None)
    sub.add_argument("--eps", type=float, default=None)
    sub.add_argument("--scheme", choices=("opf", "strengthened"), default=None)
    sub.add_argument("--certifier", choices=("signature", "escrow"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orelearn",
        description="Seeded desk-scale experiments for strongly correct ORE "
        "and encrypted-threshold learning",
    )
    subs = parser.add_subparsers(dest="experiment", required=True)

    sub = subs.add_parser("correctness", help="decryption/weak/strong correctness sweeps")
    _add_common(sub)

    sub = subs.add_parser("pac", help="comparator learner error-bound experiment")
    _add_common(sub)
    sub.add_argument(
        "--dist",
        choices=("uniform", "malformed", "wrongparams", "pointmass", "all"),
        default=None,
    )

    sub = subs.add_parser("trace", help="reidentification completeness/soundness")
    _add_common(sub)
    sub.add_argument("--mode", choices=("completeness", "soundness"), default="completeness")
    sub.add_argument("--drop-index", type=int, default=None, dest="drop_index")
    sub.add_argument("--k-cap", type=int, default=None, dest="k_cap",
                     help="cap per-bucket samples (reduced-K mode, non-conforming)")

    sub = subs.add_parser("games", help="indistinguishability game runners")
    _add_common(sub)
    sub.add_argument(
        "--mode",
        choices=("random", "payload", "leak", "reduction", "synthetic"),
        default="random",
    )

    sub = subs.add_parser("hybrid", help="expand and check a hybrid schedule")
    _add_common(sub)
    sub.add_argument("--left", type=str, required=False, help="comma-separated ascending ints")
    sub.add_argument("--right", type=str, required=False)

    sub = subs.add_parser("sq", help="statistical-query learner experiment")
    _add_common(sub)
    sub.add_argument("--mode", choices=("exact", "jitter"), default=None,
                     help="oracle answer mode")
    sub.add_argument("--keyspace", choices=("oracle", "tiny"), default=None)

    sub = subs.add_parser("validsig", help="signature-validity concept experiments")
    _add_common(sub)
    sub.add_argument("--mode", choices=("learn", "trace", "forge"), default="learn")

    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config file must hold a JSON object")
    raw["experiment"] = args.experiment
    for key in (
        "seed", "ell", "lam", "trials", "n", "alpha", "beta", "gamma", "xi",
        "eps", "scheme", "certifier", "dist", "mode", "drop_index", "k_cap",
        "keyspace", "transcripts",
    ):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    for key in ("left", "right"):
        value = getattr(args, key, None)
        if isinstance(value, str):
            raw[key] = [int(tok) for tok in value.split(",") if tok.strip()]
    return ExperimentConfig.from_dict(raw)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: <file>: {exc}", file=sys.stderr)
        return 2
    report = run(config)
    for key in sorted(report.aggregates):
        print(f"{key} = {report.aggregates[key]}")
    status = "PASS" if report.passed else ("FAIL" if report.passed is False else "n/a")
    print(f"experiment={config.experiment} hash={config.config_hash()} gate={status}")
    if args.out:
        formats = ("json", "csv") if args.out_format == "both" else (args.out_format,)
        for path in report.write(args.out, formats):
            print(f"wrote {path}")
    if report.passed is False:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
