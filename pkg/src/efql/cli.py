"""Command-line interface: train, compare, verify.

Exit codes: 0 success, 1 configuration errors, 2 runtime divergence.
"""

from __future__ import annotations

import argparse
import sys

from . import kernels
from .config import ExperimentConfig, load_config, validate_experiment, with_overrides
from .errors import ConfigError, NonFiniteState, NonFiniteUpdate
from .harness import emit_artifacts, run_compare, run_experiment
from .oracle import run_verification

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad seed list {text!r}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="efql",
        description="Fuzzy Q(lambda)-learning benchmark harness "
                    f"(kernel backend: {kernels.BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train one agent over one or more seeds")
    train.add_argument("--agent", help="enhanced-fql | nstep-fql | fuzzy-sarsa")
    train.add_argument("--episodes", type=int, help="episodes per run")
    train.add_argument("--seed", help="comma-separated seed list, e.g. 1,2,3")
    train.add_argument("--config", help="JSON config file")
    train.add_argument("--out", help="output directory")
    train.add_argument("--svg", action="store_true", help="also emit learning_curve.svg")

    compare = sub.add_parser("compare", help="run all three agents on shared seeds")
    compare.add_argument("--config", help="JSON config file")

    verify = sub.add_parser("verify", help="run the operator verification suite")
    verify.add_argument("--tol", type=float, default=1e-8,
                        help="fixed-point tolerance (default 1e-8)")
    return parser


def _load(config_path: str | None) -> ExperimentConfig:
    if config_path:
        return load_config(config_path)
    return validate_experiment(ExperimentConfig())


def _cmd_train(args) -> int:
    cfg = _load(args.config)
    cfg = with_overrides(
        cfg,
        agent=args.agent,
        episodes=args.episodes,
        seeds=_parse_seeds(args.seed) if args.seed else None,
        output_dir=args.out,
        emit_svg=True if args.svg else None,
    )
    summaries = run_experiment(cfg)
    written = emit_artifacts({cfg.agent: summaries}, cfg)
    for s in summaries:
        conv = s.convergence_episode if s.convergence_episode is not None else "-"
        print(f"{cfg.agent} seed={s.seed}: avg_return_last_10pct="
              f"{s.avg_return_last_10pct:.2f} mean_update_ms="
              f"{s.mean_update_time_ms:.4f} convergence_episode={conv}")
    print(f"wrote {len(written)} files to {cfg.output_dir}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg = _load(args.config)
    results = run_compare(cfg)
    written = emit_artifacts(results, cfg, force_svg=True)
    for agent, summaries in results.items():
        convs = [s.convergence_episode for s in summaries]
        print(f"{agent}: convergence episodes per seed = "
              f"{['-' if c is None else c for c in convs]}")
    print(f"wrote {len(written)} files to {cfg.output_dir}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_verification(tol=args.tol)
    width = max(len(r.name) for r in results)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  [{r.seconds:6.2f}s]  {r.detail}")
        ok = ok and r.passed
    print(f"verification: {'all properties hold' if ok else 'FAILURES detected'}")
    return EXIT_OK if ok else EXIT_CONFIG


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and usage errors
        code = exc.code if exc.code is not None else 0
        return int(code) if isinstance(code, int) else EXIT_CONFIG
    try:
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonFiniteUpdate, NonFiniteState) as exc:
        print(f"runtime divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
