"""Command-line entry point: `starkqfi <subcommand> [--config file] [--key value ...]`.

Every configuration key doubles as a flag; flags override the config file.
Exit codes: 0 ok, 1 configuration error, 2 all points failed.
"""
from __future__ import annotations

import argparse
import sys

from .config import ConfigError, KINDS, load_config
from . import presets, runner


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    overrides: dict[str, str] = {}
    key = None
    for token in pairs:
        if token.startswith("--"):
            if key is not None:
                raise ConfigError(f"flag --{key} is missing a value")
            key = token[2:].replace("-", "_")
        elif key is None:
            raise ConfigError(f"unexpected argument {token!r} (flags are --key value)")
        else:
            overrides[key] = token
            key = None
    if key is not None:
        raise ConfigError(f"flag --{key} is missing a value")
    return overrides


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="starkqfi",
        description="Stark-probe QFI sweeps, scaling fits and figure reproduction",
    )
    parser.add_argument("kind", choices=KINDS, help="experiment kind")
    parser.add_argument("--config", help="flat key = value configuration file")
    args, rest = parser.parse_known_args(argv)

    try:
        overrides = _parse_overrides(rest)
        config = load_config(kind=args.kind, config_file=args.config,
                             overrides=overrides)
        if config.kind == "reproduce":
            paths = presets.reproduce(config.figure, config.out, config.workers)
            for path in paths:
                print(path)
            return 0
        if config.kind == "fit":
            outcome = runner.run_fit(config)
        else:
            outcome = runner.run(config)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 1
    for path in outcome.output_files + [outcome.manifest_path]:
        print(path)
    if outcome.n_failed:
        print(f"{outcome.n_failed} point(s) failed, {outcome.n_ok} ok "
              f"(see manifest)", file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
