"""
Scenario subcommands.
Defines the run, sweep and verify-paper commands and their flags.
"""

import argparse

from app.cli.handlers.scenario_handlers import handle_run, handle_sweep, handle_verify


def add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    """Flags shared by run and sweep; each mirrors a config-file key."""
    parser.add_argument("--config", help="flat key=value scenario file; flags override it")
    parser.add_argument("--scheme", help="single | dedicated | flexible | linear")
    parser.add_argument("--K", type=int, help="users")
    parser.add_argument("--L", type=int, help="servers")
    parser.add_argument("--N", type=int, help="files")
    parser.add_argument("--M", help="cache size in files, an exact rational such as 1 or 4/3")
    parser.add_argument("--m", type=int, help="symbol width in bits (q = 2^m)")
    parser.add_argument("--seed", type=int, help="PRNG seed")
    parser.add_argument("--demands", help="all-distinct | sweep | random:<count> | explicit list like 1,2,3")
    parser.add_argument("--profile", help="flexible class sizes p_1,...,p_L")
    parser.add_argument("--out", help="CSV report path (default: standard output)")
    parser.add_argument("--multiple", type=int, help="file size as a multiple of the minimal F")
    parser.add_argument("--force", action="store_true", help="bypass the desk-scale guardrails")


def register(subparsers: argparse._SubParsersAction) -> None:
    run = subparsers.add_parser("run", help="simulate one scenario")
    add_scenario_flags(run)
    run.set_defaults(func=handle_run)

    sweep = subparsers.add_parser("sweep", help="simulate every corner of the memory-delay curve")
    add_scenario_flags(sweep)
    sweep.add_argument("--servers", help="comma-separated server counts, one curve per L")
    sweep.set_defaults(func=handle_sweep)

    verify = subparsers.add_parser("verify-paper", help="reproduce the worked examples")
    verify.add_argument("--seed", type=int, help="PRNG seed")
    verify.set_defaults(func=handle_verify)
