"""Command-line entry point for polytangle.

This module builds the argparse parser from the subcommand modules, turns
parsed arguments into a CommandRequest and dispatches it. Exit statuses:

- 0: success
- 1: a verification failed (the report names what failed)
- 2: usage error, invalid parameters or a malformed document
"""

import argparse
import os
import sys
from typing import Callable, Optional, Sequence

from pydantic import ValidationError

from polytangle.commands import construct, exhaustion, isotopy, label, verify
from polytangle.utils.config import get_settings, reload_settings
from polytangle.utils.exceptions import PolytangleError, SchemaError, UsageError
from polytangle.utils.logger import LEVEL_NAMES, get_logger, level_for, setup_logger
from polytangle.utils.models import CommandRequest

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

Handler = Callable[[CommandRequest], int]

HANDLERS: dict[tuple[str, Optional[str]], Handler] = {
    **construct.HANDLERS,
    **verify.HANDLERS,
    **isotopy.HANDLERS,
    **exhaustion.HANDLERS,
    **label.HANDLERS,
}

# keys of parsed arguments that are not subcommand parameters
_RESERVED = {"command", "action", "input", "out", "verbose", "log_level"}


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subparser per subcommand; -v, --log-level and --seed follow the subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    common.add_argument("--log-level", type=str.upper, choices=LEVEL_NAMES, help="Explicit log level (overrides -v)")
    common.add_argument("--seed", type=int, help="Seed for randomized commands (overrides POLYTANGLE_SEED)")

    parser = argparse.ArgumentParser(
        prog="polytangle",
        description="Build poly-excellent tangles and verify the combinatorics behind them.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (construct, verify, isotopy, exhaustion, label):
        module.register(subparsers, common)
    return parser


def to_request(args: argparse.Namespace) -> CommandRequest:
    values = vars(args)
    return CommandRequest(
        subcommand=values["command"],
        action=values.get("action"),
        parameters={key: value for key, value in values.items() if key not in _RESERVED},
        input_path=values.get("input"),
        output_path=values.get("out"),
        verbosity=values.get("verbose") or 0,
    )


def configure_logging(verbosity: int, log_level: Optional[str] = None) -> None:
    settings = get_settings()
    setup_logger(
        log_level=level_for(verbosity, log_level, settings.log_level),
        log_dir=settings.log_dir,
        log_file=settings.log_file,
        max_bytes=settings.log_max_bytes,
        backup_count=settings.log_backup_count,
        enable_console=settings.enable_console_logging,
        enable_file=settings.enable_file_logging,
    )


def dispatch(request: CommandRequest) -> int:
    """Run one request and map its outcome to an exit status."""
    handler = HANDLERS.get((request.subcommand, request.action))
    if handler is None:
        sys.stderr.write(f"error: unknown command {request.subcommand} {request.action or ''}\n")
        return EXIT_USAGE
    try:
        return handler(request)
    except (UsageError, SchemaError, ValueError, ValidationError) as error:
        logger.debug(f"Usage error in {request.subcommand}: {error}")
        sys.stderr.write(f"error: {error}\n")
        return EXIT_USAGE
    except PolytangleError as error:
        logger.error(f"{request.subcommand} failed: {type(error).__name__}: {error}", exc_info=get_settings().debug)
        sys.stdout.write(f"FAILED: {type(error).__name__}: {error}\n")
        return EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return EXIT_OK if exit_request.code == 0 else EXIT_USAGE
    if args.seed is not None:
        os.environ["POLYTANGLE_SEED"] = str(args.seed)
        reload_settings()
    configure_logging(args.verbose, args.log_level)
    request = to_request(args)
    settings = get_settings()
    logger.info(f"{settings.app_name} v{settings.app_version}: {request.subcommand} {request.action or ''}")
    return dispatch(request)


if __name__ == "__main__":
    sys.exit(main())
