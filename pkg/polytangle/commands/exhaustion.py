"""Handlers for ``check-exhaustion``, ``carve`` and ``delete-planes``."""

import argparse

from polytangle.commands.common import emit, load_input, request_rng, require, save_output
from polytangle.services.exhaustion import carve_rays, check_good, check_nice, delete_planes
from polytangle.services.generators import random_exhaustion
from polytangle.utils.logger import get_logger
from polytangle.utils.models import CommandRequest, ExhaustionDescriptor, ExhaustionReport
from polytangle.utils.validation import parse_int_list

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    check = subparsers.add_parser("check-exhaustion", parents=[parent], help="Check a good or nice exhaustion")
    check.add_argument("--in", dest="input", required=True, help="ExhaustionDescriptor document")
    check.add_argument("--kind", choices=["good", "nice"], default="nice")

    carve = subparsers.add_parser("carve", parents=[parent], help="Remove proper rays from each end")
    source = carve.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="input", help="ExhaustionDescriptor document")
    source.add_argument("--random", action="store_true", help="Use a seeded random exhaustion")
    carve.add_argument("--nu", required=True, help="Rays per end, e.g. 2,1")
    carve.add_argument("--out", help="Write the carved descriptor here")

    delete = subparsers.add_parser("delete-planes", parents=[parent], help="Fill in all but nu' planes per end")
    delete.add_argument("--in", dest="input", required=True, help="ExhaustionDescriptor document")
    delete.add_argument("--kept", required=True, help="Planes kept per end, e.g. 1,1")
    delete.add_argument("--out", help="Write the modified descriptor here")


def _report(report: ExhaustionReport) -> int:
    emit(f"{report.kind} exhaustion: {'pass' if report.passed else 'FAIL'}")
    for failure in report.failures:
        emit(f"  - {failure}")
    for implied in report.implied:
        emit(f"  implies: {implied}")
    return 0 if report.passed else 1


def check_exhaustion(request: CommandRequest) -> int:
    descriptor = load_input(request, "ExhaustionDescriptor")
    checker = check_good if request.parameters.get("kind") == "good" else check_nice
    return _report(checker(descriptor))


def carve(request: CommandRequest) -> int:
    params = request.parameters
    if params.get("random"):
        descriptor = random_exhaustion(request_rng(request))
    else:
        descriptor = load_input(request, "ExhaustionDescriptor")
    valid, nu, message = parse_int_list(params["nu"], "nu")
    require((valid, message))
    carved = carve_rays(descriptor, nu)
    save_output(request, carved)
    emit(f"carved {sum(nu)} rays through {len(carved.frontier_levels())} frontier levels")
    return _report(check_nice(carved))


def delete(request: CommandRequest) -> int:
    descriptor: ExhaustionDescriptor = load_input(request, "ExhaustionDescriptor")
    valid, kept, message = parse_int_list(request.parameters["kept"], "kept", minimum=1)
    require((valid, message))
    result = delete_planes(descriptor, kept)
    save_output(request, result)
    for piece in result.pieces:
        for record in piece.splittings:
            emit(f"piece {piece.index}, end {record.end}: splitting chi="
                 f"{record.splitting_surface.euler_characteristic()} ({record.check.verdict}), "
                 f"residual chi={record.residual_surface.euler_characteristic()}")
    emit(f"planes per end: {result.planes_per_end}")
    return 0


HANDLERS = {
    ("check-exhaustion", None): check_exhaustion,
    ("carve", None): carve,
    ("delete-planes", None): delete,
}
