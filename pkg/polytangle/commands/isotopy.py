"""Handlers for ``schedule`` and ``monotonize``."""

import argparse

from polytangle.commands.common import emit, load_input, request_rng, require, save_output
from polytangle.services.generators import random_forest, random_patch_tree, random_trace
from polytangle.services.isotopy import (
    annulus_trace_from_levels,
    check_schedule,
    innermost_removal_oracle,
    monotonize_plane_trace,
    schedule_removal,
)
from polytangle.services.patch_tree import monotonize_patch_tree
from polytangle.utils.exceptions import ScheduleMismatch, UsageError
from polytangle.utils.logger import get_logger
from polytangle.utils.models import AnnulusTrace, CommandRequest, PatchTree, RegionLadder
from polytangle.utils.validation import parse_int_list

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    schedule = subparsers.add_parser("schedule", parents=[parent], help="Stage the pushes removing target curves")
    source = schedule.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="input", help="NestingForest document")
    source.add_argument("--random", action="store_true", help="Use a seeded random forest")
    schedule.add_argument("--regions", type=int, help="Number of regions on the ladder")
    schedule.add_argument("--unbounded", action="store_true", help="Ladder without a last region")
    schedule.add_argument("--curves", type=int, help="Curve count for --random")
    schedule.add_argument("--out", help="Write the PushSchedule document here")

    monotonize = subparsers.add_parser("monotonize", parents=[parent],
                                       help="Monotonize a plane trace or a patch tree")
    source = monotonize.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="input", help="AnnulusTrace or PatchTree document")
    source.add_argument("--levels", help="Radial circle levels of a trace, e.g. 0,1,1,1,2")
    source.add_argument("--random-trace", action="store_true", help="Use a seeded random trace")
    source.add_argument("--random-tree", action="store_true", help="Use a seeded random patch tree")
    monotonize.add_argument("--depth", type=int, help="Truncation depth of a patch tree")
    monotonize.add_argument("--out", help="Write the result document here")


def schedule(request: CommandRequest) -> int:
    params = request.parameters
    if params.get("random"):
        forest, ladder = random_forest(request_rng(request), params.get("curves"), params.get("regions"))
    else:
        forest = load_input(request, "NestingForest")
        regions = params.get("regions")
        if regions is None and not params.get("unbounded"):
            raise UsageError("give --regions or --unbounded")
        ladder = RegionLadder(region_count=regions or 1, unbounded=bool(params.get("unbounded")))
    result = schedule_removal(forest, ladder)
    valid, message = check_schedule(forest, result)
    if not valid:
        raise ScheduleMismatch(message)
    oracle = innermost_removal_oracle(forest)
    if oracle != result.remaining:
        raise ScheduleMismatch(f"schedule leaves {result.remaining}, innermost removal leaves {oracle}")
    save_output(request, result)
    for stage in result.stages:
        regions = ", ".join(f"Y_{entry.region}: {[push.node for push in entry.pushes]}" for entry in stage.entries)
        emit(f"{stage.phase}: {regions}")
    emit(f"{result.push_count} pushes remove {len(result.removed)} curves; {len(result.remaining)} remain")
    for assumption in result.assumptions:
        emit(f"  assumes: {assumption}")
    return 0


def monotonize(request: CommandRequest) -> int:
    params = request.parameters
    if params.get("levels"):
        valid, levels, message = parse_int_list(params["levels"], "levels")
        require((valid, message))
        source = annulus_trace_from_levels(levels)
    elif params.get("random_trace"):
        source = random_trace(request_rng(request))
    elif params.get("random_tree"):
        source = random_patch_tree(request_rng(request), params.get("depth"))
    else:
        source = load_input(request)
    if isinstance(source, AnnulusTrace):
        result = monotonize_plane_trace(source)
        emit(f"separation indices: {result.separation_indices}")
        for stage in result.stages:
            emit(f"{stage.phase}: " + "; ".join(f"F_{move.level} removes {move.removed}" for move in stage.moves))
        emit(f"monotone trace levels: {[circle.level for circle in result.trace.circles]}")
    elif isinstance(source, PatchTree):
        result = monotonize_patch_tree(source, params.get("depth"))
        for stage in result.stages:
            emit(f"stage {stage.index} (levels {stage.levels}): "
                 + "; ".join(f"{move.kind} at {move.center}" for move in stage.moves))
        emit(f"{len(result.moves)} moves; {len(result.tree.patches)} patches remain")
    else:
        raise UsageError(f"cannot monotonize a {type(source).__name__}")
    save_output(request, result)
    return 0


HANDLERS = {("schedule", None): schedule, ("monotonize", None): monotonize}
