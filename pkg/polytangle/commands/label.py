"""Handlers for ``label assign``, ``label compare`` and ``label family``."""

import argparse
from itertools import combinations
from pathlib import Path

from polytangle.commands.common import emit, load_input, require
from polytangle.services.labeling import (
    catalog_assign,
    catalog_lookup,
    generate_family,
    homeomorphism_obstruction,
)
from polytangle.utils.config import get_settings
from polytangle.utils.exceptions import UsageError, VerificationError
from polytangle.utils.logger import get_logger
from polytangle.utils.models import CommandRequest
from polytangle.utils.storage import read_document, write_document
from polytangle.utils.validation import validate_input_path

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    label = subparsers.add_parser("label", parents=[parent], help="Knot-space labelings")
    label.add_argument("action", choices=["assign", "compare", "family"])
    label.add_argument("--i", type=int, help="End index")
    label.add_argument("--j", type=int, help="Plane index")
    label.add_argument("--depth", type=int, help="Depth n of the slot")
    label.add_argument("--p", type=int, choices=[0, 1], help="Label bit")
    label.add_argument("--in", dest="input", help="First BinaryLabeling document")
    label.add_argument("--other", help="Second BinaryLabeling document")
    label.add_argument("--r", type=int, help="Family size")
    label.add_argument("--mu", type=int, default=1, help="Number of ends for --family")
    label.add_argument("--out", help="Directory for the family documents")


def assign(request: CommandRequest) -> int:
    params = request.parameters
    missing = [name for name in ("i", "j", "depth", "p") if params.get(name) is None]
    if missing:
        raise UsageError(f"label assign needs --{', --'.join(missing)}")
    parameter = catalog_assign(params["i"], params["j"], params["depth"], params["p"])
    knot = catalog_lookup(parameter)
    emit(f"({params['i']}, {params['j']}, {params['depth']}, {params['p']}) -> twist knot with "
         f"{knot.parameter} half-twists ({knot.name})")
    return 0


def compare(request: CommandRequest) -> int:
    first = load_input(request, "BinaryLabeling")
    require(validate_input_path(request.parameters.get("other")))
    second = read_document(request.parameters["other"], "BinaryLabeling")
    report = homeomorphism_obstruction(first, second)
    for result in report.results:
        if result.infinite_disagreement:
            emit(f"plane {result.slot}: disagree forever at residues {result.witness_residues} mod {result.modulus}")
        else:
            emit(f"plane {result.slot}: agree from depth {result.agrees_from}")
    emit("obstructed: the manifolds are not homeomorphic" if report.obstructed
         else "not obstructed: every plane agrees eventually")
    return 0


def family(request: CommandRequest) -> int:
    params = request.parameters
    r = params.get("r")
    if r is None:
        raise UsageError("label family needs --r")
    seed = params.get("seed")
    members = generate_family(r, get_settings().seed if seed is None else seed, mu=params.get("mu") or 1)
    unobstructed = [(a, b) for a, b in combinations(range(r), 2)
                    if not homeomorphism_obstruction(members[a], members[b]).obstructed]
    if request.output_path:
        directory = Path(request.output_path)
        for index, member in enumerate(members, start=1):
            write_document(member, directory / f"labeling-{index}.json")
    emit(f"family of {r} labelings: {r * (r - 1) // 2 - len(unobstructed)} of {r * (r - 1) // 2} pairs obstructed")
    if unobstructed:
        raise VerificationError(f"pairs {unobstructed} are not obstructed")
    return 0


HANDLERS = {("label", "assign"): assign, ("label", "compare"): compare, ("label", "family"): family}
