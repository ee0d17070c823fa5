"""Handlers for building theta, selecting subtangles and exporting diagrams."""

import argparse
from pathlib import Path
from typing import Union

from polytangle.commands.common import emit, load_input, require, save_output
from polytangle.services.diagram import diagram_from_theta, gauss_text, pd_text, render_svg
from polytangle.services.tangle import build_theta, check_theta, select_subtangle
from polytangle.utils.exceptions import UsageError
from polytangle.utils.logger import get_logger
from polytangle.utils.models import CommandRequest, Subtangle, ThetaComplex
from polytangle.utils.storage import dump_document
from polytangle.utils.validation import parse_subset, validate_group_count, validate_output_path

logger = get_logger(__name__)

EXPORT_FORMATS = ("svg", "pd", "gauss", "json")


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    build = subparsers.add_parser("build", parents=[parent], help="Build the stacked tangle theta")
    build.add_argument("--n", type=int, required=True, help="Number of components")
    build.add_argument("--out", help="Write the ThetaComplex document here")

    subtangle = subparsers.add_parser("subtangle", parents=[parent], help="Select the subtangle of J0")
    subtangle.add_argument("--n", type=int, help="Number of components (or --in)")
    subtangle.add_argument("--in", dest="input", help="ThetaComplex document")
    subtangle.add_argument("--subset", required=True, help="Comma-separated J0, e.g. 1,3")
    subtangle.add_argument("--out", help="Write the Subtangle document here")

    export = subparsers.add_parser("export", parents=[parent], help="Export a diagram or document")
    export.add_argument("action", choices=EXPORT_FORMATS)
    export.add_argument("--n", type=int, help="Number of components (or --in)")
    export.add_argument("--in", dest="input", help="ThetaComplex or Subtangle document")
    export.add_argument("--subset", help="Restrict to the subtangle of J0")
    export.add_argument("--out", help="Output file; stdout when omitted")


def _theta(request: CommandRequest) -> ThetaComplex:
    n = request.parameters.get("n")
    if request.input_path:
        model = load_input(request)
        if isinstance(model, Subtangle):
            return model.parent
        if not isinstance(model, ThetaComplex):
            raise UsageError(f"expected a ThetaComplex document, got {type(model).__name__}")
        return model
    if n is None:
        raise UsageError("give --n or --in")
    require(validate_group_count(n))
    return build_theta(n)


def _source(request: CommandRequest) -> Union[ThetaComplex, Subtangle]:
    if request.input_path and not request.parameters.get("subset"):
        model = load_input(request)
        if not isinstance(model, (ThetaComplex, Subtangle)):
            raise UsageError(f"cannot export a {type(model).__name__} diagram")
        return model
    theta = _theta(request)
    subset = request.parameters.get("subset")
    if subset:
        valid, chosen, message = parse_subset(subset, theta.n)
        require((valid, message))
        return select_subtangle(theta, chosen)
    return theta


def build(request: CommandRequest) -> int:
    n = request.parameters["n"]
    require(validate_group_count(n))
    theta = build_theta(n)
    require(check_theta(theta))
    written = save_output(request, theta)
    emit(f"theta: n={theta.n} m={theta.m} components={len(theta.components)} levels={len(theta.levels)}"
         + (f" -> {request.output_path}" if written else ""))
    return 0


def subtangle(request: CommandRequest) -> int:
    theta = _theta(request)
    valid, chosen, message = parse_subset(request.parameters.get("subset", ""), theta.n)
    require((valid, message))
    selected = select_subtangle(theta, chosen)
    written = save_output(request, selected)
    emit(f"subtangle: n={theta.n} J0={selected.subset} components={len(selected.components)}"
         + (f" -> {request.output_path}" if written else ""))
    return 0


def export(request: CommandRequest) -> int:
    fmt = request.action
    require(validate_output_path(request.output_path, fmt))
    source = _source(request)
    if fmt == "json":
        text = dump_document(source)
    else:
        projection, code = diagram_from_theta(source)
        if fmt == "svg":
            text = render_svg(projection)
        elif fmt == "pd":
            text = pd_text(code)
        else:
            text = gauss_text(code)
    if request.output_path:
        Path(request.output_path).write_text(text, encoding="utf-8")
        logger.info(f"Exported {fmt} to {request.output_path}")
    else:
        emit(text)
    return 0


HANDLERS = {
    ("build", None): build,
    ("subtangle", None): subtangle,
    **{("export", fmt): export for fmt in EXPORT_FORMATS},
}
