"""Helpers shared by the subcommand handlers."""

import random
import sys
from typing import Optional

from pydantic import BaseModel

from polytangle.services.generators import rng_for
from polytangle.utils.exceptions import UsageError
from polytangle.utils.models import CommandRequest
from polytangle.utils.storage import read_document, write_document
from polytangle.utils.validation import validate_input_path


def require(check: tuple) -> None:
    """Raise UsageError when a ``(is_valid, ..., error_message)`` tuple fails."""
    if not check[0]:
        raise UsageError(check[-1])


def emit(text: str) -> None:
    """Write a report to stdout."""
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def load_input(request: CommandRequest, kind: Optional[str] = None) -> BaseModel:
    require(validate_input_path(request.input_path))
    return read_document(request.input_path, kind)


def save_output(request: CommandRequest, model: BaseModel) -> bool:
    """Write the model when ``--out`` was given; True when a file was written."""
    if not request.output_path:
        return False
    write_document(model, request.output_path)
    return True


def request_rng(request: CommandRequest) -> random.Random:
    return rng_for(request.parameters.get("seed"))
