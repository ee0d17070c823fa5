"""Versioned JSON documents for every public polytangle model.

A document wraps one model:

    {"schema": "polytangle", "version": 1, "kind": "ThetaComplex", "payload": {...}}

Exact rationals are written as "p/q" strings. Loading resolves ``kind``
through the registry below and validates the payload with pydantic; any
failure is raised as SchemaError naming the dotted path of the bad field.
"""

import json
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, ValidationError

from polytangle.utils import models
from polytangle.utils.config import get_settings
from polytangle.utils.exceptions import SchemaError
from polytangle.utils.logger import get_logger

logger = get_logger(__name__)

SCHEMA_NAME = "polytangle"

REGISTRY: dict[str, type[BaseModel]] = {
    cls.__name__: cls
    for cls in vars(models).values()
    if isinstance(cls, type) and issubclass(cls, BaseModel) and cls.__module__ == models.__name__
}


def _path(location: tuple) -> str:
    return ".".join(str(part) for part in location)


def dump_document(model: BaseModel) -> str:
    """Serialize a registered model into a document string.

    Raises:
        SchemaError: If the model's type is not registered
    """
    kind = type(model).__name__
    if REGISTRY.get(kind) is not type(model):
        raise SchemaError("kind", f"{kind} is not a document type")
    document = {
        "schema": SCHEMA_NAME,
        "version": get_settings().schema_version,
        "kind": kind,
        "payload": model.model_dump(mode="json"),
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def load_document(text: str, expected_kind: Optional[str] = None) -> BaseModel:
    """Parse a document string back into its model.

    Args:
        text: Document text
        expected_kind: Reject documents of any other kind when given

    Raises:
        SchemaError: On malformed JSON, a wrong header, or an invalid payload
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not JSON: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(document, dict):
        raise SchemaError("", "document must be a JSON object")
    if document.get("schema") != SCHEMA_NAME:
        raise SchemaError("schema", f"expected {SCHEMA_NAME!r}, got {document.get('schema')!r}")
    version = get_settings().schema_version
    if document.get("version") != version:
        raise SchemaError("version", f"expected {version}, got {document.get('version')!r}")
    kind = document.get("kind")
    if kind not in REGISTRY:
        raise SchemaError("kind", f"unknown document kind {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise SchemaError("kind", f"expected {expected_kind}, got {kind}")
    if "payload" not in document:
        raise SchemaError("payload", "missing")
    try:
        return REGISTRY[kind].model_validate(document["payload"])
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SchemaError(_path(("payload",) + tuple(first["loc"])), first["msg"]) from exc


def write_document(model: BaseModel, path: Union[str, Path]) -> Path:
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dump_document(model), encoding="utf-8")
    logger.info(f"Wrote {type(model).__name__} document to {target}")
    return target


def read_document(path: Union[str, Path], expected_kind: Optional[str] = None) -> BaseModel:
    """Load a document file.

    Raises:
        SchemaError: If the file cannot be read or does not validate
    """
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError("", f"cannot read {source}: {exc.strerror}") from exc
    model = load_document(text, expected_kind)
    logger.debug(f"Read {type(model).__name__} document from {source}")
    return model


if __name__ == "__main__":
    from polytangle.services.tangle import build_theta

    text = dump_document(build_theta(2))
    print(text[:200])
    print(load_document(text, "ThetaComplex") == build_theta(2))
