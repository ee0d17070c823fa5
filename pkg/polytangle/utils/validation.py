"""Parameter validation for command-line arguments.

Validators return ``(is_valid, error_message)`` tuples so the CLI can turn
a failure into a usage error without unwinding through an exception;
parsers that also produce a value return ``(is_valid, value, error_message)``.
"""

from pathlib import Path
from typing import Optional, Tuple

from polytangle.utils.config import get_settings
from polytangle.utils.logger import get_logger

logger = get_logger(__name__)

DOCUMENT_SUFFIXES = {".json"}
EXPORT_SUFFIXES = {"svg": ".svg", "pd": ".txt", "gauss": ".txt", "json": ".json"}


def validate_group_count(n: int, limit: Optional[int] = None) -> Tuple[bool, str]:
    """Check that n is a usable number of components.

    Args:
        n: Number of components
        limit: Largest accepted n, if any

    Returns:
        Tuple of (is_valid, error_message)

    Examples:
        >>> validate_group_count(3)
        (True, '')

        >>> validate_group_count(1)
        (False, 'n must be at least 2, got 1')
    """
    if isinstance(n, bool) or not isinstance(n, int):
        return False, "n must be an integer"
    if n < 2:
        return False, f"n must be at least 2, got {n}"
    if limit is not None and n > limit:
        return False, f"n must be at most {limit}, got {n}"
    return True, ""


def parse_subset(text: str, n: int) -> Tuple[bool, list[int], str]:
    """Parse a comma-separated subset J0 of [1, n].

    Returns:
        Tuple of (is_valid, sorted_subset, error_message)

    Examples:
        >>> parse_subset("2,1", 3)
        (True, [1, 2], '')

        >>> parse_subset("", 3)
        (False, [], 'subset must be non-empty')
    """
    pieces = [piece.strip() for piece in (text or "").split(",") if piece.strip()]
    if not pieces:
        return False, [], "subset must be non-empty"
    try:
        values = [int(piece) for piece in pieces]
    except ValueError:
        return False, [], f"subset must list integers, got {text!r}"
    if len(set(values)) != len(values):
        return False, [], "subset lists a component twice"
    outside = [value for value in values if not 1 <= value <= n]
    if outside:
        return False, [], f"subset entries {outside} lie outside [1, {n}]"
    return True, sorted(values), ""


def parse_int_list(text: str, name: str, minimum: int = 0) -> Tuple[bool, list[int], str]:
    """Parse a comma-separated list such as ``--nu 2,1``."""
    try:
        values = [int(piece) for piece in (text or "").split(",") if piece.strip()]
    except ValueError:
        return False, [], f"{name} must list integers, got {text!r}"
    if not values:
        return False, [], f"{name} must be non-empty"
    if any(value < minimum for value in values):
        return False, [], f"{name} entries must be at least {minimum}"
    return True, values, ""


def validate_workers(workers: int) -> Tuple[bool, str]:
    if workers < 1:
        return False, f"workers must be at least 1, got {workers}"
    return True, ""


def validate_input_path(path: Optional[str]) -> Tuple[bool, str]:
    """Check that a document path exists and is a JSON file."""
    if not path:
        return False, "an input document is required"
    source = Path(path)
    if source.suffix.lower() not in DOCUMENT_SUFFIXES:
        return False, f"input documents are .json files, got {source.name}"
    if not source.is_file():
        return False, f"input document not found: {path}"
    return True, ""


def validate_output_path(path: Optional[str], fmt: str = "json") -> Tuple[bool, str]:
    """Check that an output path has the suffix of its format.

    A missing path is valid: the report goes to stdout.
    """
    if not path:
        return True, ""
    expected = EXPORT_SUFFIXES.get(fmt)
    if expected is None:
        return False, f"unknown export format {fmt!r}"
    if Path(path).suffix.lower() != expected:
        logger.warning(f"Output {path} does not end in {expected}")
        return False, f"{fmt} output must end in {expected}"
    return True, ""


def validate_verify_size(n: int, all_subsets: bool) -> Tuple[bool, str]:
    """Bound n for exhaustive subset runs by the configured maximum."""
    if all_subsets:
        return validate_group_count(n, get_settings().max_verify_n)
    return validate_group_count(n)
