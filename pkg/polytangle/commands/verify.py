"""Handlers for ``verify appendix``: certify subtangles, one subset or all of them."""

import argparse
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from pathlib import Path
from typing import Optional

from polytangle.commands.common import emit, require
from polytangle.services.engulf import engulf_verify, validate_certificate
from polytangle.services.tangle import build_theta
from polytangle.utils.config import get_settings
from polytangle.utils.exceptions import UsageError, VerificationError
from polytangle.utils.logger import get_logger, log_with_context
from polytangle.utils.models import CommandRequest, ExcellenceCertificate, ThetaComplex
from polytangle.utils.storage import write_document
from polytangle.utils.validation import parse_subset, validate_verify_size, validate_workers

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction, parent: argparse.ArgumentParser) -> None:
    verify = subparsers.add_parser("verify", parents=[parent], help="Verify a construction")
    verify.add_argument("action", choices=["appendix"])
    verify.add_argument("--n", type=int, required=True, help="Number of components")
    group = verify.add_mutually_exclusive_group(required=True)
    group.add_argument("--subset", help="Comma-separated J0")
    group.add_argument("--all-subsets", action="store_true", help="Verify every non-empty J0")
    verify.add_argument("--workers", type=int, help="Parallel workers for --all-subsets")
    verify.add_argument("--out", help="Certificate file, or directory with --all-subsets")


def all_subsets(n: int) -> list[list[int]]:
    """Every non-empty subset of [1, n], by size then lexicographically."""
    return [list(chosen) for size in range(1, n + 1) for chosen in combinations(range(1, n + 1), size)]


def certify(theta: ThetaComplex, subset: list[int]) -> tuple[list[int], Optional[ExcellenceCertificate], str]:
    """Build and re-validate one certificate; failures come back as messages."""
    run_id = f"n{theta.n}-J{'.'.join(map(str, subset))}"
    try:
        certificate = engulf_verify(theta, subset)
    except VerificationError as exc:
        log_with_context(logger, "error", "Certificate construction failed", run_id=run_id, reason=str(exc))
        return subset, None, f"{type(exc).__name__}: {exc}"
    valid, message = validate_certificate(certificate)
    log_with_context(logger, "info" if valid else "error", "Certificate checked", run_id=run_id,
                     nodes=len(certificate.nodes), valid=valid)
    return subset, certificate, message if not valid else ""


def _line(subset: list[int], certificate: Optional[ExcellenceCertificate], message: str) -> str:
    label = ",".join(map(str, subset))
    if message:
        return f"J0={{{label}}}: FAIL {message}"
    notes = f"; final untouched-column pass over {certificate.untouched_columns}" if certificate.untouched_columns else ""
    return f"J0={{{label}}}: ok ({len(certificate.nodes)} nodes{notes})"


def appendix(request: CommandRequest) -> int:
    params = request.parameters
    n = params["n"]
    batch = bool(params.get("all_subsets"))
    require(validate_verify_size(n, batch))
    theta = build_theta(n)

    if not batch:
        valid, subset, message = parse_subset(params.get("subset") or "", n)
        require((valid, message))
        chosen, certificate, failure = certify(theta, subset)
        emit(_line(chosen, certificate, failure))
        for note in certificate.notes if certificate else []:
            emit(f"  note: {note}")
        if certificate is not None and request.output_path:
            write_document(certificate, request.output_path)
        return 1 if failure else 0

    workers = params.get("workers") or get_settings().batch_workers
    require(validate_workers(workers))
    subsets = all_subsets(n)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda chosen: certify(theta, chosen), subsets))
    failures = 0
    for subset, certificate, message in results:
        emit(_line(subset, certificate, message))
        failures += bool(message)
        if certificate is not None and request.output_path:
            directory = Path(request.output_path)
            if directory.suffix:
                raise UsageError("--out must name a directory with --all-subsets")
            write_document(certificate, directory / f"certificate-n{n}-{'-'.join(map(str, subset))}.json")
    emit(f"{len(subsets) - failures}/{len(subsets)} subsets certified")
    return 1 if failures else 0


HANDLERS = {("verify", "appendix"): appendix}
