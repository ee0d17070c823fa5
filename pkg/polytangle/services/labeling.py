"""Knot-space labelings and the eventual-agreement obstruction.

Triples (i, j, n) index the knot spaces inserted along plane j of end i at
depth n. A labeling assigns a bit to each triple, and the bit selects one of
two twist knots for that slot. Two labelings give homeomorphic manifolds
only if, for every plane (i, j), their bit sequences agree from some depth
on.

Twist knots are numbered by half-twists k; k = 1 (trefoil) and k = 2
(figure eight) are never used. The catalog pairs (i, j, n, p) with
k = 3 + 2 * pair(pair(i - 1, j - 1), n - 1) + p, where pair is the Cantor
pairing function.
"""

import math
import random
from typing import Optional

from polytangle.utils.exceptions import ShapeMismatch
from polytangle.utils.logger import get_logger
from polytangle.utils.models import (
    AgreementResult,
    BinaryLabeling,
    EventuallyPeriodic,
    ObstructionReport,
    SlotLabel,
    TripleIndex,
    TwistKnot,
    TwistKnotCatalog,
)

logger = get_logger(__name__)

FIRST_PARAMETER = 3
TWIST_KNOT_NAMES = {1: "3_1", 2: "4_1", 3: "5_2", 4: "6_1", 5: "7_2", 6: "8_1", 7: "9_2", 8: "10_1"}


# =============================================================================
# Catalog
# =============================================================================

def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(value: int) -> tuple[int, int]:
    diagonal = (math.isqrt(8 * value + 1) - 1) // 2
    b = value - diagonal * (diagonal + 1) // 2
    return diagonal - b, b


def twist_knot_name(parameter: int) -> str:
    """Rolfsen name for small twist knots, ``twist(k)`` beyond the table."""
    return TWIST_KNOT_NAMES.get(parameter, f"twist({parameter})")


def catalog_assign(i: int, j: int, n: int, p: int, mu: Optional[int] = None,
                   nu: Optional[list[int]] = None) -> int:
    """Twist-knot parameter of the slot (i, j, n) carrying bit p.

    Args:
        i, j, n: Triple indices, all at least 1
        p: Label bit, 0 or 1
        mu, nu: Optional shape; when given, i and j are range-checked against it

    Returns:
        Number of half-twists, at least 3

    Raises:
        ValueError: If an index is out of range
    """
    if min(i, j, n) < 1 or p not in (0, 1):
        raise ValueError(f"invalid catalog index ({i}, {j}, {n}, {p})")
    if mu is not None and i > mu:
        raise ValueError(f"end {i} outside [1, {mu}]")
    if nu is not None and j > nu[i - 1]:
        raise ValueError(f"plane {j} outside [1, {nu[i - 1]}] for end {i}")
    return FIRST_PARAMETER + 2 * cantor_pair(cantor_pair(i - 1, j - 1), n - 1) + p


def catalog_lookup(parameter: int) -> TwistKnot:
    """Invert catalog_assign.

    Raises:
        ValueError: If the parameter is one of the excluded knots
    """
    if parameter < FIRST_PARAMETER:
        raise ValueError(f"twist parameter {parameter} is excluded from the catalog")
    pair, p = divmod(parameter - FIRST_PARAMETER, 2)
    plane, depth = cantor_unpair(pair)
    end, slot = cantor_unpair(plane)
    return TwistKnot(parameter=parameter, name=twist_knot_name(parameter),
                     index=TripleIndex(i=end + 1, j=slot + 1, n=depth + 1), p=p)


def build_catalog(count: int) -> TwistKnotCatalog:
    """The first ``count`` catalog entries in parameter order."""
    return TwistKnotCatalog(entries=[catalog_lookup(FIRST_PARAMETER + k) for k in range(count)])


def knot_sequence(labeling: BinaryLabeling, i: int, j: int, length: int) -> list[TwistKnot]:
    """Knots inserted along plane (i, j) at depths 1..length."""
    sequence = labeling.sequence(i, j)
    return [catalog_lookup(catalog_assign(i, j, n, sequence.value(n), labeling.mu, labeling.nu))
            for n in range(1, length + 1)]


# =============================================================================
# Agreement
# =============================================================================

def eventual_agreement(phi: BinaryLabeling, psi: BinaryLabeling, slot: tuple[int, int]) -> AgreementResult:
    """Decide whether the two bit sequences of a plane agree from some depth on.

    Past the longer prefix both sequences repeat with period L = lcm of the
    two periods, so one window of L terms decides the question.

    Returns:
        agrees_from (least such index) when they agree eventually; otherwise
        infinite_disagreement with the residues (n - 1) mod L where they
        differ forever
    """
    first, second = phi.sequence(*slot), psi.sequence(*slot)
    modulus = math.lcm(len(first.period), len(second.period))
    settled = max(len(first.prefix), len(second.prefix))
    window = range(settled + 1, settled + modulus + 1)
    residues = sorted((n - 1) % modulus for n in window if first.value(n) != second.value(n))
    if residues:
        return AgreementResult(slot=slot, infinite_disagreement=True, witness_residues=residues, modulus=modulus)
    last = max((n for n in range(1, settled + 1) if first.value(n) != second.value(n)), default=0)
    return AgreementResult(slot=slot, agrees_from=last + 1, modulus=modulus)


def homeomorphism_obstruction(phi: BinaryLabeling, psi: BinaryLabeling) -> ObstructionReport:
    """List the planes whose sequences disagree infinitely often.

    Raises:
        ShapeMismatch: If the labelings have different (mu, nu)
    """
    if phi.mu != psi.mu or phi.nu != psi.nu:
        raise ShapeMismatch(f"shapes ({phi.mu}, {phi.nu}) and ({psi.mu}, {psi.nu}) differ")
    results = [eventual_agreement(phi, psi, (slot.i, slot.j)) for slot in phi.slots]
    slots = [result.slot for result in results if result.infinite_disagreement]
    return ObstructionReport(obstructed=bool(slots), slots=slots, results=results)


def generate_family(r: int, seed: int, mu: int = 1, nu: Optional[list[int]] = None) -> list[BinaryLabeling]:
    """r labelings whose manifolds are pairwise obstructed from being homeomorphic.

    Plane (1, 1) of member k repeats the binary digits of k forever behind a
    random prefix a whole number of periods long. The other planes share one
    random sequence across the family.

    Raises:
        ValueError: If r < 2
    """
    if r < 2:
        raise ValueError(f"a family needs at least 2 labelings, got {r}")
    nu = nu or [1] * mu
    rng = random.Random(seed)
    width = max(1, (r - 1).bit_length())
    shared = {
        (i, j): EventuallyPeriodic(prefix=[rng.randint(0, 1) for _ in range(rng.randint(0, 3))],
                                   period=[rng.randint(0, 1) for _ in range(rng.randint(1, 3))])
        for i in range(1, mu + 1) for j in range(1, nu[i - 1] + 1)
    }
    family = []
    for k in range(r):
        digits = [(k >> bit) & 1 for bit in reversed(range(width))]
        # whole periods of prefix keep the digit words in phase
        prefix = [rng.randint(0, 1) for _ in range(width * rng.randint(0, 2))]
        own = EventuallyPeriodic(prefix=prefix, period=digits)
        slots = [SlotLabel(i=i, j=j, sequence=own if (i, j) == (1, 1) else sequence)
                 for (i, j), sequence in shared.items()]
        family.append(BinaryLabeling(mu=mu, nu=nu, slots=slots))
    logger.info(f"Generated a family of {r} labelings with period width {width}")
    return family


if __name__ == "__main__":
    print([catalog_assign(1, 1, 1, p) for p in (0, 1)], catalog_lookup(7).model_dump())
    a, b = generate_family(2, seed=1)
    print(homeomorphism_obstruction(a, b).slots)
