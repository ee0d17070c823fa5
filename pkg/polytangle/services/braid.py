"""Braid words on 3n strands and the composite block generators Sigma_t.

Strands are grouped in threes: group g holds strands 3g - 2, 3g - 1, 3g.
Sigma_t passes group t across group t + 1 in front. All of its nine letters
are positive generators, and a positive sigma_k is drawn with the strand
moving right (from position k to k + 1) in front, i.e. at larger y.
"""

from pydantic import ValidationError

from polytangle.utils.logger import get_logger
from polytangle.utils.models import BraidLetter, BraidWord, GroupBlockWord, StrandPermutation

logger = get_logger(__name__)

# Offsets of Sigma_t's letters from 3t
SIGMA_OFFSETS = (0, -1, 1, -2, 0, 2, -1, 1, 0)


def expand_group_letter(t: int, n: int) -> BraidWord:
    """Expand Sigma_t into its nine positive Artin generators on 3n strands.

    Args:
        t: Group index, 1 <= t <= n - 1
        n: Number of groups

    Returns:
        BraidWord with letters 3t, 3t-1, 3t+1, 3t-2, 3t, 3t+2, 3t-1, 3t+1, 3t

    Raises:
        ValueError: If t is out of range
    """
    if n < 2 or not 1 <= t <= n - 1:
        raise ValueError(f"group index {t} outside [1, {n - 1}]")
    letters = [BraidLetter(generator=3 * t + offset, sign=1) for offset in SIGMA_OFFSETS]
    return BraidWord(strand_count=3 * n, letters=letters)


def expand_word(word: GroupBlockWord) -> BraidWord:
    """Expand every Sigma letter of a block word, top to bottom."""
    letters: list[BraidLetter] = []
    for t in word.letters:
        letters.extend(expand_group_letter(t, word.group_count).letters)
    return BraidWord(strand_count=3 * word.group_count, letters=letters)


def half_twist_sequence(n: int) -> GroupBlockWord:
    """The block word (1..n-1)(1..n-2)...(1, 2)(1) realizing a half twist.

    Args:
        n: Number of groups, at least 2

    Returns:
        GroupBlockWord of length (n^2 - n)/2

    Raises:
        ValueError: If n < 2
    """
    if n < 2:
        raise ValueError(f"half twist needs at least 2 groups, got {n}")
    letters = [t for top in range(n - 1, 0, -1) for t in range(1, top + 1)]
    return GroupBlockWord(group_count=n, letters=letters)


def _track_positions(size: int, swaps: list[int]) -> StrandPermutation:
    # at[position] = strand currently there
    at = list(range(size + 1))
    for k in swaps:
        at[k], at[k + 1] = at[k + 1], at[k]
    image = [0] * size
    for position in range(1, size + 1):
        image[at[position] - 1] = position
    return StrandPermutation(size=size, image=image)


def induced_strand_permutation(word: BraidWord) -> StrandPermutation:
    """Top position to bottom position of every strand of the geometric braid."""
    return _track_positions(word.strand_count, [letter.generator for letter in word.letters])


def induced_group_permutation(word: GroupBlockWord) -> StrandPermutation:
    """Composition of the group transpositions (t, t + 1), top to bottom."""
    return _track_positions(word.group_count, list(word.letters))


def compose(first: StrandPermutation, second: StrandPermutation) -> StrandPermutation:
    """Apply ``first`` then ``second``."""
    if first.size != second.size:
        raise ValueError(f"cannot compose permutations of sizes {first.size} and {second.size}")
    return StrandPermutation(size=first.size, image=[second.apply(first.apply(k)) for k in range(1, first.size + 1)])


def restrict_to_groups(permutation: StrandPermutation) -> StrandPermutation:
    """Read a strand permutation on 3n strands as a permutation of groups.

    Raises:
        ValueError: If some group is split or its strands change order
    """
    if permutation.size % 3:
        raise ValueError("strand count is not a multiple of three")
    groups = permutation.size // 3
    image = []
    for g in range(1, groups + 1):
        landing = [permutation.apply(3 * g - offset) for offset in (2, 1, 0)]
        h = (landing[0] + 2) // 3
        if landing != [3 * h - 2, 3 * h - 1, 3 * h]:
            raise ValueError(f"group {g} does not land in order on a group: {landing}")
        image.append(h)
    try:
        return StrandPermutation(size=groups, image=image)
    except ValidationError as exc:
        raise ValueError("group images are not a permutation") from exc


def braid_crossing_count(word: BraidWord) -> int:
    """Each letter contributes exactly one crossing to the y-projection."""
    return len(word.letters)


if __name__ == "__main__":
    sigma = expand_group_letter(1, 2)
    print([letter.generator for letter in sigma.letters])
    print(induced_strand_permutation(sigma).image)
    twist = half_twist_sequence(4)
    print(twist.letters, induced_group_permutation(twist).image)
