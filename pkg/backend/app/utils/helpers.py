"""
Combinatorial and rational helpers shared by the schemes and bounds.

Users and files are 1-indexed; a user subset is a sorted tuple and
subsets are always produced in lexicographic order.
"""

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from fractions import Fraction

__all__ = [
    "UserSubset",
    "binom",
    "subsets",
    "subset_label",
    "without",
    "ordered_partitions",
    "multinomial",
    "to_fraction",
    "parse_int_list",
]

UserSubset = tuple[int, ...]


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def subsets(users: int | Iterable[int], size: int) -> list[UserSubset]:
    """All `size`-subsets of `users` (or of 1..users) in lexicographic order."""
    pool = range(1, users + 1) if isinstance(users, int) else sorted(users)
    return list(itertools.combinations(pool, size))


def subset_label(subset: Iterable[int]) -> str:
    """Canonical label: sorted comma-joined indices, '-' for the empty set."""
    items = sorted(subset)
    return ",".join(str(i) for i in items) if items else "-"


def without(subset: UserSubset, user: int) -> UserSubset:
    return tuple(u for u in subset if u != user)


def ordered_partitions(users: Sequence[int], sizes: Sequence[int]) -> Iterator[tuple[UserSubset, ...]]:
    """
    Enumerate ordered set partitions of `users` into classes of `sizes`.

    Classes at different positions are distinguishable even when their
    sizes tie, so the count is len(users)! / prod(size!). Output order is
    lexicographic over the tuple of classes.
    """
    if sum(sizes) != len(users):
        raise ValueError("Sum of class sizes is not equal to the number of users")
    if not sizes:
        yield ()
        return
    head, rest = sizes[0], sizes[1:]
    for first in itertools.combinations(users, head):
        chosen = set(first)
        remaining = [u for u in users if u not in chosen]
        for tail in ordered_partitions(remaining, rest):
            yield (first,) + tail


def multinomial(sizes: Sequence[int]) -> int:
    """Number of ordered partitions with the given class sizes."""
    total = math.factorial(sum(sizes))
    for size in sizes:
        total //= math.factorial(size)
    return total


def to_fraction(value: object) -> Fraction:
    """
    Coerce ints, Fractions and strings such as "3", "1/3" or "0.5" to a Fraction.

    Floats are rejected to keep all delay arithmetic exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("boolean is not a rational number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot interpret {value!r} as an exact rational")


def parse_int_list(text: str | Sequence[int]) -> tuple[int, ...]:
    """Parse "2,2" (or a sequence) into a tuple of ints."""
    if isinstance(text, str):
        parts = [p for p in text.replace(" ", "").split(",") if p]
        return tuple(int(p) for p in parts)
    return tuple(int(p) for p in text)
