"""Integer partitions, box statistics and Pochhammer symbols.

Partitions are stored as tuples of weakly decreasing positive integers.
Boxes are addressed by 1-based ``(row, column)`` pairs, following the usual
English convention for Young diagrams.  For a box ``(i, j)`` of ``kappa``

* arm   ``a  = kappa_i - j``            (boxes to the right),
* leg   ``l  = kappa'_j - i``           (boxes below),
* coarm ``a' = j - 1``                  (boxes to the left),
* coleg ``l' = i - 1``                  (boxes above),

where ``kappa'`` is the conjugate partition.

All arithmetic helpers are written generically so that ``fractions.Fraction``
inputs stay exact; this is what allows the partition-sum formulas in
:mod:`jointmoments.limits` to be evaluated in rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

from scipy import special

__all__ = [
    "BoxStats",
    "Partition",
    "box_stats",
    "count_partitions",
    "enumerate_partitions",
    "gen_pochhammer",
    "log_pochhammer",
    "partitions_of",
    "pochhammer",
]


class BoxStats(NamedTuple):
    """Arm, leg, co-arm and co-leg of one box."""

    arm: int
    leg: int
    coarm: int
    coleg: int


@dataclass(frozen=True, order=False)
class Partition:
    """A Young diagram.

    Parameters
    ----------
    parts : tuple of int
        Weakly decreasing positive integers.  The empty tuple is the empty
        partition.

    Examples
    --------
    >>> kappa = Partition((4, 2, 1))
    >>> kappa.weight, kappa.num_parts
    (7, 3)
    >>> kappa.conjugate().parts
    (3, 2, 1, 1)
    """

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(parts[k] < parts[k + 1] for k in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        """Number of boxes, ``|kappa|``."""
        return sum(self.parts)

    @property
    def num_parts(self) -> int:
        """Number of nonzero parts, ``l(kappa)``."""
        return len(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, i: int) -> int:
        return self.parts[i]

    def __repr__(self) -> str:
        return f"Partition({self.parts!r})"

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")" if self.parts else "()"

    def part(self, i: int) -> int:
        """The ``i``-th part with 1-based indexing, zero beyond the length."""
        if i < 1:
            raise IndexError("parts are indexed from 1")
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def conjugate(self) -> "Partition":
        """Transpose of the diagram."""
        if not self.parts:
            return self
        return Partition(
            tuple(sum(1 for p in self.parts if p >= j) for j in range(1, self.parts[0] + 1))
        )

    def boxes(self) -> Iterator[tuple[int, int]]:
        """Iterate over boxes ``(i, j)`` row by row, 1-based."""
        for i, p in enumerate(self.parts, start=1):
            for j in range(1, p + 1):
                yield i, j

    def contains(self, i: int, j: int) -> bool:
        return 1 <= i <= len(self.parts) and 1 <= j <= self.parts[i - 1]

    def box_stats(self) -> Iterator[tuple[tuple[int, int], BoxStats]]:
        """Iterate over ``((i, j), BoxStats)`` for every box."""
        conj = self.conjugate().parts
        for i, j in self.boxes():
            yield (i, j), BoxStats(self.parts[i - 1] - j, conj[j - 1] - i, j - 1, i - 1)


def box_stats(kappa: Partition, i: int, j: int) -> BoxStats:
    """Arm, leg, co-arm and co-leg of box ``(i, j)``.

    Parameters
    ----------
    kappa : Partition
    i, j : int
        1-based row and column of a box of ``kappa``.

    Returns
    -------
    BoxStats

    Raises
    ------
    ValueError
        If ``(i, j)`` is not a box of ``kappa``.
    """
    kappa = _as_partition(kappa)
    if not kappa.contains(i, j):
        raise ValueError(f"({i}, {j}) is not a box of {kappa}")
    column = sum(1 for p in kappa.parts if p >= j)
    return BoxStats(kappa.parts[i - 1] - j, column - i, j - 1, i - 1)


def _as_partition(kappa) -> Partition:
    return kappa if isinstance(kappa, Partition) else Partition(tuple(kappa))


@lru_cache(maxsize=None)
def _partitions_exact(n: int, max_part: int, max_parts: int | None) -> tuple[tuple[int, ...], ...]:
    """Partitions of exactly ``n`` with parts ``<= max_part``, reverse-lex order."""
    if n == 0:
        return ((),)
    if max_parts == 0:
        return ()
    out = []
    rest_parts = None if max_parts is None else max_parts - 1
    for first in range(min(n, max_part), 0, -1):
        for tail in _partitions_exact(n - first, first, rest_parts):
            out.append((first,) + tail)
    return tuple(out)


def partitions_of(n: int, max_parts: int | None = None) -> list[Partition]:
    """All partitions of weight exactly ``n`` in reverse-lexicographic order."""
    if n < 0:
        raise ValueError("weight must be nonnegative")
    return [Partition(p) for p in _partitions_exact(n, n, max_parts)]


def enumerate_partitions(max_weight: int, max_parts: int | None = None) -> list[Partition]:
    """Every partition with weight ``<= max_weight`` and at most ``max_parts`` parts.

    The order is weight-major (ascending) and, within a weight,
    reverse-lexicographic, e.g. ``(), (1), (2), (1,1), (3), (2,1), (1,1,1)``.

    Parameters
    ----------
    max_weight : int
        Largest weight, ``>= 0``.
    max_parts : int or None
        Bound on the number of parts; ``None`` means unbounded.
    """
    if max_weight < 0:
        raise ValueError("max_weight must be nonnegative")
    if max_parts is not None and max_parts < 0:
        raise ValueError("max_parts must be nonnegative")
    out: list[Partition] = []
    for n in range(max_weight + 1):
        out.extend(partitions_of(n, max_parts))
    return out


def pochhammer(x, k: int):
    """Rising factorial ``(x)_k = x (x+1) ... (x+k-1)``.

    Works for int, float, complex and :class:`fractions.Fraction` inputs;
    the result has the type produced by repeated multiplication, so exact
    zeros propagate exactly.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 1
    for j in range(k):
        out = out * (x + j)
    return out


def log_pochhammer(x: float, k: int) -> float:
    """``log (x)_k`` for real ``x > 0``, computed as a Gamma-function ratio."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if x <= 0:
        raise ValueError("log_pochhammer requires x > 0")
    return float(special.gammaln(x + k) - special.gammaln(x))


def gen_pochhammer(x, kappa, alpha):
    """Generalized Pochhammer symbol ``prod_j (x - (j-1)/alpha)_{kappa_j}``.

    The product runs over parts ``j = 1 .. l(kappa)`` with 1-based indexing, so
    the first part carries no shift.

    Parameters
    ----------
    x : number
    kappa : Partition or sequence of int
    alpha : positive number

    Examples
    --------
    >>> from fractions import Fraction
    >>> gen_pochhammer(Fraction(4), Partition((1, 1)), Fraction(1))
    Fraction(12, 1)
    """
    kappa = _as_partition(kappa)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    inv = 1 / alpha
    out = 1
    for j, p in enumerate(kappa.parts):
        out = out * pochhammer(x - j * inv, p)
    return out


def count_partitions(max_weight: int, max_parts: int | None = None) -> int:
    """Number of partitions counted by :func:`enumerate_partitions`."""
    total = 0
    for n in range(max_weight + 1):
        total += len(_partitions_exact(n, n, max_parts))
    return total

