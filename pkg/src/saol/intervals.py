"""Dyadic covering intervals and the geometric covering partition.

The covering family is the union over levels ``k >= 0`` of the intervals
``[i * 2**k, (i + 1) * 2**k - 1]`` for ``i >= 1``. Nothing is materialized:
membership and enumeration are computed from divisibility by powers of two.
Rounds are 1-based and intervals are closed on both ends.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, order=True)
class DyadicInterval:
    q: int
    s: int
    k: int = field(default=-1, compare=False)

    def __post_init__(self) -> None:
        if self.q < 1 or self.s < self.q:
            raise ValueError(f"invalid interval [{self.q},{self.s}]")
        size = self.s - self.q + 1
        if size & (size - 1):
            raise ValueError(f"[{self.q},{self.s}] has size {size}, not a power of two")
        k = size.bit_length() - 1
        if self.k == -1:
            object.__setattr__(self, "k", k)
        elif self.k != k:
            raise ValueError(f"level {self.k} inconsistent with size {size}")
        if self.q % size or self.q < size:
            raise ValueError(f"[{self.q},{self.s}] is not in the covering family")

    def __len__(self) -> int:
        return 1 << self.k

    def __contains__(self, t: int) -> bool:
        return self.q <= t <= self.s

    def __repr__(self) -> str:
        return f"[{self.q},{self.s}]"


@dataclass(frozen=True)
class GeometricPartition:
    """``left`` is I_{-k}, ..., I_0 in time order; ``right`` is I_1, ..., I_p."""

    left: tuple[DyadicInterval, ...]
    right: tuple[DyadicInterval, ...]

    @property
    def intervals(self) -> tuple[DyadicInterval, ...]:
        return self.left + self.right

    @property
    def anchor(self) -> DyadicInterval:
        return self.left[-1]


def is_member(q: int, s: int) -> bool:
    """Whether ``[q, s]`` belongs to the covering family."""
    if q < 1 or s < q:
        return False
    size = s - q + 1
    return not (size & (size - 1)) and q % size == 0 and q >= size


def level_interval(k: int, i: int) -> DyadicInterval:
    if k < 0:
        raise ValueError("level must be non-negative")
    if i < 1:
        raise ValueError("index i starts at 1; level-k intervals begin at 2**k")
    size = 1 << k
    return DyadicInterval(i * size, (i + 1) * size - 1, k)


def active_set(t: int) -> list[DyadicInterval]:
    """All covering intervals containing round ``t``, by increasing level."""
    if t < 1:
        raise ValueError("rounds start at 1")
    out = []
    for k in range(t.bit_length()):
        q = (t >> k) << k
        out.append(DyadicInterval(q, q + (1 << k) - 1, k))
    return out


def entering_set(t: int) -> list[DyadicInterval]:
    """All covering intervals that start at round ``t``, by increasing level."""
    if t < 1:
        raise ValueError("rounds start at 1")
    out = []
    k = 0
    while t % (1 << k) == 0 and t >= (1 << k):
        out.append(DyadicInterval(t, t + (1 << k) - 1, k))
        k += 1
    return out


def _largest_ending_at(end: int, lo: int) -> DyadicInterval:
    # [end + 1 - 2**k, end] is a member iff 2**k divides end + 1 and
    # end + 1 >= 2**(k+1); it must also start at or after lo.
    n = end + 1
    k = 0
    while n % (2 << k) == 0 and n >= (4 << k) and n - (2 << k) >= lo:
        k += 1
    return DyadicInterval(n - (1 << k), end, k)


def _largest_starting_at(start: int, hi: int) -> DyadicInterval:
    k = 0
    while start % (2 << k) == 0 and start >= (2 << k) and start + (2 << k) - 1 <= hi:
        k += 1
    return DyadicInterval(start, start + (1 << k) - 1, k)


def _leftmost_largest(q: int, s: int) -> DyadicInterval:
    for k in range((s - q + 1).bit_length() - 1, -1, -1):
        size = 1 << k
        start = max(-(-q // size), 1) * size
        if start + size - 1 <= s:
            return DyadicInterval(start, start + size - 1, k)
    raise AssertionError("unreachable: singletons are always members")


def geometric_partition(q: int, s: int) -> GeometricPartition:
    """Split ``[q, s]`` into two runs of covering intervals with halving sizes.

    ``I_0`` is the leftmost member of maximal size inside ``[q, s]``. Moving
    left from it, each step takes the largest member ending at the current
    frontier; moving right, the largest member starting at the frontier. The
    greedy choice is unique because members sharing an endpoint have
    distinct power-of-two sizes.
    """
    if q < 1 or s < q:
        raise ValueError(f"need 1 <= q <= s, got [{q},{s}]")
    anchor = _leftmost_largest(q, s)
    left = [anchor]
    frontier = anchor.q - 1
    while frontier >= q:
        piece = _largest_ending_at(frontier, q)
        left.append(piece)
        frontier = piece.q - 1
    right = []
    frontier = anchor.s + 1
    while frontier <= s:
        piece = _largest_starting_at(frontier, s)
        right.append(piece)
        frontier = piece.s + 1
    return GeometricPartition(tuple(reversed(left)), tuple(right))


def members_within(q: int, s: int) -> list[DyadicInterval]:
    """Every covering interval contained in ``[q, s]``, ordered by (start, size)."""
    out = []
    for k in range((s - q + 1).bit_length()):
        size = 1 << k
        start = max(-(-q // size), 1) * size
        while start + size - 1 <= s:
            out.append(DyadicInterval(start, start + size - 1, k))
            start += size
    out.sort(key=lambda iv: (iv.q, iv.k))
    return out
