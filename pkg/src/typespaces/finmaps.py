"""Arbitrary functions between standard finite sets {1..m} -> {1..n}.

These index-set maps are the morphisms acting (contravariantly) on the
levels of a truncated symmetric simplicial set.  Everything here is
1-based to keep the coordinate bookkeeping aligned with the level
numbering.
"""

from __future__ import annotations

from dataclasses import dataclass


class MalformedMapError(ValueError):
    """An entry of a FinSetMap lies outside its declared target."""


@dataclass(frozen=True)
class FinSetMap:
    """A function {1..source_size} -> {1..target_size}, stored pointwise."""

    source_size: int
    target_size: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.source_size < 1 or self.target_size < 1:
            raise MalformedMapError("set sizes must be positive")
        if len(self.values) != self.source_size:
            raise MalformedMapError(
                f"expected {self.source_size} values, got {len(self.values)}"
            )
        for v in self.values:
            if not 1 <= v <= self.target_size:
                raise MalformedMapError(
                    f"entry {v} outside 1..{self.target_size}"
                )

    def __call__(self, i: int) -> int:
        return self.values[i - 1]

    def image(self) -> tuple[int, ...]:
        """Image of the map, in increasing order."""
        return tuple(sorted(set(self.values)))

    def is_injective(self) -> bool:
        return len(set(self.values)) == self.source_size

    def is_surjective(self) -> bool:
        return len(set(self.values)) == self.target_size

    def is_identity(self) -> bool:
        return self.source_size == self.target_size and all(
            v == i + 1 for i, v in enumerate(self.values)
        )


def finmap(values, target_size: int) -> FinSetMap:
    values = tuple(values)
    return FinSetMap(len(values), target_size, values)


def identity(n: int) -> FinSetMap:
    return FinSetMap(n, n, tuple(range(1, n + 1)))


def compose(f: FinSetMap, g: FinSetMap) -> FinSetMap:
    """f after g: the map i -> f(g(i)).  Requires g.target == f.source."""
    if g.target_size != f.source_size:
        raise MalformedMapError(
            f"cannot compose: inner target {g.target_size} != outer source {f.source_size}"
        )
    return FinSetMap(g.source_size, f.target_size, tuple(f(g(i)) for i in range(1, g.source_size + 1)))


def adjacent_transposition(n: int, i: int) -> FinSetMap:
    """The bijection of {1..n} swapping i and i+1."""
    if not 1 <= i < n:
        raise MalformedMapError(f"transposition position {i} invalid for size {n}")
    vals = list(range(1, n + 1))
    vals[i - 1], vals[i] = vals[i], vals[i - 1]
    return FinSetMap(n, n, tuple(vals))


def skip(n: int, i: int) -> FinSetMap:
    """The increasing injection {1..n-1} -> {1..n} whose image misses i."""
    if not 1 <= i <= n or n < 2:
        raise MalformedMapError(f"skip position {i} invalid for size {n}")
    return FinSetMap(n - 1, n, tuple(j if j < i else j + 1 for j in range(1, n)))


def duplicate(n: int, i: int) -> FinSetMap:
    """The monotone surjection {1..n+1} -> {1..n} hitting i twice."""
    if not 1 <= i <= n:
        raise MalformedMapError(f"duplicate position {i} invalid for size {n}")
    return FinSetMap(n + 1, n, tuple(j if j <= i else j - 1 for j in range(1, n + 2)))


def front_inclusion(k: int, n: int) -> FinSetMap:
    """{1..k} -> {1..n}, i -> i."""
    if k > n:
        raise MalformedMapError(f"front inclusion needs k <= n, got {k} > {n}")
    return FinSetMap(k, n, tuple(range(1, k + 1)))


def back_inclusion(k: int, n: int) -> FinSetMap:
    """{1..k} -> {1..n}, i -> n - k + i."""
    if k > n:
        raise MalformedMapError(f"back inclusion needs k <= n, got {k} > {n}")
    return FinSetMap(k, n, tuple(range(n - k + 1, n + 1)))


def pick(indices, n: int) -> FinSetMap:
    """The map {1..len(indices)} -> {1..n} selecting the given coordinates."""
    return finmap(indices, n)


def shift(f: FinSetMap, s: int) -> FinSetMap:
    """id_s + f: fixes {1..s} and applies f to the remaining coordinates."""
    head = tuple(range(1, s + 1))
    tail = tuple(v + s for v in f.values)
    return FinSetMap(f.source_size + s, f.target_size + s, head + tail)


def canonical_factorization(f: FinSetMap) -> tuple[FinSetMap, FinSetMap]:
    """Split f as injection . surjection with the image taken in increasing order.

    Returns (surjection, injection) with compose(injection, surjection) == f.
    """
    img = f.image()
    pos = {v: j + 1 for j, v in enumerate(img)}
    surjection = FinSetMap(f.source_size, len(img), tuple(pos[v] for v in f.values))
    injection = FinSetMap(len(img), f.target_size, img)
    return surjection, injection


def generator_decomposition(f: FinSetMap) -> list[FinSetMap]:
    """Write f as a composite of adjacent transpositions, skips and duplicates.

    Returns [g1, ..., gr] with f == g1 . g2 . ... . gr, so that a contravariant
    action evaluates as act(f) = act(gr) . ... . act(g1).
    """
    if f.is_identity():
        return []
    surj, inj = canonical_factorization(f)
    parts: list[FinSetMap] = []

    # Increasing injection = chain of skips, outermost first.  Removing the
    # largest missing slot first keeps the smaller slots' positions stable.
    missing = sorted(set(range(1, inj.target_size + 1)) - set(inj.values), reverse=True)
    size = inj.target_size
    for m in missing:
        parts.append(skip(size, m))
        size -= 1

    # Surjection = monotone surjection (duplicates) after a permutation.
    order = sorted(range(1, surj.source_size + 1), key=lambda i: (surj(i), i))
    mono_vals = tuple(surj(i) for i in order)
    mono = FinSetMap(surj.source_size, surj.target_size, mono_vals)
    dup_chain: list[FinSetMap] = []
    cur = mono
    while cur.source_size > cur.target_size:
        # find a repeat and peel one duplicate off
        rep = next(i for i in range(1, cur.source_size) if cur(i) == cur(i + 1))
        d = duplicate(cur.source_size - 1, rep)
        # cur == prev . d where prev drops the duplicated slot
        prev_vals = cur.values[:rep] + cur.values[rep + 1:]
        prev = FinSetMap(cur.source_size - 1, cur.target_size, prev_vals)
        dup_chain.append(d)
        cur = prev
    # cur is now a monotone bijection, i.e. the identity
    parts.extend(reversed(dup_chain))

    # Permutation sending i -> position of i in `order`: surj == mono . perm
    inv = [0] * surj.source_size
    for slot, i in enumerate(order, start=1):
        inv[i - 1] = slot
    perm = FinSetMap(surj.source_size, surj.source_size, tuple(inv))
    parts.extend(_transposition_chain(perm))
    return parts


def _transposition_chain(perm: FinSetMap) -> list[FinSetMap]:
    """Decompose a bijection into adjacent transpositions (bubble sort)."""
    n = perm.source_size
    vals = list(perm.values)
    swaps = []
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if vals[i] > vals[i + 1]:
                vals[i], vals[i + 1] = vals[i + 1], vals[i]
                swaps.append(adjacent_transposition(n, i + 1))
                changed = True
    # perm == s1 . s2 . ... . sk applied to the identity read right-to-left
    return list(reversed(swaps))
