"""Bounded-level stability tests: the order property, the gap between
order-indiscernible and set-indiscernible patterns, and dividing of a
type at finite approximation length.

Finite stand-in for an indiscernible sequence: an element of level n*L,
read as L blocks of width n, is order-coherent when all increasing
block selections of equal length give equal restrictions.  Results are
always relative to the stated length, never an infinitary claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .finmaps import FinSetMap, back_inclusion, front_inclusion, pick
from .core import TruncatedSymSS, TruncationError
from .theories import simplex_search


@dataclass(frozen=True)
class OrderWitness:
    """An element of level 2dN whose (a_i, b_j) restrictions follow the
    i <= j pattern with respect to a definable set."""

    N: int
    d: int
    element: object
    a_blocks: tuple
    b_blocks: tuple


@dataclass(frozen=True)
class IndiscernibleWitness:
    """An order-coherent element of level n*L that some block permutation
    moves."""

    L: int
    n: int
    element: object
    permutation: tuple


@dataclass(frozen=True)
class DividesReport:
    divides: bool
    L: int
    k: int
    witness_pattern: object = None
    patterns_checked: int = 0


def _block_coords(width: int, block: int, offset: int = 0) -> list[int]:
    """1-based coordinates of the given block (1-based) of the given width."""
    start = offset + (block - 1) * width
    return list(range(start + 1, start + width + 1))


def _pair_map(d: int, N: int, i: int, j: int) -> FinSetMap:
    """Select block a_i then block b_j inside the (a_1, b_1, .., a_N, b_N)
    layout of level 2dN."""
    a = _block_coords(d, 2 * i - 1)
    b = _block_coords(d, 2 * j)
    return pick(a + b, 2 * d * N)


def order_property(T: TruncatedSymSS, phi, N: int, d: int = 1
                   ) -> Optional[OrderWitness]:
    """Search for t in level 2dN with restriction to (a_i, b_j) inside phi
    exactly when i <= j.

    phi is a subset of level 2d given extensionally.  Non-membership is
    compiled by complementation within the finite level.
    """
    phi = frozenset(phi)
    level = 2 * d * N
    if level > T.max_dim:
        raise TruncationError(f"need level {level}, truncation is {T.max_dim}")
    full = frozenset(T.level(2 * d))
    if not phi <= full:
        raise ValueError("phi is not a subset of its level")
    complement = full - phi
    constraints = []
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            allowed = phi if i <= j else complement
            if not allowed:
                return None
            constraints.append((_pair_map(d, N, i, j), allowed))
    t = simplex_search(T, level, constraints)
    if t is None:
        return None
    return OrderWitness(
        N=N, d=d, element=t,
        a_blocks=tuple(tuple(_block_coords(d, 2 * i - 1)) for i in range(1, N + 1)),
        b_blocks=tuple(tuple(_block_coords(d, 2 * j)) for j in range(1, N + 1)),
    )


def order_witness_valid(T: TruncatedSymSS, phi, w: OrderWitness) -> bool:
    phi = frozenset(phi)
    for i in range(1, w.N + 1):
        for j in range(1, w.N + 1):
            r = T.act(_pair_map(w.d, w.N, i, j), w.element)
            if (r in phi) != (i <= j):
                return False
    return True


def _select_blocks(n: int, L: int, blocks) -> FinSetMap:
    coords = []
    for b in blocks:
        coords.extend(_block_coords(n, b))
    return pick(coords, n * L)


def _block_permutation_map(n: int, L: int, perm: tuple) -> FinSetMap:
    """The reindexing of n*L coordinates moving block i to block perm[i-1]."""
    values = []
    for i in range(1, L + 1):
        values.extend(_block_coords(n, perm[i - 1]))
    return pick(values, n * L)


def order_coherent(T: TruncatedSymSS, t, n: int, L: int) -> bool:
    """All increasing block selections of equal length restrict equally."""
    for r in range(1, L):
        seen = None
        for blocks in combinations(range(1, L + 1), r):
            val = T.act(_select_blocks(n, L, blocks), t)
            if seen is None:
                seen = val
            elif val != seen:
                return False
    return True


def indiscernible_gap(T: TruncatedSymSS, n: int, L: int
                      ) -> Optional[IndiscernibleWitness]:
    """An order-coherent element of level n*L that is not invariant under
    all block permutations, or None.

    Invariance under adjacent block transpositions generates invariance
    under the whole symmetric group, so only those are probed; the
    violating transposition is returned.
    """
    level = n * L
    if level > T.max_dim:
        raise TruncationError(f"need level {level}, truncation is {T.max_dim}")
    swaps = []
    for i in range(1, L):
        perm = list(range(1, L + 1))
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
        swaps.append((tuple(perm), _block_permutation_map(n, L, tuple(perm))))
    for t in T.level(level):
        if not order_coherent(T, t, n, L):
            continue
        for perm, f in swaps:
            if T.act(f, t) != t:
                return IndiscernibleWitness(L=L, n=n, element=t, permutation=perm)
    return None


def coherent_patterns(T: TruncatedSymSS, block_type, n: int, L: int):
    """Order-coherent elements of level n*L whose blocks all restrict to
    the given width-n type."""
    level = n * L
    out = []
    for t in T.level(level):
        first = T.act(_select_blocks(n, L, (1,)), t)
        if first != block_type:
            continue
        if order_coherent(T, t, n, L):
            out.append(t)
    return out


def divides_at_level(T: TruncatedSymSS, p, split: tuple[int, int], L: int,
                     k: int) -> DividesReport:
    """Dividing of the type p = tp(x/y) over the empty set, at length L
    with k-inconsistency.

    p lives at level m+n with the x-block first.  The test looks for an
    order-coherent L-sequence pattern of copies of the y-type such that no
    element of level m + n*k realizes p on the x-block paired with each of
    the first k copies (order-coherence makes any k-subset equivalent to
    the first k).
    """
    m, n = split
    if m < 1 or n < 1:
        raise ValueError("split must put at least one variable on each side")
    if k < 1 or k > L:
        raise ValueError("need 1 <= k <= L")
    if p not in T.level(m + n):
        raise ValueError("p is not an element of its stated level")
    if n * L > T.max_dim or m + n * k > T.max_dim:
        raise TruncationError("truncation too small for the requested lengths")
    y_type = T.act(back_inclusion(n, m + n), p)
    patterns = coherent_patterns(T, y_type, n, L)
    checked = 0
    for s in patterns:
        checked += 1
        s_k = T.act(front_inclusion(n * k, n * L), s)
        constraints = [(back_inclusion(n * k, m + n * k), s_k)]
        for i in range(1, k + 1):
            coords = list(range(1, m + 1)) + _block_coords(n, i, offset=m)
            constraints.append((pick(coords, m + n * k), p))
        r = simplex_search(T, m + n * k, constraints)
        if r is None:
            return DividesReport(divides=True, L=L, k=k, witness_pattern=s,
                                 patterns_checked=checked)
    return DividesReport(divides=False, L=L, k=k, patterns_checked=checked)
