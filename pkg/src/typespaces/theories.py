"""Builtin theories with finite type spaces, group quotients, and
constraint search over simplices.

Canonical encodings: set partitions are restricted-growth sequences,
weak orders are dense rank vectors, graphs are sorted edge lists over
block indices, and linear-relation systems over F2 are the sorted tuple
of index subsets (bitmasks) summing to zero.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Optional, Sequence

from .finmaps import FinSetMap, pick
from .core import OracleFunctor, TruncatedSymSS, TruncationError

BUILTIN_NAMES = ("equality", "dlo", "random_graph", "vect_f2", "point")
DEFAULT_TRUNCATION = {"equality": 6, "dlo": 6, "random_graph": 6, "vect_f2": 5,
                      "point": 6}


# -- canonical forms -------------------------------------------------------

def normalize_rgs(seq) -> tuple[int, ...]:
    """Relabel block ids by first occurrence: the restricted-growth form."""
    seen: dict = {}
    out = []
    for x in seq:
        if x not in seen:
            seen[x] = len(seen)
        out.append(seen[x])
    return tuple(out)


def normalize_ranks(seq) -> tuple[int, ...]:
    """Dense ranks 0..k-1 preserving the order of the given keys."""
    vals = tuple(seq)
    ranking = {v: r for r, v in enumerate(sorted(set(vals)))}
    return tuple(ranking[v] for v in vals)


def partitions(n: int):
    """All set partitions of {1..n} as restricted-growth sequences."""
    def rec(prefix, maxblock):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(maxblock + 2):
            prefix.append(b)
            yield from rec(prefix, max(maxblock, b))
            prefix.pop()
    yield from rec([], -1)


def _extension_levels(n, seeds, extend):
    level = list(seeds)
    for m in range(2, n + 1):
        level = [u for t in level for u in extend(m - 1, t)]
    return level


# -- equality --------------------------------------------------------------

def _equality_act(f: FinSetMap, p):
    return normalize_rgs(p[f(i) - 1] for i in range(1, f.source_size + 1))


def _equality_extend(n, p):
    for b in range(max(p) + 2):
        yield p + (b,)


# -- dense linear orders (weak orders as level elements) --------------------

def _dlo_act(f: FinSetMap, r):
    return normalize_ranks(r[f(i) - 1] for i in range(1, f.source_size + 1))


def _dlo_extend(n, r):
    """The new point joins one of the k rank classes or one of the k+1 gaps."""
    k = max(r) + 1
    for slot in range(2 * k + 1):
        cls, kind = divmod(slot, 2)
        if kind == 1:
            yield r + (cls,)
        else:
            shifted = tuple(v + 1 if v >= cls else v for v in r)
            yield shifted + (cls,)
    yield tuple(r) + (k,)


def weak_orders(n: int):
    """All weak orders on {1..n} as dense rank vectors."""
    return iter(_extension_levels(n, [(0,)], _dlo_extend))


# -- random graph -----------------------------------------------------------

def _graphs_on(k):
    pairs = list(combinations(range(k), 2))
    for bits in range(1 << len(pairs)):
        yield tuple(p for j, p in enumerate(pairs) if bits >> j & 1)


def _random_graph_enumerate(n):
    for p in partitions(n):
        k = max(p) + 1
        for e in _graphs_on(k):
            yield (p, e)


def _random_graph_act(f: FinSetMap, t):
    p, edges = t
    raw = [p[f(i) - 1] for i in range(1, f.source_size + 1)]
    relabel: dict = {}
    for b in raw:
        if b not in relabel:
            relabel[b] = len(relabel)
    new_edges = sorted(set(
        (min(relabel[a], relabel[b]), max(relabel[a], relabel[b]))
        for a, b in edges if a in relabel and b in relabel
    ))
    return (tuple(relabel[b] for b in raw), tuple(new_edges))


def _random_graph_extend(n, t):
    p, edges = t
    k = max(p) + 1
    for b in range(k):
        yield (p + (b,), edges)
    for attach in range(1 << k):
        extra = tuple((b, k) for b in range(k) if attach >> b & 1)
        yield (p + (k,), tuple(sorted(edges + extra)))


# -- vector spaces over F2 ---------------------------------------------------

def _vect_f2_act(f: FinSetMap, z):
    """An index subset sums to zero downstairs iff the subset of upstairs
    indices hit an odd number of times sums to zero."""
    zset = set(z)
    m = f.source_size
    out = []
    for mask in range(1 << m):
        image = 0
        for i in range(1, m + 1):
            if mask >> (i - 1) & 1:
                image ^= 1 << (f(i) - 1)
        if image in zset:
            out.append(mask)
    return tuple(sorted(out))


def _vect_f2_extend(n, z):
    """The new vector is either independent of the old ones or equal to a
    subset sum; distinct cosets of the relation space give distinct systems."""
    yield tuple(z)
    bit = 1 << n
    seen = set()
    for rep in range(1 << n):
        coset = tuple(sorted(x ^ rep for x in z))
        if coset in seen:
            continue
        seen.add(coset)
        yield tuple(sorted(set(z) | {x ^ rep ^ bit for x in z}))


def _vect_f2_enumerate(n):
    return iter(sorted(_extension_levels(n, [(0,), (0, 1)], _vect_f2_extend)))


# -- construction ------------------------------------------------------------

def builtin(name: str, max_dim: Optional[int] = None) -> OracleFunctor:
    """One of the shipped theories, truncated at max_dim."""
    if name not in BUILTIN_NAMES:
        raise ValueError(f"unknown builtin {name!r}; choose from {BUILTIN_NAMES}")
    d = DEFAULT_TRUNCATION[name] if max_dim is None else max_dim
    if d < 1:
        raise TruncationError("max_dim must be positive")
    if name == "equality":
        return OracleFunctor("equality", d, partitions, _equality_act,
                             extend=_equality_extend)
    if name == "dlo":
        return OracleFunctor("dlo", d,
                             lambda n: weak_orders(n), _dlo_act,
                             extend=_dlo_extend)
    if name == "random_graph":
        return OracleFunctor("random_graph", d, _random_graph_enumerate,
                             _random_graph_act, extend=_random_graph_extend)
    if name == "vect_f2":
        return OracleFunctor("vect_f2", d, _vect_f2_enumerate, _vect_f2_act,
                             extend=_vect_f2_extend)
    return OracleFunctor("point", d, lambda n: [0], lambda f, t: 0,
                         extend=lambda n, t: [0])


def punctured_dlo(max_dim: int = 6) -> OracleFunctor:
    """The dlo functor with the strict 3-chain and everything mapping onto
    it removed.

    Closing the deletion under all induced maps leaves exactly the weak
    orders with at most two distinct ranks; the result is a valid functor
    that fails amalgamation first at (k, m, n) = (1, 1, 1).
    """
    def enum(n):
        for r in weak_orders(n):
            if len(set(r)) <= 2:
                yield r

    def extend(n, r):
        for u in _dlo_extend(n, r):
            if len(set(u)) <= 2:
                yield u

    return OracleFunctor("dlo_punctured", max_dim, enum, _dlo_act, extend=extend)


# -- simplicial quotients -----------------------------------------------------

def _group_check(size: int, perms: Sequence[tuple]) -> None:
    pset = set(perms)
    if tuple(range(size)) not in pset:
        raise ValueError("permutation family lacks the identity")
    for g in perms:
        inv = [0] * size
        for i, gi in enumerate(g):
            inv[gi] = i
        if tuple(inv) not in pset:
            raise ValueError("permutation family not closed under inverse")
        for h in perms:
            if tuple(g[h[i]] for i in range(size)) not in pset:
                raise ValueError("permutation family not closed under composition")


def simplicial_quotient(points: Sequence, group: Sequence[Sequence[int]],
                        max_dim: int, name: str = "quotient") -> OracleFunctor:
    """Orbits of the diagonal group action on tuples, with the reindexing
    action on lexicographically least orbit representatives.

    `group` is a family of permutations of the points given as index
    sequences; it is checked to be a group.
    """
    pts = tuple(points)
    pos = {p: i for i, p in enumerate(pts)}
    perms = tuple(tuple(g) for g in group)
    _group_check(len(pts), perms)

    def canon(t):
        idx = tuple(pos[x] for x in t)
        best = min(tuple(g[i] for i in idx) for g in perms)
        return tuple(pts[i] for i in best)

    def enumerate_level(n):
        seen = set()
        for t in product(pts, repeat=n):
            c = canon(t)
            if c not in seen:
                seen.add(c)
                yield c

    def action(f, t):
        return canon(tuple(t[f(i) - 1] for i in range(1, f.source_size + 1)))

    return OracleFunctor(name, max_dim, enumerate_level, action)


def classifying_space(order: int, max_dim: int) -> OracleFunctor:
    """BG for the cyclic group of the given order: the group acting on
    itself by left translation."""
    elems = tuple(range(order))
    perms = [tuple((g + x) % order for x in elems) for g in elems]
    return simplicial_quotient(elems, perms, max_dim, name=f"BZ{order}")


# -- constraint search ---------------------------------------------------------

def simplex_search(T: TruncatedSymSS, N: int,
                   constraints: Sequence[tuple[FinSetMap, object]]):
    """Find some t in level N with act(f)(t) == value for every constraint.

    A constraint value may also be a set of admissible elements
    (membership constraint); non-membership is expressed by passing the
    complement within the finite level.  Complete backtracking: the
    simplex is grown one coordinate at a time through the one-point
    extension index, and every constraint fires as soon as its full
    support lies inside the assigned prefix; implied restrictions to
    partial supports are checked earlier to prune.  Returns None when no
    witness exists.
    """
    if N > T.max_dim:
        raise TruncationError(f"level {N} outside truncation {T.max_dim}")
    for f, value in constraints:
        if f.target_size != N:
            raise ValueError(f"constraint map targets {f.target_size}, expected {N}")

    # obligations[j]: checks whose support lies in the first j coordinates,
    # keyed by the selecting map and the set of admissible restrictions
    obligations: list[list[tuple[FinSetMap, frozenset]]] = [[] for _ in range(N + 1)]
    for f, value in constraints:
        allowed = value if isinstance(value, (set, frozenset)) else {value}
        m = f.source_size
        prev = 0
        for j in range(1, N + 1):
            sub = [i for i in range(1, m + 1) if f(i) <= j]
            if not sub or len(sub) == prev:
                continue
            prev = len(sub)
            g = FinSetMap(len(sub), j, tuple(f(i) for i in sub))
            selector = pick(sub, m)
            expected = frozenset(T.act(selector, v) for v in allowed)
            obligations[j].append((g, expected))

    def admissible(j, t):
        for g, expected in obligations[j]:
            if T.act(g, t) not in expected:
                return False
        return True

    def grow(j, t):
        if not admissible(j, t):
            return None
        if j == N:
            return t
        for u in T.extensions(j, t):
            hit = grow(j + 1, u)
            if hit is not None:
                return hit
        return None

    for start in T.level(1):
        hit = grow(1, start)
        if hit is not None:
            return hit
    return None
