"""Decalage cochain complex with constant integer coefficients, and its
cohomology via Smith normal form.

A degree-d cochain assigns an integer to each coherence class of level
d+2 (head d+1, tail 1): two elements are equivalent when some element one
level up restricts to both along its two head-plus-one-tail projections.
The d+2 cofaces are the delete-one-head-coordinate maps, the coboundary
is their alternating sum, and d(d(x)) = 0 is machine-checked rather than
assumed.  Everything is exact integer arithmetic; reported groups carry
the truncation they were computed at, since classes could merge at
higher levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .finmaps import skip
from .core import (
    SimplicialMapHandle,
    TruncatedSymSS,
    TruncationError,
    simplicial_map_validate,
)


# -- coherence classes -------------------------------------------------------

@dataclass(frozen=True)
class CoherenceClasses:
    """Partition of level head+1 into tail-exchange classes.

    classes[c] is a tuple of element indices; class_of[e] locates the
    class of element index e; reps are the least element of each class.
    """

    head: int
    classes: tuple
    class_of: tuple
    reps: tuple

    @property
    def rank(self) -> int:
        return len(self.classes)


def coherence_classes(B: TruncatedSymSS, head: int) -> CoherenceClasses:
    """Classes of level head+1 under the equivalence generated by elements
    of level head+2 restricting along the two tail-coordinate projections."""
    n = head
    if n + 2 > B.max_dim:
        raise TruncationError(
            f"coherence at head {n} needs level {n + 2}, truncation is {B.max_dim}")
    size = B.size(n + 1)
    parent = list(range(size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    drop_last = B.table(skip(n + 2, n + 2))
    drop_prev = B.table(skip(n + 2, n + 1))
    for ti in range(B.size(n + 2)):
        union(drop_last[ti], drop_prev[ti])

    groups: dict[int, list[int]] = {}
    for e in range(size):
        groups.setdefault(find(e), []).append(e)
    classes = tuple(tuple(groups[r]) for r in sorted(groups))
    class_of = [0] * size
    for ci, members in enumerate(classes):
        for e in members:
            class_of[e] = ci
    return CoherenceClasses(head=n, classes=classes, class_of=tuple(class_of),
                            reps=tuple(members[0] for members in classes))


# -- the complex --------------------------------------------------------------

@dataclass(frozen=True)
class CochainComplex:
    """Free abelian groups on coherence classes with alternating-sum
    coboundaries; deltas[d] maps degree d to degree d+1."""

    groups: tuple
    deltas: tuple
    truncation: int
    name: str = ""

    @property
    def num_degrees(self) -> int:
        return len(self.groups)

    def dimension(self, d: int) -> int:
        return self.groups[d].rank


def _coface_class_map(B: TruncatedSymSS, lower: CoherenceClasses,
                      upper: CoherenceClasses, i: int) -> list[int]:
    """Class map of the coface deleting head coordinate i+1, from classes at
    head upper.head to classes at head lower.head; verified well-defined on
    every member, not just representatives."""
    n = lower.head
    face = B.table(skip(n + 2, i + 1))
    out = []
    for members in upper.classes:
        targets = {lower.class_of[face[e]] for e in members}
        if len(targets) != 1:
            raise AssertionError(
                f"coface {i} not constant on a coherence class at head {upper.head}")
        out.append(targets.pop())
    return out


def build_complex(T: TruncatedSymSS, K: int,
                  base: Optional[SimplicialMapHandle] = None) -> CochainComplex:
    """The first K cochain groups (degrees 0..K-1) and their coboundaries.

    Without a base map the complex lives over T itself; with one, over the
    source of the base map (cohomology of a type or definable type), whose
    integer cochains pull back along the same head-forgetting projections.
    """
    B = T
    if base is not None:
        rep = simplicial_map_validate(base)
        if not rep.passed:
            raise ValueError("base map fails naturality validation")
        B = base.source
    if K < 1:
        raise ValueError("need at least one cochain group")
    if K + 2 > B.max_dim:
        raise TruncationError(
            f"K={K} needs level {K + 2}, truncation is {B.max_dim}")
    groups = tuple(coherence_classes(B, d + 1) for d in range(K))
    deltas = []
    for d in range(K - 1):
        lower, upper = groups[d], groups[d + 1]
        rows, cols = upper.rank, lower.rank
        delta = [[0] * cols for _ in range(rows)]
        for i in range(lower.head + 1):
            cmap = _coface_class_map(B, lower, upper, i)
            sign = 1 if i % 2 == 0 else -1
            for r in range(rows):
                delta[r][cmap[r]] += sign
        deltas.append(tuple(tuple(row) for row in delta))
    return CochainComplex(groups=groups, deltas=tuple(deltas),
                          truncation=B.max_dim, name=B.name)


def matmul(A, Bm):
    """Exact integer matrix product of list-of-row matrices."""
    if not A or not Bm:
        return []
    assert len(A[0]) == len(Bm)
    cols = len(Bm[0])
    return [
        [sum(A[r][t] * Bm[t][c] for t in range(len(Bm))) for c in range(cols)]
        for r in range(len(A))
    ]


def is_zero_matrix(A) -> bool:
    return all(x == 0 for row in A for x in row)


def complex_is_exactly_composable(c: CochainComplex) -> bool:
    """d(d(x)) = 0 as integer matrices for all consecutive coboundaries."""
    for d in range(len(c.deltas) - 1):
        if not is_zero_matrix(matmul([list(r) for r in c.deltas[d + 1]],
                                     [list(r) for r in c.deltas[d]])):
            return False
    return True


# -- Smith normal form ---------------------------------------------------------

@dataclass(frozen=True)
class SNFResult:
    """D = U A V with U, V unimodular and the diagonal in a divisibility
    chain d1 | d2 | ..."""

    diagonal: tuple
    U: tuple
    V: tuple
    rows: int
    cols: int

    def reconstruct(self, A) -> bool:
        """Check U A V equals the diagonal matrix."""
        D = matmul(matmul([list(r) for r in self.U], [list(r) for r in A]),
                   [list(r) for r in self.V])
        for r in range(self.rows):
            for c in range(self.cols):
                want = self.diagonal[r] if r == c and r < len(self.diagonal) else 0
                if D[r][c] != want:
                    return False
        return True


def _identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(A) -> SNFResult:
    """Diagonalize an integer matrix by unimodular row and column operations.

    Classic pivoting on a least nonzero entry; after clearing a pivot's row
    and column, any remaining entry not divisible by the pivot is folded
    into the pivot row and the clearing repeats, which forces the
    divisibility chain.  Arbitrary precision throughout.
    """
    M = [list(row) for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    U = _identity_matrix(rows)
    V = _identity_matrix(cols)

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, mult):
        for c in range(cols):
            M[dst][c] += mult * M[src][c]
        for c in range(rows):
            U[dst][c] += mult * U[src][c]

    def add_col(src, dst, mult):
        for row in M:
            row[dst] += mult * row[src]
        for row in V:
            row[dst] += mult * row[src]

    def negate_row(i):
        for c in range(cols):
            M[i][c] = -M[i][c]
        for c in range(rows):
            U[i][c] = -U[i][c]

    t = 0
    while t < min(rows, cols):
        # pivot: least nonzero entry in the remaining block
        pivot = None
        for r in range(t, rows):
            for c in range(t, cols):
                if M[r][c] != 0 and (pivot is None or abs(M[r][c]) < abs(M[pivot[0]][pivot[1]])):
                    pivot = (r, c)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = True
        while dirty:
            dirty = False
            for r in range(t + 1, rows):
                if M[r][t] != 0:
                    q = M[r][t] // M[t][t]
                    add_row(t, r, -q)
                    if M[r][t] != 0:
                        swap_rows(t, r)
                        dirty = True
            for c in range(t + 1, cols):
                if M[t][c] != 0:
                    q = M[t][c] // M[t][t]
                    add_col(t, c, -q)
                    if M[t][c] != 0:
                        swap_cols(t, c)
                        dirty = True
            if not dirty:
                # force divisibility: fold a bad entry into the pivot row
                for r in range(t + 1, rows):
                    for c in range(t + 1, cols):
                        if M[r][c] % M[t][t] != 0:
                            add_row(r, t, 1)
                            dirty = True
                            break
                    if dirty:
                        break
        if M[t][t] < 0:
            negate_row(t)
        t += 1

    diagonal = tuple(M[i][i] for i in range(min(rows, cols)))
    return SNFResult(diagonal=diagonal,
                     U=tuple(tuple(r) for r in U),
                     V=tuple(tuple(r) for r in V),
                     rows=rows, cols=cols)


def _det_sign_is_unit(mat) -> bool:
    """Determinant of a small integer matrix is +1 or -1, by fraction-free
    Gaussian elimination (Bareiss)."""
    n = len(mat)
    if n == 0:
        return True
    M = [list(r) for r in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return False
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return abs(sign * M[n - 1][n - 1]) == 1


def snf_is_valid(A, res: SNFResult) -> bool:
    """Round trip plus unimodularity plus the divisibility chain."""
    if not res.reconstruct(A):
        return False
    if not _det_sign_is_unit(res.U) or not _det_sign_is_unit(res.V):
        return False
    diag = [d for d in res.diagonal if d != 0]
    for a, b in zip(diag, diag[1:]):
        if b % a != 0:
            return False
    if any(d < 0 for d in res.diagonal):
        return False
    nz = [d != 0 for d in res.diagonal]
    if sorted(nz, reverse=True) != nz:
        return False
    return True


# -- cohomology ----------------------------------------------------------------

@dataclass(frozen=True)
class CohomologyGroup:
    degree: int
    free_rank: int
    torsion: tuple
    truncation: int


def cohomology(c: CochainComplex) -> list[CohomologyGroup]:
    """H^d = ker(delta_d) / im(delta_{d-1}) for every degree where both
    coboundaries are inside the built complex (0 .. num_degrees - 2).

    Degree 0 uses im(delta_{-1}) = 0.  Free ranks come from matrix ranks
    over the integers; torsion coefficients are the elementary divisors of
    the incoming coboundary that exceed 1.
    """
    if not complex_is_exactly_composable(c):
        raise ValueError("coboundaries do not compose to zero")
    out = []
    snfs = [smith_normal_form([list(r) for r in delta]) for delta in c.deltas]
    for d in range(len(c.groups) - 1):
        dim = c.groups[d].rank
        rank_out = sum(1 for x in snfs[d].diagonal if x != 0)
        if d == 0:
            rank_in = 0
            torsion: tuple = ()
        else:
            rank_in = sum(1 for x in snfs[d - 1].diagonal if x != 0)
            torsion = tuple(x for x in snfs[d - 1].diagonal if x not in (0, 1))
        out.append(CohomologyGroup(degree=d, free_rank=dim - rank_out - rank_in,
                                   torsion=torsion, truncation=c.truncation))
    return out
