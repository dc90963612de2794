"""Finite relational structures and the type-space functors they generate.

Two independent constructions of the same functor are provided: orbits of
the automorphism group acting diagonally on tuples, and the fixpoint
closure of the definable-set algebra.  On finite structures the two agree
(invariant = definable), which makes them mutual oracles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

from .finmaps import FinSetMap, skip
from .core import (
    OracleFunctor,
    RepresentableFunctor,
    SimplicialMapHandle,
    TruncatedSymSS,
    generator_maps,
)

DEFAULT_DOMAIN_BOUND = 10


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class FinStructure:
    """A finite domain of named points with named relations over it."""

    domain: tuple[str, ...]
    relations: dict

    def __post_init__(self):
        if len(set(self.domain)) != len(self.domain):
            raise StructureError("domain names must be distinct")
        if not self.domain:
            raise StructureError("domain must be nonempty")
        for rname, (arity, tuples) in self.relations.items():
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"relation {rname}: tuple {t} has wrong arity")
                for x in t:
                    if x not in self.domain:
                        raise StructureError(f"relation {rname}: {x} not in domain")

    @property
    def size(self) -> int:
        return len(self.domain)

    def to_json_dict(self) -> dict:
        return {
            "domain": list(self.domain),
            "relations": {
                rname: {"arity": arity, "tuples": sorted(list(t) for t in tuples)}
                for rname, (arity, tuples) in sorted(self.relations.items())
            },
        }


def structure(domain: Iterable[str], relations: Optional[dict] = None) -> FinStructure:
    rels = {}
    for rname, spec in (relations or {}).items():
        arity, tuples = spec
        rels[rname] = (arity, frozenset(tuple(t) for t in tuples))
    return FinStructure(tuple(domain), rels)


def structure_from_json_dict(doc: dict) -> FinStructure:
    try:
        domain = doc["domain"]
        rels = {
            rname: (rdoc["arity"], [tuple(t) for t in rdoc["tuples"]])
            for rname, rdoc in doc.get("relations", {}).items()
        }
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed structure document: {exc}") from exc
    return structure(domain, rels)


def load_structure(path) -> FinStructure:
    with open(path, "r", encoding="utf-8") as fh:
        return structure_from_json_dict(json.load(fh))


@dataclass(frozen=True)
class Permutation:
    """A bijection of the domain stored as an index sequence."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise StructureError("not a bijection")

    def __call__(self, i: int) -> int:
        return self.mapping[i]


@dataclass(frozen=True)
class DefinableSet:
    """A subset of a type-space level, given by element identifiers."""

    level: int
    elements: frozenset


def automorphisms(M: FinStructure, domain_bound: int = DEFAULT_DOMAIN_BOUND) -> list[Permutation]:
    """The full automorphism group, by backtracking over relation-preserving
    bijections with partial-map pruning on relation membership."""
    n = M.size
    if n > domain_bound:
        raise StructureError(f"domain size {n} exceeds bound {domain_bound}")
    name_index = {x: i for i, x in enumerate(M.domain)}
    rels = [
        (arity, frozenset(tuple(name_index[x] for x in t) for t in tuples))
        for arity, tuples in M.relations.values()
    ]

    out: list[Permutation] = []
    image = [-1] * n
    used = [False] * n

    def consistent(j: int) -> bool:
        # check every relation tuple fully inside the assigned prefix, both ways
        assigned = set(range(j + 1))
        img_assigned = {image[i] for i in assigned}
        for arity, tuples in rels:
            for t in tuples:
                if all(x <= j for x in t):
                    if tuple(image[x] for x in t) not in tuples:
                        return False
                if all(x in img_assigned for x in t):
                    pre = tuple(image.index(x) for x in t)
                    if pre not in tuples:
                        return False
        return True

    def backtrack(j: int) -> None:
        if j == n:
            out.append(Permutation(tuple(image)))
            return
        for cand in range(n):
            if used[cand]:
                continue
            image[j] = cand
            used[cand] = True
            if consistent(j):
                backtrack(j + 1)
            used[cand] = False
            image[j] = -1

    backtrack(0)
    return out


def _orbit_tables(M: FinStructure, max_dim: int, perms: list[tuple]):
    """Per level: dict tuple-of-indices -> canonical (lex-least) orbit rep."""
    n_points = M.size
    canon: list[dict] = [dict() for _ in range(max_dim + 1)]
    for n in range(1, max_dim + 1):
        table = canon[n]
        for t in product(range(n_points), repeat=n):
            if t in table:
                continue
            orbit = {tuple(g[i] for i in t) for g in perms}
            rep = min(orbit)
            for u in orbit:
                table[u] = rep
    return canon


def orbit_theory(M: FinStructure, max_dim: int,
                 domain_bound: int = DEFAULT_DOMAIN_BOUND
                 ) -> tuple[TruncatedSymSS, SimplicialMapHandle]:
    """Levels are orbits of the diagonal automorphism action on tuples.

    Returns the functor together with the orbit-projection map from the
    representable functor of the point set.
    """
    auts = automorphisms(M, domain_bound=domain_bound)
    perms = [a.mapping for a in auts]
    canon = _orbit_tables(M, max_dim, perms)
    names = M.domain
    name_index = {x: i for i, x in enumerate(names)}

    def to_names(t):
        return tuple(names[i] for i in t)

    def enumerate_level(n):
        seen = set()
        for t, rep in canon[n].items():
            if rep not in seen and t == rep:
                seen.add(rep)
                yield to_names(rep)

    def action(f, t):
        idx = tuple(name_index[x] for x in t)
        moved = tuple(idx[f(i) - 1] for i in range(1, f.source_size + 1))
        return to_names(canon[f.source_size][moved])

    functor = OracleFunctor(f"orbits({'+'.join(names)})", max_dim,
                            enumerate_level, action)
    source = RepresentableFunctor(names, max_dim)

    def component(n, t):
        idx = tuple(name_index[x] for x in t)
        return to_names(canon[n][idx])

    projection = SimplicialMapHandle(source, functor, component,
                                     name="orbit projection")
    return functor, projection


# -- definable-set closure ----------------------------------------------------

def _preimage(S, f: FinSetMap, n_points: int, level: int):
    """Pull back a set at level f.source_size along the reindexing map of f
    to level f.target_size."""
    out = set()
    for t in product(range(n_points), repeat=f.target_size):
        if tuple(t[f(i) - 1] for i in range(1, f.source_size + 1)) in S:
            out.add(t)
    return frozenset(out)


def _atoms(universe, family):
    """Signature classes of the universe under the generating family."""
    sig: dict = {}
    for t in universe:
        key = tuple(t in S for S in family)
        sig.setdefault(key, set()).add(t)
    return [frozenset(a) for a in sig.values()]


def _in_algebra(S, atoms):
    return all(a <= S or not (a & S) for a in atoms)


def definable_closure_theory(M: FinStructure, max_dim: int,
                             domain_bound: int = DEFAULT_DOMAIN_BOUND) -> TruncatedSymSS:
    """Atoms of the parameter-free definable-set algebra at each level.

    Starting from the relation sets and the diagonal, the family of sets is
    closed under Boolean combinations, preimages along all coordinate maps
    (it suffices to pull back generators along the generating maps), and
    images along coordinate-forgetting injections (taken on atoms, since
    images commute with unions), iterated to a fixpoint.
    """
    if M.size > domain_bound:
        raise StructureError(f"domain size {M.size} exceeds bound {domain_bound}")
    n_points = M.size
    name_index = {x: i for i, x in enumerate(M.domain)}
    universes = {n: list(product(range(n_points), repeat=n))
                 for n in range(1, max_dim + 1)}

    families: dict[int, list] = {n: [] for n in range(1, max_dim + 1)}
    atoms: dict[int, list] = {}

    def add(n, S):
        if not _in_algebra(S, atoms[n]):
            families[n].append(S)
            atoms[n] = _atoms(universes[n], families[n])
            return True
        return False

    for n in range(1, max_dim + 1):
        atoms[n] = _atoms(universes[n], families[n])

    for rname in sorted(M.relations):
        arity, tuples = M.relations[rname]
        if arity > max_dim:
            raise StructureError(
                f"relation {rname} has arity {arity} beyond truncation {max_dim}")
        S = frozenset(tuple(name_index[x] for x in t) for t in tuples)
        add(arity, S)
    if max_dim >= 2:
        add(2, frozenset((i, i) for i in range(n_points)))

    # worklist to fixpoint: preimages move generators up and sideways,
    # existential images move atoms down
    gen_maps = {n: generator_maps(n, max_dim) for n in range(1, max_dim + 1)}

    changed = True
    while changed:
        changed = False
        for n in range(1, max_dim + 1):
            for f in gen_maps[n]:
                m = f.source_size
                for S in list(families[m]):
                    P = _preimage(S, f, n_points, n)
                    if add(n, P):
                        changed = True
        for n in range(2, max_dim + 1):
            for i in range(1, n + 1):
                drop = skip(n, i)
                for A in list(atoms[n]):
                    img = frozenset(
                        tuple(t[drop(j) - 1] for j in range(1, n))
                        for t in A
                    )
                    if add(n - 1, img):
                        changed = True

    names = M.domain

    def to_names(t):
        return tuple(names[i] for i in t)

    reps = {n: {a: min(a) for a in atoms[n]} for n in atoms}
    locate = {n: {t: reps[n][a] for a in atoms[n] for t in a} for n in atoms}

    def enumerate_level(n):
        for a in sorted(atoms[n], key=min):
            yield to_names(reps[n][a])

    def action(f, t):
        idx = tuple(name_index[x] for x in t)
        moved = tuple(idx[f(i) - 1] for i in range(1, f.source_size + 1))
        return to_names(locate[f.source_size][moved])

    return OracleFunctor(f"closure({'+'.join(names)})", max_dim,
                         enumerate_level, action)


# -- interpretations as structure maps ----------------------------------------

def induced_substructure(M: FinStructure, dset: DefinableSet,
                         theory: Optional[TruncatedSymSS] = None,
                         projection: Optional[SimplicialMapHandle] = None
                         ) -> tuple[FinStructure, dict]:
    """The substructure on the pullback of a level-1 definable set, with the
    inclusion recorded as a map of structures."""
    if dset.level != 1:
        raise StructureError("induced substructure needs a level-1 definable set")
    if theory is None or projection is None:
        theory, projection = orbit_theory(M, 1)
    for e in dset.elements:
        if e not in theory.level(1):
            raise StructureError(f"{e} is not a level-1 type")
    points = tuple(x for x in M.domain if projection(1, (x,)) in dset.elements)
    if not points:
        raise StructureError("definable set pulls back to the empty set")
    kept = set(points)
    rels = {
        rname: (arity, frozenset(t for t in tuples if all(x in kept for x in t)))
        for rname, (arity, tuples) in M.relations.items()
    }
    sub = FinStructure(points, rels)
    return sub, {x: x for x in points}


def definable_quotient(M: FinStructure, equiv: DefinableSet,
                       theory: Optional[TruncatedSymSS] = None,
                       projection: Optional[SimplicialMapHandle] = None
                       ) -> tuple[FinStructure, dict]:
    """Quotient by a definable equivalence relation at level 2.

    The pullback of the given set to pairs must be reflexive, symmetric and
    transitive; relations of the quotient are the images of the relations
    of M under the class map.
    """
    if equiv.level != 2:
        raise StructureError("definable quotient needs a level-2 definable set")
    if theory is None or projection is None:
        theory, projection = orbit_theory(M, 2)
    pairs = {
        (x, y)
        for x in M.domain for y in M.domain
        if projection(2, (x, y)) in equiv.elements
    }
    for x in M.domain:
        if (x, x) not in pairs:
            raise StructureError("pullback is not reflexive")
    for x, y in pairs:
        if (y, x) not in pairs:
            raise StructureError("pullback is not symmetric")
    for x, y in pairs:
        for z in M.domain:
            if (y, z) in pairs and (x, z) not in pairs:
                raise StructureError("pullback is not transitive")

    class_of: dict[str, str] = {}
    for x in M.domain:
        members = sorted(y for y in M.domain if (x, y) in pairs)
        class_of[x] = members[0]
    classes = tuple(sorted(set(class_of.values()), key=M.domain.index))
    rels = {
        rname: (arity, frozenset(tuple(class_of[x] for x in t) for t in tuples))
        for rname, (arity, tuples) in M.relations.items()
    }
    quot = FinStructure(classes, rels)
    return quot, dict(class_of)
