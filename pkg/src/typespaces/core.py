"""Truncated symmetric simplicial sets with computable induced maps.

A functor here is a finite family of levels T_1..T_D together with a
contravariant action: a map f: {1..m} -> {1..n} of index sets acts as
act(f): T_n -> T_m.  Levels hold canonical, totally ordered element
identifiers so equality of simplices is syntactic.

Two backends are provided: fully materialized tables (loaded functors,
orbit quotients) and oracle-backed lazy evaluation (the builtin theories),
both behind the same interface.  Functors are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .finmaps import (
    FinSetMap,
    adjacent_transposition,
    back_inclusion,
    canonical_factorization,
    compose,
    duplicate,
    front_inclusion,
    generator_decomposition,
    identity,
    shift,
    skip,
)

# Materialization cap: levels larger than this refuse to materialize and
# must be driven through the streaming/oracle interface.
DEFAULT_LEVEL_CAP = 10 ** 6


class CapExceededError(RuntimeError):
    """A level is too large to materialize under the configured cap."""


class TruncationError(ValueError):
    """A requested dimension exceeds the functor's truncation."""


def generator_maps(n: int, max_dim: int) -> list:
    """Adjacent transpositions, one-point skips and one-point duplications
    with target {1..n}, restricted to actions staying below max_dim."""
    gens = [adjacent_transposition(n, i) for i in range(1, n)]
    if n >= 2:
        gens += [skip(n, i) for i in range(1, n + 1)]
    if n + 1 <= max_dim:
        gens += [duplicate(n, i) for i in range(1, n + 1)]
    return gens


@dataclass(frozen=True)
class Report:
    """Outcome of a mechanical check: verdict, counterexamples, counters."""

    check: str
    passed: bool
    witnesses: tuple = ()
    stats: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "schema": "typespaces.report/1",
            "check": self.check,
            "verdict": "pass" if self.passed else "fail",
            "witnesses": [dict(w) for w in self.witnesses],
            "stats": dict(sorted(self.stats.items())),
            "params": dict(sorted(self.params.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


class TruncatedSymSS:
    """Base class: truncated symmetric simplicial set.

    Subclasses implement `_enumerate_level(n)` and `_act(f, t)`.  Level
    materialization, per-map index tables and one-point extension indices
    are memoized here.  All levels use 1-based dimensions 1..max_dim.
    """

    def __init__(self, max_dim: int, name: str = "", level_cap: int = DEFAULT_LEVEL_CAP):
        if max_dim < 1:
            raise TruncationError("max_dim must be at least 1")
        self.max_dim = max_dim
        self.name = name
        self.level_cap = level_cap
        self._levels: dict[int, tuple] = {}
        self._indices: dict[int, dict] = {}
        self._tables: dict[tuple, list[int]] = {}
        self._children: dict[int, dict] = {}

    # -- subclass surface -------------------------------------------------

    def _enumerate_level(self, n: int) -> Iterable:
        raise NotImplementedError

    def _act(self, f: FinSetMap, t):
        raise NotImplementedError

    # -- public surface ---------------------------------------------------

    def check_dim(self, n: int) -> None:
        if not 1 <= n <= self.max_dim:
            raise TruncationError(f"level {n} outside truncation 1..{self.max_dim}")

    def level(self, n: int) -> tuple:
        """The canonical (sorted, deduplicated) element list of T_n."""
        self.check_dim(n)
        if n not in self._levels:
            elems = sorted(set(self._enumerate_level(n)))
            if len(elems) > self.level_cap:
                raise CapExceededError(
                    f"level {n} has {len(elems)} elements, cap is {self.level_cap}"
                )
            self._levels[n] = tuple(elems)
            self._indices[n] = {t: i for i, t in enumerate(self._levels[n])}
        return self._levels[n]

    def iter_level(self, n: int) -> Iterator:
        """Stream the elements of T_n without forcing materialization."""
        self.check_dim(n)
        if n in self._levels:
            return iter(self._levels[n])
        return iter(self._enumerate_level(n))

    def size(self, n: int) -> int:
        return len(self.level(n))

    def index(self, n: int, t) -> int:
        self.level(n)
        return self._indices[n][t]

    def act(self, f: FinSetMap, t):
        """Contravariant action: t in T_{f.target_size} -> T_{f.source_size}."""
        self.check_dim(f.target_size)
        self.check_dim(f.source_size)
        return self._act(f, t)

    def table(self, f: FinSetMap) -> list[int]:
        """Index table of act(f) over the materialized source level."""
        key = (f.source_size, f.target_size, f.values)
        if key not in self._tables:
            src = self.level(f.target_size)
            self.level(f.source_size)
            idx = self._indices[f.source_size]
            self._tables[key] = [idx[self._act(f, t)] for t in src]
        return self._tables[key]

    def extensions(self, n: int, t) -> tuple:
        """Elements of T_{n+1} restricting to t under the front inclusion."""
        self.check_dim(n + 1)
        if n not in self._children:
            front = front_inclusion(n, n + 1)
            groups: dict = {}
            for u in self.level(n + 1):
                groups.setdefault(self._act(front, u), []).append(u)
            self._children[n] = {k: tuple(v) for k, v in groups.items()}
        return self._children[n].get(t, ())

    def generator_maps(self, n: int) -> list[FinSetMap]:
        """All generator maps with target {1..n} whose action stays in range."""
        return generator_maps(n, self.max_dim)


class OracleFunctor(TruncatedSymSS):
    """Oracle-backed functor: levels and actions are computed on demand.

    `enumerate_level(n)` must yield each canonical element exactly once;
    `action(f, t)` must implement the contravariant action; `extend(n, t)`,
    when given, enumerates the one-point extensions of t without
    materializing level n+1.
    """

    def __init__(self, name, max_dim, enumerate_level, action, extend=None,
                 level_cap: int = DEFAULT_LEVEL_CAP):
        super().__init__(max_dim, name=name, level_cap=level_cap)
        self._enumerate = enumerate_level
        self._action = action
        self._extend = extend

    def _enumerate_level(self, n: int):
        return self._enumerate(n)

    def _act(self, f: FinSetMap, t):
        return self._action(f, t)

    def extensions(self, n: int, t) -> tuple:
        if self._extend is not None:
            self.check_dim(n + 1)
            return tuple(self._extend(n, t))
        return super().extensions(n, t)


class TableFunctor(TruncatedSymSS):
    """Fully materialized functor driven by generator index tables.

    The action of an arbitrary FinSetMap is evaluated by decomposing it
    into adjacent transpositions, skips and duplicates and chaining the
    stored tables.
    """

    def __init__(self, levels: list[tuple], gen_tables: dict, name: str = "",
                 level_cap: int = DEFAULT_LEVEL_CAP):
        super().__init__(len(levels), name=name, level_cap=level_cap)
        for n, elems in enumerate(levels, start=1):
            self._levels[n] = tuple(elems)
            self._indices[n] = {t: i for i, t in enumerate(self._levels[n])}
        # gen_tables: (kind, i, n) -> list of target-level indices, where kind
        # in {"transpose", "skip", "dup"} and n is the level acted on.
        self._gen_tables = dict(gen_tables)
        self._decomp_cache: dict[tuple, list[FinSetMap]] = {}

    def _enumerate_level(self, n: int):
        return self._levels[n]

    def _gen_key(self, f: FinSetMap):
        n = f.target_size
        if f.source_size == n:
            for i in range(1, n):
                if f == adjacent_transposition(n, i):
                    return ("transpose", i, n)
        elif f.source_size == n - 1:
            for i in range(1, n + 1):
                if f == skip(n, i):
                    return ("skip", i, n)
        elif f.source_size == n + 1:
            for i in range(1, n + 1):
                if f == duplicate(n, i):
                    return ("dup", i, n)
        return None

    def _act(self, f: FinSetMap, t):
        if f.is_identity():
            return t
        key = self._gen_key(f)
        if key is not None:
            tab = self._gen_tables[key]
            return self._levels[f.source_size][tab[self._indices[f.target_size][t]]]
        dkey = (f.source_size, f.target_size, f.values)
        chain = self._decomp_cache.get(dkey)
        if chain is None:
            chain = generator_decomposition(f)
            self._decomp_cache[dkey] = chain
        out = t
        for g in chain:
            out = self._act(g, out)
        return out


class RepresentableFunctor(TruncatedSymSS):
    """The functor represented by a finite point set: level n = points^n."""

    def __init__(self, points: Iterable, max_dim: int, name: str = "",
                 level_cap: int = DEFAULT_LEVEL_CAP):
        pts = tuple(sorted(set(points)))
        if not pts:
            raise ValueError("representable functor needs a nonempty point set")
        super().__init__(max_dim, name=name or f"representable({len(pts)})",
                         level_cap=level_cap)
        self.points = pts

    def _enumerate_level(self, n: int):
        from itertools import product
        return (tuple(p) for p in product(self.points, repeat=n))

    def _act(self, f: FinSetMap, t):
        return tuple(t[f(i) - 1] for i in range(1, f.source_size + 1))

    def extensions(self, n: int, t) -> tuple:
        self.check_dim(n + 1)
        return tuple(t + (p,) for p in self.points)


def is_representable(T: TruncatedSymSS) -> bool:
    """Structural test: levels are tuple powers of a point set, action by
    precomposition.  Spot-checks the action on level 2 when available."""
    if not isinstance(T, RepresentableFunctor):
        return False
    if T.size(1) != len(T.points):
        return False
    if T.max_dim >= 2:
        pts = T.points
        if T.size(2) != len(pts) ** 2:
            return False
        t = (pts[0], pts[-1])
        if T.act(adjacent_transposition(2, 1), t) != (pts[-1], pts[0]):
            return False
    return True


class DecalageFunctor(TruncatedSymSS):
    """The shift T o [+s]: level n is T_{n+s}, the first s coordinates are
    frozen as a head and f acts as id_s + f."""

    def __init__(self, base: TruncatedSymSS, s: int):
        if not 1 <= s < base.max_dim:
            raise TruncationError(f"shift {s} must satisfy 1 <= s < {base.max_dim}")
        super().__init__(base.max_dim - s, name=f"{base.name}[+{s}]",
                         level_cap=base.level_cap)
        self.base = base
        self.shift_by = s

    def _enumerate_level(self, n: int):
        return self.base.iter_level(n + self.shift_by)

    def _act(self, f: FinSetMap, t):
        return self.base.act(shift(f, self.shift_by), t)

    def extensions(self, n: int, t) -> tuple:
        self.check_dim(n + 1)
        return self.base.extensions(n + self.shift_by, t)


def decalage(T: TruncatedSymSS, s: int) -> DecalageFunctor:
    """The decalage endofunctor [+s] applied to T."""
    return DecalageFunctor(T, s)


@dataclass
class SimplicialMapHandle:
    """A levelwise map between truncated functors.

    `component(n, t)` sends an element of the source level n to the target
    level n.  Naturality is not assumed; run `simplicial_map_validate`.
    """

    source: TruncatedSymSS
    target: TruncatedSymSS
    component: Callable
    name: str = ""
    validated_to: int = 0

    @property
    def bound(self) -> int:
        return min(self.source.max_dim, self.target.max_dim)

    def __call__(self, n: int, t):
        return self.component(n, t)


def head_projections(T: TruncatedSymSS, s: int) -> list[SimplicialMapHandle]:
    """The s natural maps T o [+s] -> T o [+(s-1)] forgetting one head
    coordinate each (for s = 1, the single projection T o [+1] -> T)."""
    dec = decalage(T, s)
    upper = dec
    lower = decalage(T, s - 1) if s > 1 else T
    handles = []
    for h in range(1, s + 1):
        def comp(n, t, _h=h, _s=s):
            return T.act(skip(_s + n, _h), t)
        handles.append(SimplicialMapHandle(upper, lower, comp,
                                           name=f"{T.name}[+{s}] drop head {h}"))
    return handles


def head_projection(T: TruncatedSymSS) -> SimplicialMapHandle:
    """The canonical projection T o [+1] -> T."""
    return head_projections(T, 1)[0]


def induced_map(T: TruncatedSymSS, f: FinSetMap) -> Callable:
    """The action of f as a total function on level f.target_size."""
    T.check_dim(f.target_size)
    T.check_dim(f.source_size)
    return lambda t: T.act(f, t)


def validate_functor(T: TruncatedSymSS, bound: Optional[int] = None) -> Report:
    """Check identity and composition laws on all generator maps.

    Adjacent transpositions, one-point skips and one-point duplications
    generate every finite-set map, so checking all composable generator
    pairs on every element bounds the cost while covering functoriality.
    """
    bound = T.max_dim if bound is None else min(bound, T.max_dim)
    witnesses = []
    checks = 0
    for n in range(1, bound + 1):
        idn = identity(n)
        for t in T.level(n):
            checks += 1
            if T.act(idn, t) != t:
                witnesses.append({
                    "condition": "identity", "level": n, "element": encode(t),
                })
                return Report("validate_functor", False, tuple(witnesses),
                              {"checks": checks}, {"bound": bound})
    for n in range(1, bound + 1):
        outer = [f for f in T.generator_maps(n) if f.source_size <= bound]
        for f in outer:
            m = f.source_size
            inner = [g for g in T.generator_maps(m) if g.source_size <= bound]
            tab_f = T.table(f)
            for g in inner:
                fg = compose(f, g)
                tab_g = T.table(g)
                tab_fg = T.table(fg)
                for ti in range(T.size(n)):
                    checks += 1
                    if tab_fg[ti] != tab_g[tab_f[ti]]:
                        lvl_l = T.level(g.source_size)
                        witnesses.append({
                            "condition": "composition", "level": n,
                            "element": encode(T.level(n)[ti]),
                            "outer": list(f.values), "inner": list(g.values),
                            "direct": encode(lvl_l[tab_fg[ti]]),
                            "stepped": encode(lvl_l[tab_g[tab_f[ti]]]),
                        })
                        return Report("validate_functor", False, tuple(witnesses),
                                      {"checks": checks}, {"bound": bound})
    return Report("validate_functor", True, (), {"checks": checks}, {"bound": bound})


def simplicial_map_validate(F: SimplicialMapHandle, bound: Optional[int] = None) -> Report:
    """Check that the components commute with every generator map."""
    b = F.bound if bound is None else min(bound, F.bound)
    if b < 1:
        raise TruncationError("handle has no shared levels to validate")
    witnesses = []
    checks = 0
    for n in range(1, b + 1):
        gens = [f for f in F.source.generator_maps(n)
                if f.source_size <= b and f.source_size <= F.target.max_dim
                and f.target_size <= F.target.max_dim]
        src_n = F.source.level(n)
        images = [F(n, t) for t in src_n]
        for f in gens:
            m = f.source_size
            tab_src = F.source.table(f)
            src_m = F.source.level(m)
            for ti, t in enumerate(src_n):
                checks += 1
                down_then_map = F(m, src_m[tab_src[ti]])
                map_then_down = F.target.act(f, images[ti])
                if down_then_map != map_then_down:
                    witnesses.append({
                        "condition": "naturality", "level": n,
                        "element": encode(t), "map": list(f.values),
                        "via_source": encode(down_then_map),
                        "via_target": encode(map_then_down),
                    })
                    return Report("simplicial_map_validate", False, tuple(witnesses),
                                  {"checks": checks}, {"bound": b})
    F.validated_to = max(F.validated_to, b)
    return Report("simplicial_map_validate", True, (), {"checks": checks}, {"bound": b})


def puncture(T: TruncatedSymSS, level: int, element) -> TableFunctor:
    """Delete an element and everything that maps onto it.

    Removes the element from its level together with the closure under all
    induced maps: any element whose image under some generator chain hits a
    deleted element is deleted too, so the result is again a functor.
    """
    T.check_dim(level)
    if element not in T.level(level):
        raise ValueError("element not present at the given level")
    deleted: dict[int, set] = {n: set() for n in range(1, T.max_dim + 1)}
    deleted[level].add(element)
    changed = True
    while changed:
        changed = False
        for n in range(1, T.max_dim + 1):
            for f in T.generator_maps(n):
                m = f.source_size
                for t in T.level(n):
                    if t in deleted[n]:
                        continue
                    if T.act(f, t) in deleted[m]:
                        deleted[n].add(t)
                        changed = True
    levels = [tuple(t for t in T.level(n) if t not in deleted[n])
              for n in range(1, T.max_dim + 1)]
    if any(not lv for lv in levels):
        raise ValueError("puncturing emptied a level")
    return _tabulate(T, levels, name=f"{T.name} minus {element!r}@{level}")


def _tabulate(T: TruncatedSymSS, levels: list[tuple], name: str = "") -> TableFunctor:
    """Materialize generator tables for the given (sub)levels of T."""
    index = [{t: i for i, t in enumerate(lv)} for lv in levels]
    gen_tables = {}
    for n in range(1, len(levels) + 1):
        for kind, build in (("transpose", adjacent_transposition),
                            ("skip", skip), ("dup", duplicate)):
            if kind == "transpose":
                rng = range(1, n)
            elif kind == "skip":
                rng = range(1, n + 1) if n >= 2 else range(0)
            else:
                rng = range(1, n + 1) if n + 1 <= len(levels) else range(0)
            for i in rng:
                f = build(n, i)
                tgt_idx = index[f.source_size - 1]
                gen_tables[(kind, i, n)] = [tgt_idx[T.act(f, t)] for t in levels[n - 1]]
    return TableFunctor(levels, gen_tables, name=name or T.name)


def tabulate(T: TruncatedSymSS, max_dim: Optional[int] = None) -> TableFunctor:
    """Materialize T (up to max_dim) as a table-backed functor."""
    d = T.max_dim if max_dim is None else min(max_dim, T.max_dim)
    return _tabulate(T, [T.level(n) for n in range(1, d + 1)])


# -- serialization ---------------------------------------------------------

def encode(t):
    """JSON-compatible encoding of a canonical element (tuples become lists)."""
    if isinstance(t, tuple):
        return [encode(x) for x in t]
    return t


def decode(obj):
    """Inverse of `encode`: lists become tuples, scalars pass through."""
    if isinstance(obj, list):
        return tuple(decode(x) for x in obj)
    return obj


def to_json_dict(T: TruncatedSymSS) -> dict:
    """Serialize a functor as levels plus generator index tables."""
    tab = tabulate(T)
    levels = [[encode(t) for t in tab.level(n)] for n in range(1, tab.max_dim + 1)]
    action: dict[str, list] = {}
    for (kind, i, n), table in sorted(tab._gen_tables.items()):
        key = f"{kind}:{i}"
        slot = action.setdefault(key, [None] * tab.max_dim)
        slot[n - 1] = list(table)
    return {
        "schema": "typespaces.functor/1",
        "name": T.name,
        "max_dim": tab.max_dim,
        "levels": levels,
        "action": action,
    }


def from_json_dict(doc: dict) -> TableFunctor:
    levels = [tuple(decode(t) for t in lv) for lv in doc["levels"]]
    gen_tables = {}
    for key, per_level in doc["action"].items():
        kind, i = key.split(":")
        for n, table in enumerate(per_level, start=1):
            if table is not None:
                gen_tables[(kind, int(i), n)] = list(table)
    return TableFunctor(levels, gen_tables, name=doc.get("name", ""))


def dumps(T: TruncatedSymSS) -> str:
    return json.dumps(to_json_dict(T), sort_keys=True, separators=(",", ":"))


def loads(text: str) -> TableFunctor:
    return from_json_dict(json.loads(text))
