"""Lifting-property checkers: amalgamation, Beck-Chevalley, vibrancy and
the model conditions.

All checks scan their instances in lexicographic order (k, m, n, then
element indices) and report the least failing instance, so failures are
reproducible regression fixtures.  The k = 0 case reads the fiber product
over the missing empty level as the plain product.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from .finmaps import back_inclusion, front_inclusion
from .core import (
    Report,
    SimplicialMapHandle,
    TruncatedSymSS,
    TruncationError,
    encode,
    is_representable,
    simplicial_map_validate,
)
from .theories import simplex_search


class UnvalidatedMapError(ValueError):
    """The handle failed naturality validation."""


@dataclass(frozen=True)
class AmalgamationInstance:
    """A pair of types agreeing on a shared block of k variables."""

    k: int
    m: int
    n: int
    p: object
    q: object
    agreement: object = None


def _triples(bound: int, k_min: int = 0):
    for k in range(k_min, bound - 1):
        for m in range(1, bound - k):
            for n in range(1, bound - k - m + 1):
                yield k, m, n


def _drive(instances, eval_one: Callable, workers: int = 1):
    """Evaluate instances in order, returning the first witness found.

    With several workers the instances are still committed in order, so
    the merged report is deterministic and the witness is the least one.
    """
    stats: dict[str, int] = {}
    if workers <= 1:
        for inst in instances:
            wit, st = eval_one(inst)
            for key, v in st.items():
                stats[key] = stats.get(key, 0) + v
            if wit is not None:
                return wit, stats
        return None, stats
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(eval_one, instances))
    first = None
    for wit, st in results:
        for key, v in st.items():
            stats[key] = stats.get(key, 0) + v
        if wit is not None and first is None:
            first = wit
    return first, stats


def check_theory(T: TruncatedSymSS, bound: int, workers: int = 1) -> Report:
    """Amalgamation: any two types agreeing on a shared block of k variables
    extend to a common type on all m + k + n variables."""
    if bound > T.max_dim:
        raise TruncationError(f"bound {bound} exceeds truncation {T.max_dim}")

    def eval_one(inst):
        k, m, n = inst
        N = m + k + n
        front = front_inclusion(m + k, N)
        back = back_inclusion(k + n, N)
        level_p = T.level(m + k)
        level_q = T.level(k + n)
        if k > 0:
            ta = T.table(back_inclusion(k, m + k))
            tb = T.table(front_inclusion(k, k + n))
            by_agreement: dict[int, list[int]] = {}
            for qi, _ in enumerate(level_q):
                by_agreement.setdefault(tb[qi], []).append(qi)
        pairs = 0
        for pi, p in enumerate(level_p):
            if k > 0:
                candidates = by_agreement.get(ta[pi], [])
            else:
                candidates = range(len(level_q))
            for qi in candidates:
                q = level_q[qi]
                pairs += 1
                r = simplex_search(T, N, [(front, p), (back, q)])
                if r is None:
                    agreement = T.act(back_inclusion(k, m + k), p) if k > 0 else None
                    wit = {
                        "condition": "amalgamation",
                        "k": k, "m": m, "n": n,
                        "p": encode(p), "q": encode(q),
                        "agreement": encode(agreement),
                    }
                    return wit, {"instances": 1, "pairs": pairs}
        return None, {"instances": 1, "pairs": pairs}

    wit, stats = _drive(list(_triples(bound)), eval_one, workers)
    return Report("check_theory", wit is None,
                  (wit,) if wit else (), stats, {"bound": bound, "functor": T.name})


def check_beck_chevalley(T: TruncatedSymSS, bound: int, workers: int = 1) -> Report:
    """The image/preimage identity d(c^{-1}(p)) = b^{-1}(a(p)) over the
    square of restriction maps of the inclusions k < m+k, k+n < m+k+n.

    Singleton inputs suffice since images and preimages commute with
    unions.  Checked for k >= 1; for a functor of type spaces it is
    equivalent to amalgamation instance by instance.
    """
    if bound > T.max_dim:
        raise TruncationError(f"bound {bound} exceeds truncation {T.max_dim}")

    def eval_one(inst):
        k, m, n = inst
        N = m + k + n
        ta = T.table(back_inclusion(k, m + k))
        tb = T.table(front_inclusion(k, k + n))
        tc = T.table(front_inclusion(m + k, N))
        td = T.table(back_inclusion(k + n, N))
        level_p = T.level(m + k)
        level_q = T.level(k + n)
        image_side: dict[int, set[int]] = {}
        for ri in range(T.size(N)):
            image_side.setdefault(tc[ri], set()).add(td[ri])
        preimage_side: dict[int, set[int]] = {}
        for qi in range(len(level_q)):
            preimage_side.setdefault(tb[qi], set()).add(qi)
        checked = 0
        for pi, p in enumerate(level_p):
            checked += 1
            lhs = image_side.get(pi, set())
            rhs = preimage_side.get(ta[pi], set())
            if lhs != rhs:
                wit = {
                    "condition": "beck_chevalley",
                    "k": k, "m": m, "n": n, "p": encode(p),
                    "missing": [encode(level_q[qi]) for qi in sorted(rhs - lhs)],
                    "extra": [encode(level_q[qi]) for qi in sorted(lhs - rhs)],
                }
                return wit, {"instances": 1, "points": checked}
        return None, {"instances": 1, "points": checked}

    wit, stats = _drive(list(_triples(bound, k_min=1)), eval_one, workers)
    return Report("check_beck_chevalley", wit is None,
                  (wit,) if wit else (), stats, {"bound": bound, "functor": T.name})


def _ensure_validated(F: SimplicialMapHandle, bound: int) -> None:
    if F.validated_to >= min(bound, F.bound):
        return
    rep = simplicial_map_validate(F, min(bound, F.bound))
    if not rep.passed:
        raise UnvalidatedMapError(
            f"map {F.name or '<anonymous>'} is not natural: {rep.witnesses[0]}"
        )


def check_vibrant(F: SimplicialMapHandle, bound: int, workers: int = 1) -> Report:
    """Surjectivity onto the fiber product: every pair (target element over
    m+k variables, source element over k+n) agreeing over the shared k
    lifts to a source element over all m+k+n variables."""
    if bound > F.source.max_dim or bound > F.target.max_dim:
        raise TruncationError(
            f"bound {bound} exceeds truncations "
            f"{F.source.max_dim}/{F.target.max_dim}")
    _ensure_validated(F, bound)
    src, tgt = F.source, F.target

    def eval_one(inst):
        k, m, n = inst
        N = m + k + n
        front_mk = front_inclusion(m + k, N)
        back_kn = back_inclusion(k + n, N)
        level_p = tgt.level(m + k)
        level_q = src.level(k + n)
        tgt_idx_mk = {t: i for i, t in enumerate(level_p)}
        achieved: set[tuple[int, int]] = set()
        src_idx_kn = {t: i for i, t in enumerate(level_q)}
        for r in src.level(N):
            pi = tgt_idx_mk[F(m + k, src.act(front_mk, r))]
            qi = src_idx_kn[src.act(back_kn, r)]
            achieved.add((pi, qi))
        if k > 0:
            ta = tgt.table(back_inclusion(k, m + k))
            tgt_level_k = tgt.level(k)
            tgt_idx_k = {t: i for i, t in enumerate(tgt_level_k)}
            q_agree = [tgt_idx_k[F(k, src.act(front_inclusion(k, k + n), q))]
                       for q in level_q]
        pairs = 0
        for pi, p in enumerate(level_p):
            for qi, q in enumerate(level_q):
                if k > 0 and ta[pi] != q_agree[qi]:
                    continue
                pairs += 1
                if (pi, qi) not in achieved:
                    wit = {
                        "condition": "vibrancy",
                        "k": k, "m": m, "n": n,
                        "target_element": encode(p), "source_element": encode(q),
                    }
                    return wit, {"instances": 1, "pairs": pairs}
        return None, {"instances": 1, "pairs": pairs}

    wit, stats = _drive(list(_triples(bound)), eval_one, workers)
    return Report("check_vibrant", wit is None,
                  (wit,) if wit else (), stats,
                  {"bound": bound, "map": F.name})


def check_model(F: SimplicialMapHandle, bound: int, mode: str = "saturated",
                workers: int = 1) -> Report:
    """Model conditions for a map from a representable functor.

    saturated: the full vibrancy check.  tarski_vaught: the m-free variant,
    where every target type over the image of a source tuple is realized by
    a source extension of that tuple.
    """
    if mode not in ("saturated", "tarski_vaught"):
        raise ValueError(f"unknown mode {mode!r}")
    if not is_representable(F.source):
        raise ValueError("check_model needs a representable source")
    if mode == "saturated":
        inner = check_vibrant(F, bound, workers=workers)
        return Report("check_model", inner.passed, inner.witnesses, inner.stats,
                      {"bound": bound, "map": F.name, "mode": mode})

    if bound > F.source.max_dim or bound > F.target.max_dim:
        raise TruncationError(
            f"bound {bound} exceeds truncations "
            f"{F.source.max_dim}/{F.target.max_dim}")
    _ensure_validated(F, bound)
    src, tgt = F.source, F.target

    instances = [(k, n) for k in range(1, bound) for n in range(1, bound - k + 1)]

    def eval_one(inst):
        k, n = inst
        level_a = src.level(k)
        level_p = tgt.level(k + n)
        front = front_inclusion(k, k + n)
        tp = tgt.table(front)
        tgt_idx_k = {t: i for i, t in enumerate(tgt.level(k))}
        tgt_idx_kn = {t: i for i, t in enumerate(level_p)}
        achieved: set[tuple[int, int]] = set()
        src_idx_k = {t: i for i, t in enumerate(level_a)}
        for b in src.level(k + n):
            ai = src_idx_k[src.act(front, b)]
            pi = tgt_idx_kn[F(k + n, b)]
            achieved.add((ai, pi))
        pairs = 0
        for ai, a in enumerate(level_a):
            fa = tgt_idx_k[F(k, a)]
            for pi, p in enumerate(level_p):
                if tp[pi] != fa:
                    continue
                pairs += 1
                if (ai, pi) not in achieved:
                    wit = {
                        "condition": "tarski_vaught",
                        "k": k, "n": n,
                        "source_tuple": encode(a), "target_element": encode(p),
                    }
                    return wit, {"instances": 1, "pairs": pairs}
        return None, {"instances": 1, "pairs": pairs}

    wit, stats = _drive(instances, eval_one, workers)
    return Report("check_model", wit is None,
                  (wit,) if wit else (), stats,
                  {"bound": bound, "map": F.name, "mode": mode})
