"""Additive and multiplicative pullbacks.

Both are built on triples ``(s, t, xi)`` with ``xi`` in a cyclic group of order
``m = gcd(|f(s)|/|s|, |g(t)|/|t|)``.  The two ratios are constant on
components, so ``m`` is too and the groups along a divisibility chain are
identified by keeping the integer ``xi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from ..errors import DoesNotExist, LemmaViolation, NotNMap, NotTMap, PosetError, SizeCapExceeded
from ..maps import PosetMap, minimal_fiber
from ..poset import TruncationPoset


@dataclass(frozen=True, order=True)
class PullbackElement:
    s: int
    t: int
    xi: int

    def label(self, S: TruncationPoset, T: TruncationPoset) -> str:
        return f"({S.label(self.s)},{T.label(self.t)},{self.xi})"


@dataclass(frozen=True)
class Pullback:
    """``P`` with projections ``to_source: P -> S`` and ``to_other: P -> T``.

    For the additive pullback of a T-map ``f: S -> A`` along an R-map
    ``g: T -> A`` we have ``g* f_⊕ = (to_other)_⊕ (to_source)*``; in the
    multiplicative case the same with ``⊗``.
    """

    poset: TruncationPoset
    elements: dict  # id -> PullbackElement
    to_source: PosetMap
    to_other: PosetMap

    def element(self, pid: int) -> PullbackElement:
        return self.elements[pid]


def _cyclic_order(f: PosetMap, g: PosetMap, s: int, t: int) -> int:
    return gcd(f.ratio(s), g.ratio(t))


def _build(f: PosetMap, g: PosetMap, triples: list[PullbackElement]) -> Pullback:
    S, T = f.source, g.source
    triples = sorted(triples)
    ids = {e: i for i, e in enumerate(triples)}
    norm = {ids[e]: gcd(S.norm[e.s], T.norm[e.t]) for e in triples}
    by_xi: dict = {}
    for e in triples:
        by_xi.setdefault(e.xi, []).append(e)
    pairs = []
    for group in by_xi.values():
        for e1 in group:
            for e2 in group:
                if e1 != e2 and S.divides(e1.s, e2.s) and T.divides(e1.t, e2.t):
                    pairs.append((ids[e1], ids[e2]))
    labels = {ids[e]: e.label(S, T) for e in triples}
    try:
        P = TruncationPoset(norm, pairs, labels)
    except SizeCapExceeded:
        raise
    except PosetError as exc:
        raise LemmaViolation(f"pullback is not a truncation poset: {exc}") from None
    to_source = PosetMap(P, S, {ids[e]: e.s for e in triples})
    to_other = PosetMap(P, T, {ids[e]: e.t for e in triples})
    return Pullback(P, {ids[e]: e for e in triples}, to_source, to_other)


def additive_pullback(f: PosetMap, g: PosetMap) -> Pullback:
    """Pullback of a T-map ``f: S -> A`` along an R-map ``g: T -> A``."""
    if not f.is_T:
        raise NotTMap("additive pullback needs a T-map", f.fibration_witness())
    if f.target != g.target:
        raise LemmaViolation("the two legs of a pullback must share a target")
    triples = []
    for s in f.source:
        for t in g.source:
            if f.assign[s] == g.assign[t]:
                triples.extend(PullbackElement(s, t, xi) for xi in range(_cyclic_order(f, g, s, t)))
    pb = _build(f, g, triples)
    if not pb.to_other.is_T:
        raise LemmaViolation("projection of an additive pullback is not a T-map")
    return pb


def mult_pullback_triples(f: PosetMap, g: PosetMap) -> list[tuple[int, int]]:
    """Pairs ``(s, t)`` with ``g(t) | f(s)``, s minimal for t and t maximal for s."""
    S, T, A = f.source, g.source, f.target
    out = []
    for t in T:
        for s in minimal_fiber(f, g.assign[t], warn=False):
            fs = f.assign[s]
            if any(t2 != t and A.divides(g.assign[t2], fs) for t2 in T.up(t)):
                continue
            out.append((s, t))
    return sorted(out)


def existence_witness(f: PosetMap, g: PosetMap):
    """First pair violating ``|s1||t2| = |s2||t1|`` within shared components."""
    S, T = f.source, g.source
    pairs = mult_pullback_triples(f, g)
    for i, (s1, t1) in enumerate(pairs):
        for s2, t2 in pairs[i + 1:]:
            if S.root(s1) == S.root(s2) and T.root(t1) == T.root(t2):
                if S.norm[s1] * T.norm[t2] != S.norm[s2] * T.norm[t1]:
                    return ((s1, t1), (s2, t2))
    return None


def mult_pullback(f: PosetMap, g: PosetMap) -> Pullback:
    """Pullback of an N-map ``f: S -> A`` along an R-map ``g: T -> A``.

    Raises :class:`DoesNotExist` when two triples over the same pair of
    components have inconsistent norm ratios.
    """
    if not f.is_N:
        raise NotNMap("multiplicative pullback needs an N-map", f.strong_fibration_witness())
    if f.target != g.target:
        raise LemmaViolation("the two legs of a pullback must share a target")
    bad = existence_witness(f, g)
    if bad is not None:
        (s1, t1), (s2, t2) = bad
        S, T = f.source, g.source
        raise DoesNotExist(
            f"multiplicative pullback does not exist: ({S.label(s1)},{T.label(t1)}) and "
            f"({S.label(s2)},{T.label(t2)}) give {S.norm[s1] * T.norm[t2]} != {S.norm[s2] * T.norm[t1]}",
            bad)
    triples = [PullbackElement(s, t, xi)
               for s, t in mult_pullback_triples(f, g)
               for xi in range(_cyclic_order(f, g, s, t))]
    pb = _build(f, g, triples)
    if not pb.to_other.is_N:
        raise LemmaViolation("projection of a multiplicative pullback is not an N-map")
    return pb
