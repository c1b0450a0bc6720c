"""Seeded random truncation posets and maps for property tests.

Every truncation poset is a disjoint union of components, each isomorphic to
an ordinary truncation set, so posets are built from random division-closed
sets of naturals.  Maps are built component by component from the standard
shapes: a T-map component is ``V/n -> V``, an N-map component is
``U -> <n>U`` and an R-map component is any ``U -> V`` with ``nU ⊆ V``.
Element ids are shuffled so nothing relies on ids matching norms.
"""

from __future__ import annotations

import itertools
import random
from math import gcd
from typing import Sequence

from .maps import PosetMap
from .poset import TruncationPoset, division_closure
from .rings import divisors


def _lcm(a, b):
    return a * b // gcd(a, b)


def random_truncation_set(rng: random.Random, max_size: int = 4, max_norm: int = 12,
                          joins: bool = False) -> frozenset:
    """A division-closed set of naturals with at most ``max_size`` elements."""
    while True:
        k = rng.randint(0, 2)
        gens = [rng.randint(1, max_norm) for _ in range(k)]
        U = division_closure([1, *gens])
        if joins:
            U = lcm_closure(U)
        if len(U) <= max_size:
            return frozenset(U)


def lcm_closure(U) -> set:
    U = set(U)
    while True:
        new = {_lcm(a, b) for a in U for b in U} | U
        new = division_closure(new)
        if new == U:
            return U
        U = new


def assemble(parts: Sequence, rng: random.Random | None = None) -> tuple[TruncationPoset, list[dict]]:
    """Disjoint union of ordinary sets; returns the poset and per-part norm->id maps."""
    total = sum(len(U) for U in parts)
    ids = list(range(total))
    if rng is not None:
        rng.shuffle(ids)
    it = iter(ids)
    norm, pairs, tables = {}, [], []
    for U in parts:
        table = {u: next(it) for u in sorted(U)}
        for u, i in table.items():
            norm[i] = u
            pairs += [(table[d], i) for d in divisors(u) if d in table and d != u]
        tables.append(table)
    return TruncationPoset(norm, pairs, check=False), tables


def random_poset(rng: random.Random, max_elems: int = 5, max_norm: int = 12,
                 joins: bool = False) -> TruncationPoset:
    parts = []
    room = max_elems
    while room > 0:
        U = random_truncation_set(rng, room, max_norm, joins)
        parts.append(U)
        room -= len(U)
        if rng.random() < 0.45:
            break
    return assemble(parts, rng)[0]


def _components(P: TruncationPoset) -> list[tuple[int, frozenset]]:
    return [(r, P.norm_set(r)) for r in P.roots]


def _scaled(U, n):
    """``<n>U``: all ``e*u`` with ``e | n``."""
    return frozenset(e * u for u in U for e in divisors(n))


def _division_closed_subsets(V: frozenset):
    """All non-empty division-closed subsets of V."""
    elems = sorted(V)
    out = []
    for k in range(1, len(elems) + 1):
        for combo in itertools.combinations(elems, k):
            c = set(combo)
            if all(d in c for x in c for d in divisors(x)):
                out.append(frozenset(c))
    return out


def component_shapes(V: frozenset, kind: str, *, max_size: int = 5, joins: bool = False):
    """All ``(U, n)`` giving a component map of the requested kind onto ``V``."""
    out = []
    for n in sorted(V):
        if kind == "T":
            shapes = [frozenset(v // n for v in V if v % n == 0)]
        else:
            quotient = frozenset(v // n for v in V if v % n == 0)
            shapes = _division_closed_subsets(quotient)
            if kind == "N":
                shapes = [U for U in shapes if _scaled(U, n) == V]
        for U in shapes:
            if len(U) <= max_size and (not joins or lcm_closure(U) == set(U)):
                out.append((U, n))
    return out


def random_map_into(rng: random.Random, A: TruncationPoset, kind: str, *, max_elems: int = 5,
                    joins: bool = False) -> PosetMap | None:
    """A random map of class ``kind`` (R, T or N) with target A.

    Returns None when no component of A admits a source component of the
    requested shape within the size budget.
    """
    comps = _components(A)
    parts, targets = [], []
    room = max_elems
    while comps:
        r, V = rng.choice(comps)
        shapes = component_shapes(V, kind, max_size=room, joins=joins)
        if not shapes:
            break
        U, n = rng.choice(shapes)
        parts.append(U)
        targets.append((r, n))
        room -= len(U)
        if room <= 0 or rng.random() < 0.5:
            break
    if comps and not parts:
        return None
    S, tables = assemble(parts, rng)
    assign = {}
    for (r, n), table in zip(targets, tables):
        for u, i in table.items():
            assign[i] = A.multiple(r, n * u)
    f = PosetMap(S, A, assign)
    if kind == "T" and not f.is_T or kind == "N" and not f.is_N:
        raise AssertionError(f"generator produced a {f.kind}-map when asked for {kind}")
    return f


def random_r_map(rng: random.Random, A: TruncationPoset, S: TruncationPoset) -> PosetMap | None:
    """A random R-map ``A -> S`` between given posets, if one exists."""
    assign = {}
    for r in A.roots:
        U = A.norm_set(r)
        options = [(c, n) for c in S.roots for n in sorted(S.norm_set(c))
                   if all(n * u in S.norm_set(c) for u in U)]
        if not options:
            return None
        c, n = rng.choice(options)
        for a in A.up(r):
            assign[a] = S.multiple(c, n * A.norm[a])
    return PosetMap(A, S, assign)


def random_bispan(rng: random.Random, S: TruncationPoset, T: TruncationPoset, *,
                  max_elems: int = 4, attempts: int = 50):
    """A random bispan ``S <- A -> B -> T`` with every poset having joins."""
    from .category.bispan import Bispan
    for _ in range(attempts):
        h = random_map_into(rng, T, "T", max_elems=max_elems, joins=True)
        if h is None:
            continue
        g = random_map_into(rng, h.source, "N", max_elems=max_elems, joins=True)
        if g is None:
            continue
        f = random_r_map(rng, g.source, S)
        if f is not None:
            return Bispan(f, g, h)
    return None


# --- ready-made pairs for the law checks -----------------------------------------

def rt_pair(rng: random.Random, max_elems: int = 5, max_norm: int = 12):
    """``(f, g)``: T-map ``f: S -> A`` and R-map ``g: T -> A``."""
    while True:
        A = random_poset(rng, max_elems, max_norm)
        f = random_map_into(rng, A, "T", max_elems=max_elems)
        g = random_map_into(rng, A, "R", max_elems=max_elems)
        if f is not None and g is not None and len(f.source) and len(g.source):
            return f, g


def nr_pair(rng: random.Random, max_elems: int = 5, max_norm: int = 12, joins: bool = True):
    """``(f, g)``: N-map ``f: S -> A`` and R-map ``g: T -> A``, T with joins."""
    while True:
        A = random_poset(rng, max_elems, max_norm)
        f = random_map_into(rng, A, "N", max_elems=max_elems)
        g = random_map_into(rng, A, "R", max_elems=max_elems, joins=joins)
        if f is not None and g is not None and len(f.source) and len(g.source):
            return f, g


def tn_pair(rng: random.Random, max_elems: int = 4, max_norm: int = 8):
    """``(f, g)``: T-map ``f: S -> A`` and N-map ``g: A -> T``."""
    while True:
        T = random_poset(rng, max_elems, max_norm)
        g = random_map_into(rng, T, "N", max_elems=max_elems)
        if g is None or not len(g.source):
            continue
        f = random_map_into(rng, g.source, "T", max_elems=max_elems)
        if f is not None:
            return f, g


def random_vector(rng: random.Random, P: TruncationPoset, ring, bound: int = 20):
    from .witt import WittVector
    if ring.kind == "Zmod":
        return WittVector(P, ring, {s: rng.randrange(ring.m) for s in P})
    return WittVector(P, ring, {s: rng.randint(-bound, bound) for s in P})
