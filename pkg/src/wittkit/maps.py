"""Maps of truncation posets and their R / T / N classification.

An R-map ``f: S -> T`` preserves divisibility and norm ratios.  A T-map is an
R-map that is a fibration (divisibility out of ``f(s)`` lifts to ``s``); an
N-map satisfies the stronger per-component condition that every element of the
target component of ``f(s)`` divides some ``f(s')`` with ``s'`` in the
component of ``s``.  Fibres are finite automatically since posets are finite.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .errors import (
    LemmaViolation,
    MapError,
    NormRatioMismatch,
    NotMonotone,
    NotNMap,
    NotOrdinary,
    NotTMap,
    SourceTargetMismatch,
)
from .poset import TruncationPoset, coproduct_with_injections, divisor_poset, scale_quotient


class PosetMap:
    """A validated R-map with eagerly computed ``is_T`` / ``is_N`` flags."""

    def __init__(self, source: TruncationPoset, target: TruncationPoset, assign: Mapping[int, int]):
        self.source = source
        self.target = target
        self.assign: dict[int, int] = {int(s): int(t) for s, t in assign.items()}
        missing = [s for s in source if s not in self.assign]
        if missing:
            raise MapError(f"assignment is not total: {missing[0]} has no image", missing[0])
        extra = [s for s in self.assign if s not in source]
        if extra:
            raise MapError(f"assignment mentions {extra[0]}, which is not in the source", extra[0])
        bad = [s for s, t in self.assign.items() if t not in target]
        if bad:
            raise MapError(f"image {self.assign[bad[0]]} of {bad[0]} is not in the target", bad[0])
        self._check_r()
        self.is_R = True
        self.is_T = self._fibration()
        self.is_N = self._strong_fibration()
        if self.is_N and not self.is_T:
            raise LemmaViolation(f"N-map that is not a T-map: {self}")

    def _check_r(self) -> None:
        S, T, f = self.source, self.target, self.assign
        for s1 in S:
            for s2 in S.up(s1):
                if not T.divides(f[s1], f[s2]):
                    raise NotMonotone(f"{s1} | {s2} but f({s1})={f[s1]} does not divide f({s2})={f[s2]}",
                                      (s1, s2))
                if T.norm[f[s2]] * S.norm[s1] != T.norm[f[s1]] * S.norm[s2]:
                    raise NormRatioMismatch(
                        f"|f({s2})|/|f({s1})| = {T.norm[f[s2]]}/{T.norm[f[s1]]} but |{s2}|/|{s1}| = "
                        f"{S.norm[s2]}/{S.norm[s1]}", (s1, s2))

    def _fibration(self) -> bool:
        return self.fibration_witness() is None

    def fibration_witness(self):
        """First ``(s, t')`` with ``f(s) | t'`` and no lift, else None."""
        S, T, f = self.source, self.target, self.assign
        for s in S:
            images = {f[x] for x in S.up(s)}
            for t in sorted(T.up(f[s])):
                if t not in images:
                    return (s, t)
        return None

    def _strong_fibration(self) -> bool:
        return self.strong_fibration_witness() is None

    def strong_fibration_witness(self):
        S, T, f = self.source, self.target, self.assign
        for r in S.roots:
            comp = S.up(r)
            for t in sorted(T.component_of(f[r])):
                if not any(T.divides(t, f[x]) for x in comp):
                    return (r, t)
        return None

    # --- mapping behaviour -----------------------------------------------
    def __call__(self, s: int) -> int:
        return self.assign[s]

    def __getitem__(self, s: int) -> int:
        return self.assign[s]

    def ratio(self, s: int) -> int:
        """``|f(s)| / |s|``, constant on components."""
        return self.target.norm[self.assign[s]] // self.source.norm[s]

    @property
    def flags(self) -> dict:
        return {"R": True, "T": self.is_T, "N": self.is_N}

    @property
    def kind(self) -> str:
        return "N" if self.is_N else ("T" if self.is_T else "R")

    @cached_property
    def key(self) -> tuple:
        return (self.source.key, self.target.key, tuple(sorted(self.assign.items())))

    def __eq__(self, other):
        if not isinstance(other, PosetMap):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        body = ", ".join(f"{self.source.label(s)}->{self.target.label(self.assign[s])}"
                         for s in self.source.elements[:10])
        return f"PosetMap[{self.kind}]({body})"

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "assign": [[s, self.assign[s]] for s in self.source.elements]}


def make_map(S: TruncationPoset, T: TruncationPoset, assign) -> PosetMap:
    if not isinstance(assign, Mapping):
        assign = dict(assign)
    return PosetMap(S, T, assign)


def fiber(f: PosetMap, t: int) -> frozenset:
    return frozenset(s for s in f.source if f.assign[s] == t)


def minimal_fiber(f: PosetMap, t: int, *, warn: bool = True) -> frozenset:
    """Minimal elements of ``{s : t | f(s)}``."""
    if warn and not f.is_N:
        warnings.warn(f"minimal_fiber on a map that is not an N-map: {f}", stacklevel=2)
    T = f.target
    cands = [s for s in f.source if T.divides(t, f.assign[s])]
    cset = set(cands)
    return frozenset(s for s in cands
                     if not any(x != s and x in cset for x in f.source.down(s)))


def compose(f: PosetMap, g: PosetMap) -> PosetMap:
    """``g ∘ f`` (apply ``f`` first)."""
    if f.target != g.source:
        raise SourceTargetMismatch("target of the first map is not the source of the second", None)
    h = PosetMap(f.source, g.target, {s: g.assign[f.assign[s]] for s in f.source})
    if f.is_N and g.is_N:
        for u in g.target:
            lhs = minimal_fiber(h, u, warn=False)
            rhs = frozenset().union(*(minimal_fiber(f, t, warn=False) for t in minimal_fiber(g, u, warn=False)))
            if lhs != rhs:
                raise LemmaViolation(f"hatted inverse images do not compose at {u}: {sorted(lhs)} vs {sorted(rhs)}")
    return h


def identity(S: TruncationPoset) -> PosetMap:
    return PosetMap(S, S, {s: s for s in S})


@dataclass(frozen=True)
class ComponentMap:
    """One source component mapped onto one target component with multiplier n."""

    source_root: int
    target_root: int
    n: int
    source_norms: frozenset = field(compare=False)
    target_norms: frozenset = field(compare=False)


def decompose(f: PosetMap, kind: str = "T") -> list[ComponentMap]:
    """Per-component description of a T-map (``V/n -> V``) or N-map (``U -> <n>U``).

    ``kind="R"`` reports the root multipliers of any map without checking a shape.
    """
    if kind == "T" and not f.is_T:
        raise NotTMap("decompose(kind='T') needs a T-map", f.fibration_witness())
    if kind == "N" and not f.is_N:
        raise NotNMap("decompose(kind='N') needs an N-map", f.strong_fibration_witness())
    S, T = f.source, f.target
    out = []
    for r in S.roots:
        img = f.assign[r]
        n = T.norm[img]
        U = S.norm_set(r)
        V = T.norm_set(img)
        if kind == "T":
            expected = frozenset(v // n for v in V if v % n == 0)
            if U != expected:
                raise LemmaViolation(f"T-map component {r} is not V/n -> V")
        elif kind == "N":
            expected = frozenset(e * u for u in U for e in _divs(n))
            if V != expected:
                raise LemmaViolation(f"N-map component {r} is not U -> <n>U")
        out.append(ComponentMap(r, T.root(img), n, U, V))
    return out


def _divs(n):
    from .rings import divisors
    return divisors(n)


def reassemble(S: TruncationPoset, T: TruncationPoset, parts: list[ComponentMap]) -> PosetMap:
    """Rebuild a map from its per-component description."""
    assign = {}
    for cm in parts:
        for s in S.up(cm.source_root):
            t = T.multiple(cm.target_root, cm.n * S.norm[s])
            if t is None:
                raise MapError(f"no element of norm {cm.n * S.norm[s]} above {cm.target_root}", s)
            assign[s] = t
    return PosetMap(S, T, assign)


# --- standard maps -----------------------------------------------------------

def fold(S: TruncationPoset) -> PosetMap:
    """``S ⊔ S -> S``."""
    P, i, j = coproduct_with_injections(S, S)
    assign = {i[s]: s for s in S}
    assign.update({j[s]: s for s in S})
    return PosetMap(P, S, assign)


def fold_many(S: TruncationPoset, copies: int) -> PosetMap:
    from .poset import disjoint_union
    P, injs = disjoint_union([S] * copies)
    return PosetMap(P, S, {inj[s]: s for inj in injs for s in S})


def inclusion(sub: TruncationPoset, sup: TruncationPoset) -> PosetMap:
    """Inclusion by ids (``sub``'s ids must be ids of ``sup``)."""
    return PosetMap(sub, sup, {s: s for s in sub})


def _by_norm(P: TruncationPoset) -> dict[int, int]:
    if len(P.roots) > 1:
        raise NotOrdinary("expected a single-component poset", None)
    return {P.norm[s]: s for s in P}


def mult_map(S: TruncationPoset, T: TruncationPoset, n: int) -> PosetMap:
    """Multiplication by n between single-component posets: ``|f(s)| = n|s|``."""
    tn = _by_norm(T)
    assign = {}
    for s in S:
        v = n * S.norm[s]
        if v not in tn:
            raise MapError(f"no element of norm {v} in the target", s)
        assign[s] = tn[v]
    return PosetMap(S, T, assign)


def mult(S: TruncationPoset, n: int, variant: str = "into") -> PosetMap:
    """For an ordinary S: ``S -> <n>S`` (``"into"``) or ``S/n -> S`` (``"from_quotient"``)."""
    quotient, scaled = scale_quotient(S, n)
    if variant == "into":
        return mult_map(S, scaled, n)
    if variant == "from_quotient":
        return mult_map(quotient, S, n)
    raise ValueError(f"unknown variant {variant!r}")


def divisor_mult(m: int, n: int) -> PosetMap:
    """``<m> -> <mn>``, multiplication by n."""
    return mult_map(divisor_poset(m), divisor_poset(m * n), n)
