"""Bispans ``S <-f- A -g-> B -h-> T`` and their composition.

A bispan evaluates on Witt vectors as ``h_⊕ ∘ g_⊗ ∘ f*``.  Composition
rewrites the six-leg word into normal form with one additive pullback, two
multiplicative pullbacks and one exponential diagram; all posets must have
joins so the multiplicative pullbacks exist.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import DoesNotExist, JoinsRequired, LemmaViolation, NotNMap, NotTMap, SourceTargetMismatch
from ..maps import PosetMap, compose, identity
from ..poset import TruncationPoset, has_joins
from ..witt import WittVector, norm, pull, transfer
from .exponential import exponential_diagram
from .pullback import additive_pullback, mult_pullback

ARROW_KINDS = ("R", "T", "N")


def evaluate_morphism(word: Sequence[tuple[str, PosetMap]], v: WittVector, *,
                      via: str = "universal") -> WittVector:
    """Apply a word of tagged arrows left to right.

    ``("R", f)`` pulls back along ``f`` (so ``v`` must live on f's target),
    ``("T", f)`` transfers and ``("N", f)`` takes the norm along ``f``.
    """
    out = v
    for i, (kind, f) in enumerate(word):
        kind = kind.upper()
        expected = f.target if kind == "R" else f.source
        if out.poset != expected:
            raise SourceTargetMismatch(f"arrow {i} ({kind}) does not start where the previous one ends", i)
        try:
            if kind == "R":
                out = pull(f, out, via=via)
            elif kind == "T":
                out = transfer(f, out, via=via)
            elif kind == "N":
                out = norm(f, out, via=via)
            else:
                raise ValueError(f"unknown arrow kind {kind!r} at position {i}")
        except (NotTMap, NotNMap) as exc:
            exc.args = (f"arrow {i}: {exc}",)
            raise
    return out


@dataclass(frozen=True)
class Bispan:
    """``source <-f- A -g-> B -h-> target`` with f an R-map, g an N-map, h a T-map."""

    f: PosetMap
    g: PosetMap
    h: PosetMap

    def __post_init__(self):
        if self.f.source != self.g.source:
            raise SourceTargetMismatch("the R-leg and N-leg must share their source", "f/g")
        if self.g.target != self.h.source:
            raise SourceTargetMismatch("the N-leg must end where the T-leg starts", "g/h")
        if not self.g.is_N:
            raise NotNMap("middle leg of a bispan must be an N-map", self.g.strong_fibration_witness())
        if not self.h.is_T:
            raise NotTMap("last leg of a bispan must be a T-map", self.h.fibration_witness())

    @property
    def source(self) -> TruncationPoset:
        return self.f.target

    @property
    def target(self) -> TruncationPoset:
        return self.h.target

    @property
    def objects(self) -> tuple[TruncationPoset, ...]:
        return (self.f.target, self.f.source, self.h.source, self.h.target)

    def word(self) -> list[tuple[str, PosetMap]]:
        return [("R", self.f), ("N", self.g), ("T", self.h)]

    def evaluate(self, v: WittVector, *, via: str = "universal") -> WittVector:
        return evaluate_morphism(self.word(), v, via=via)

    def to_json(self) -> dict:
        return {"legs": [{"kind": k, "map": m.to_json()} for k, m in self.word()]}


def identity_bispan(S: TruncationPoset) -> Bispan:
    i = identity(S)
    return Bispan(i, i, i)


def from_r(f: PosetMap) -> Bispan:
    """``f*`` as a bispan."""
    i = identity(f.source)
    return Bispan(f, i, i)


def from_n(g: PosetMap) -> Bispan:
    return Bispan(identity(g.source), g, identity(g.target))


def from_t(h: PosetMap) -> Bispan:
    return Bispan(identity(h.source), identity(h.source), h)


def _require_joins(b: Bispan, tag: str) -> None:
    for name, P in zip(("source", "A", "B", "target"), b.objects):
        if not has_joins(P):
            raise JoinsRequired(f"{tag} {name} poset lacks joins", f"{tag}.{name}")


def compose_bispans(b1: Bispan, b2: Bispan) -> Bispan:
    """Normal form of ``b2 ∘ b1`` (apply b1 first)."""
    if b1.target != b2.source:
        raise SourceTargetMismatch("bispans are not composable", None)
    _require_joins(b1, "first")
    _require_joins(b2, "second")
    # h2⊕ g2⊗ f2* h1⊕ g1⊗ f1*
    p1 = additive_pullback(b1.h, b2.f)                  # f2* h1⊕ = h'⊕ g'*
    g_p, h_p = p1.to_source, p1.to_other
    p2 = _mult_pullback(b1.g, g_p)                      # g'* g1⊗ = g1'⊗ g''*
    g_pp, g1_p = p2.to_source, p2.to_other
    ed = exponential_diagram(h_p, b2.g)                 # g2⊗ h'⊕ = t⊕ n⊗ r*
    p3 = _mult_pullback(g1_p, ed.r)                     # r* g1'⊗ = g1''⊗ r'*
    r_p, g1_pp = p3.to_source, p3.to_other
    f = compose(compose(r_p, g_pp), b1.f)
    g = compose(g1_pp, ed.n)
    h = compose(ed.t, b2.h)
    return Bispan(f, g, h)


def _mult_pullback(f: PosetMap, g: PosetMap):
    try:
        return mult_pullback(f, g)
    except DoesNotExist as exc:
        if has_joins(g.source):
            raise LemmaViolation(f"multiplicative pullback missing although the source has joins: {exc}") from None
        raise JoinsRequired(f"intermediate poset lacks joins: {exc}", exc.witness) from None


# --- isomorphism of bispans --------------------------------------------------

def _component_maps(P: TruncationPoset, Q: TruncationPoset):
    """Candidate component bijections as norm-matched element maps, per root of P."""
    out = {}
    for r in P.roots:
        ns = P.norm_set(r)
        out[r] = [q for q in Q.roots if Q.norm_set(q) == ns]
    return out


def _extend(P: TruncationPoset, Q: TruncationPoset, r: int, q: int) -> dict:
    return {s: Q.multiple(q, P.norm[s]) for s in P.up(r)}


def bispan_isomorphism(b1: Bispan, b2: Bispan):
    """Poset isomorphisms ``(phi_A, phi_B)`` identifying two bispans, or None.

    Requires the same outer objects; searches component bijections by
    backtracking.
    """
    if b1.source != b2.source or b1.target != b2.target:
        return None
    A1, B1, A2, B2 = b1.g.source, b1.h.source, b2.g.source, b2.h.source
    if len(A1) != len(A2) or len(B1) != len(B2) or len(A1.roots) != len(A2.roots) \
            or len(B1.roots) != len(B2.roots):
        return None
    b_cands = _component_maps(B1, B2)
    a_cands = _component_maps(A1, A2)
    b_roots = list(B1.roots)
    a_roots = list(A1.roots)

    def search_b(i, used, phi):
        if i == len(b_roots):
            return search_a(0, set(), {}, phi)
        r = b_roots[i]
        for q in b_cands[r]:
            if q in used:
                continue
            ext = _extend(B1, B2, r, q)
            if all(b2.h.assign[ext[s]] == b1.h.assign[s] for s in ext):
                res = search_b(i + 1, used | {q}, {**phi, **ext})
                if res is not None:
                    return res
        return None

    def search_a(i, used, phi, phi_b):
        if i == len(a_roots):
            return phi, phi_b
        r = a_roots[i]
        for q in a_cands[r]:
            if q in used:
                continue
            ext = _extend(A1, A2, r, q)
            if all(b2.f.assign[ext[s]] == b1.f.assign[s] and b2.g.assign[ext[s]] == phi_b[b1.g.assign[s]]
                   for s in ext):
                res = search_a(i + 1, used | {q}, {**phi, **ext}, phi_b)
                if res is not None:
                    return res
        return None

    return search_b(0, frozenset(), {})


def is_isomorphic(b1: Bispan, b2: Bispan) -> bool:
    return bispan_isomorphism(b1, b2) is not None

