"""Executable checks of the three commutation laws.

* ``rt``: ``g* f_⊕ = f'_⊕ (g')*`` (additive pullback)
* ``nr``: ``g* f_⊗ = f'_⊗ (g')*`` (multiplicative pullback)
* ``tn``: ``g_⊗ f_⊕ = t_⊕ n_⊗ r*`` (exponential diagram)

Each side is evaluated on the universal vector over ``Z[a_s]`` and on random
integer vectors, in ghost and in Witt coordinates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..maps import PosetMap
from ..rings import ZZ, Poly, PolyRing
from ..witt import (
    GhostVector,
    WittVector,
    apply_ghost,
    apply_kind,
    ghost,
    universal_vector,
)
from .exponential import exponential_diagram
from .pullback import additive_pullback, mult_pullback

LAWS = ("rt", "nr", "tn")


@dataclass
class LawReport:
    law: str
    ok: bool = True
    checks: int = 0
    diffs: list = field(default_factory=list)
    note: str = ""

    def record(self, route: str, lhs, rhs) -> None:
        self.checks += 1
        if lhs == rhs:
            return
        self.ok = False
        for s in lhs.poset.elements:
            if not lhs.ring.eq(lhs.raw(s), rhs.raw(s)):
                self.diffs.append({"route": route, "coordinate": lhs.poset.label(s),
                                   "lhs": lhs.ring.render(lhs.raw(s)),
                                   "rhs": rhs.ring.render(rhs.raw(s))})
                break

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        out = {"law": self.law, "ok": self.ok, "checks": self.checks, "diffs": self.diffs}
        if self.note:
            out["note"] = self.note
        return out


def law_sides(law: str, f: PosetMap, g: PosetMap):
    """The two words ``(lhs, rhs)`` of a law as lists of ``(kind, map)``."""
    law = law.lower()
    if law == "rt":
        pb = additive_pullback(f, g)
        return [("T", f), ("R", g)], [("R", pb.to_source), ("T", pb.to_other)]
    if law == "nr":
        pb = mult_pullback(f, g)
        return [("N", f), ("R", g)], [("R", pb.to_source), ("N", pb.to_other)]
    if law == "tn":
        ed = exponential_diagram(f, g)
        ed.check_orbits()
        return [("T", f), ("N", g)], [("R", ed.r), ("N", ed.n), ("T", ed.t)]
    raise ValueError(f"unknown law {law!r}; expected one of {LAWS}")


def _run_ghost(word, g: GhostVector) -> GhostVector:
    for kind, m in word:
        g = apply_ghost({"R": "pull", "T": "transfer", "N": "norm"}[kind], m, g)
    return g


def _run_witt(word, v: WittVector, via: str = "universal") -> WittVector:
    for kind, m in word:
        v = apply_kind({"R": "pull", "T": "transfer", "N": "norm"}[kind], m, v, via=via)
    return v


def _source_of(word):
    kind, m = word[0]
    return m.target if kind == "R" else m.source


def symbolic_ghost(P) -> GhostVector:
    """Ghost vector ``<x_s>`` of independent variables."""
    return GhostVector._from_raw(P, PolyRing(), {s: Poly.var(f"x_{s}") for s in P})


def verify_law(law: str, f: PosetMap, g: PosetMap, *, trials: int = 3, seed: int = 0,
               symbolic: bool = True, witt: bool = True, bound: int = 20) -> LawReport:
    """Compare both sides of a law; failures are reported, not raised."""
    lhs, rhs = law_sides(law, f, g)
    report = LawReport(law.lower())
    P = _source_of(lhs)
    if symbolic:
        gx = symbolic_ghost(P)
        report.record("ghost/poly", _run_ghost(lhs, gx), _run_ghost(rhs, gx))
        if witt:
            u = universal_vector(P)
            report.record("witt/poly", _run_witt(lhs, u), _run_witt(rhs, u))
    rng = random.Random(seed)
    for _ in range(trials):
        v = WittVector(P, ZZ, {s: rng.randint(-bound, bound) for s in P})
        gv = ghost(v)
        report.record("ghost/int", _run_ghost(lhs, gv), _run_ghost(rhs, gv))
        if witt:
            report.record("witt/int", _run_witt(lhs, v), _run_witt(rhs, v))
    return report

