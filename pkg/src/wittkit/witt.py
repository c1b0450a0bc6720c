"""Witt vectors over truncation posets.

Ghost map: ``x_s = sum_{t | s} |t| * a_t^(|s|/|t|)``.

The three operations induced by a map ``f`` are defined on ghost coordinates:

* pull (``f*``, any R-map):     ``y_s = x_{f(s)}``
* transfer (``f_⊕``, T-maps):   ``y_t = sum_{s in f^-1(t)} (|t|/|s|) x_s``
* norm (``f_⊗``, N-maps):       ``y_t = prod_{s in min f^-1(t)} x_s^(|t|/|s|)``

On Witt coordinates they are evaluated through *universal polynomials*: the
ghost-level operation is applied to the generic vector ``(a_s)`` over
``Z[a_s]`` and the result is inverted with exact division.  The polynomials
then work over any commutative ring, including ``Z/m``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import (
    HandleMismatch,
    LemmaViolation,
    NotDivisible,
    NotInImage,
    NotNMap,
    NotTMap,
    UniversalTooLarge,
    WittError,
)
from .maps import PosetMap, fold, inclusion, mult, mult_map, minimal_fiber
from .poset import TruncationPoset, coproduct_with_injections, scale_quotient
from .rings import Poly, PolyRing, RingElement, RingHandle, evaluate_raw, nu_p, prime_factors

POLY = PolyRing()

DEFAULT_MAX_DEGREE = int(os.environ.get("WITTKIT_MAX_DEGREE", "96"))
DEFAULT_MAX_TERMS = int(os.environ.get("WITTKIT_MAX_TERMS", "200000"))


class _Vector:
    kind = "vector"

    def __init__(self, poset: TruncationPoset, ring: RingHandle, coords: Mapping):
        self.poset = poset
        self.ring = ring
        raw = {}
        for s in poset:
            if s not in coords:
                raise WittError(f"coordinate {s} missing from {self.kind} vector", s)
            raw[s] = ring.coerce(coords[s])
        extra = set(coords) - set(poset.elements)
        if extra:
            raise WittError(f"coordinates {sorted(extra)} are not poset elements", sorted(extra))
        self._raw = raw

    @classmethod
    def _from_raw(cls, poset, ring, raw):
        v = cls.__new__(cls)
        v.poset, v.ring, v._raw = poset, ring, raw
        return v

    @property
    def coords(self) -> dict[int, RingElement]:
        return {s: RingElement(self.ring, self._raw[s]) for s in self.poset}

    def __getitem__(self, s) -> RingElement:
        return RingElement(self.ring, self._raw[s])

    def raw(self, s):
        return self._raw[s]

    def values(self) -> list:
        return [self._raw[s] for s in self.poset]

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.poset == other.poset and self.ring == other.ring and self._raw == other._raw

    def __hash__(self):
        return hash((self.poset, tuple(self.values())))

    def __repr__(self):
        open_, close = ("(", ")") if self.kind == "witt" else ("<", ">")
        return open_ + ", ".join(self.ring.render(x) for x in self.values()) + close

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(),
                "coords": {str(s): self.ring.render(self._raw[s]) for s in self.poset}}


class WittVector(_Vector):
    """Witt coordinates ``(a_s)``."""

    kind = "witt"


class GhostVector(_Vector):
    """Ghost coordinates ``<x_s>``."""

    kind = "ghost"


def variable_name(s: int, prefix: str = "a") -> str:
    return f"{prefix}_{s}"


def universal_vector(P: TruncationPoset, prefix: str = "a") -> WittVector:
    return WittVector._from_raw(P, POLY, {s: Poly.var(variable_name(s, prefix)) for s in P})


def zero_vector(P: TruncationPoset, ring: RingHandle) -> WittVector:
    return WittVector._from_raw(P, ring, {s: ring.zero for s in P})


# --- ghost map and its inverse ---------------------------------------------------

def _ghost_raw(P: TruncationPoset, ring: RingHandle, a: Mapping) -> dict:
    out = {}
    norm = P.norm
    for s in P:
        acc = ring.zero
        for t in P.down(s):
            acc = ring.add(acc, ring.scale(norm[t], ring.pow(a[t], norm[s] // norm[t])))
        out[s] = acc
    return out


def ghost(v: WittVector) -> GhostVector:
    return GhostVector._from_raw(v.poset, v.ring, _ghost_raw(v.poset, v.ring, v._raw))


def unghost(g: GhostVector) -> WittVector:
    """Invert the ghost map over a torsion-free ring, smallest norms first."""
    P, ring = g.poset, g.ring
    norm = P.norm
    a: dict = {}
    for s in P.elements:
        acc = g._raw[s]
        for t in P.down(s):
            if t != s:
                acc = ring.sub(acc, ring.scale(norm[t], ring.pow(a[t], norm[s] // norm[t])))
        try:
            a[s] = ring.div_exact(acc, norm[s])
        except NotDivisible as exc:
            raise NotInImage(f"ghost vector is not in the image of the ghost map at {P.label(s)}: {exc}",
                             {"element": s, "division": exc.witness}) from None
    return WittVector._from_raw(P, ring, a)


@dataclass(frozen=True)
class DworkResult:
    ok: bool
    prime: int | None = None
    element: int | None = None

    def __bool__(self):
        return self.ok


def dwork_check(g: GhostVector) -> DworkResult:
    """Congruence test for membership in the ghost image.

    For every prime p and every s with p | |s|, require
    ``x_s ≡ φ_p(x_{s/p}) (mod p^ν_p(|s|))``.
    """
    P, ring = g.poset, g.ring
    if not ring.has_frobenius_lifts:
        from .errors import NoFrobeniusLift
        raise NoFrobeniusLift(f"{ring} has no chosen Frobenius lift")
    for s in P.elements:
        n = P.norm[s]
        for p in prime_factors(n):
            below = P.quotient(s, p)
            diff = ring.sub(g._raw[s], ring.frobenius(p, g._raw[below]))
            if not ring.divisible_by(diff, p ** nu_p(n, p)):
                return DworkResult(False, p, s)
    return DworkResult(True)


# --- ghost-level operations ---------------------------------------------------

def _require(f: PosetMap, kind: str):
    if kind == "transfer" and not f.is_T:
        raise NotTMap(f"transfer needs a T-map; fibration fails at {f.fibration_witness()}",
                      f.fibration_witness())
    if kind == "norm" and not f.is_N:
        raise NotNMap(f"norm needs an N-map; strong fibration fails at {f.strong_fibration_witness()}",
                      f.strong_fibration_witness())


def _check_poset(v, P, role):
    if v.poset != P:
        raise WittError(f"vector lives on the wrong poset for the {role} of this map")


def ghost_pull(f: PosetMap, g: GhostVector) -> GhostVector:
    _check_poset(g, f.target, "target")
    return GhostVector._from_raw(f.source, g.ring, {s: g._raw[f.assign[s]] for s in f.source})


def ghost_transfer(f: PosetMap, g: GhostVector) -> GhostVector:
    _require(f, "transfer")
    _check_poset(g, f.source, "source")
    S, T, ring = f.source, f.target, g.ring
    out = {t: ring.zero for t in T}
    for s in S:
        t = f.assign[s]
        out[t] = ring.add(out[t], ring.scale(T.norm[t] // S.norm[s], g._raw[s]))
    return GhostVector._from_raw(T, ring, out)


def ghost_norm(f: PosetMap, g: GhostVector) -> GhostVector:
    _require(f, "norm")
    _check_poset(g, f.source, "source")
    S, T, ring = f.source, f.target, g.ring
    out = {}
    for t in T:
        acc = ring.one
        for s in minimal_fiber(f, t, warn=False):
            e, r = divmod(T.norm[t], S.norm[s])
            if r:
                raise LemmaViolation(f"|{s}| does not divide |{t}| in a norm exponent")
            acc = ring.mul(acc, ring.pow(g._raw[s], e))
        out[t] = acc
    return GhostVector._from_raw(T, ring, out)


GHOST_OPS: dict[str, Callable] = {"pull": ghost_pull, "transfer": ghost_transfer, "norm": ghost_norm}


# --- universal polynomials -----------------------------------------------------

@dataclass(frozen=True)
class UniversalFormula:
    """Witt-coordinate formulas for ``pull``/``transfer``/``norm`` along ``f``.

    ``polys[e]`` is the e-th output Witt coordinate as a polynomial in the
    variables ``a_<id>`` of the input poset.
    """

    map: PosetMap
    kind: str
    input_poset: TruncationPoset
    output_poset: TruncationPoset
    polys: dict

    def variables(self) -> list[str]:
        return [variable_name(s) for s in self.input_poset]

    def evaluate_raw(self, raw: Mapping, ring: RingHandle) -> dict:
        bindings = {variable_name(s): raw[s] for s in self.input_poset}
        return {e: evaluate_raw(self.polys[e], bindings, ring) for e in self.output_poset}

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "variables": self.variables(),
                "polys": {str(e): str(self.polys[e]) for e in self.output_poset}}


_MEMO: dict = {}


def clear_memo() -> None:
    _MEMO.clear()


def _endpoints(f: PosetMap, kind: str):
    if kind == "pull":
        return f.target, f.source
    return f.source, f.target


def _guard(p: Poly, max_degree: int, max_terms: int, where: str):
    if len(p) > max_terms:
        raise UniversalTooLarge(f"universal polynomial at {where} exceeds {max_terms} terms", where)
    if p.degree() > max_degree:
        raise UniversalTooLarge(f"universal polynomial at {where} exceeds degree {max_degree}", where)


def universal(f: PosetMap, kind: str, *, max_degree: int | None = None,
              max_terms: int | None = None) -> UniversalFormula:
    """Universal Witt polynomials for ``kind`` in ``{"pull", "transfer", "norm"}``.

    Memoized per (map, kind).
    """
    kind = _canon_kind(kind)
    if kind != "pull":
        _require(f, kind)
    key = (f.key, kind)
    hit = _MEMO.get(key)
    if hit is not None:
        return hit
    max_degree = DEFAULT_MAX_DEGREE if max_degree is None else max_degree
    max_terms = DEFAULT_MAX_TERMS if max_terms is None else max_terms
    src, dst = _endpoints(f, kind)
    # output coordinate e is weighted-homogeneous of weight |e| (pull: |f(e)|),
    # inputs a_s having weight |s|; so |e| bounds the plain degree
    weights = [f.target.norm[f.assign[s]] for s in f.source] if kind == "pull" else \
        [f.target.norm[t] for t in f.target]
    top = max(weights, default=1)
    if top > max_degree:
        raise UniversalTooLarge(f"expected degree up to {top} exceeds cap {max_degree}", top)
    gx = ghost(universal_vector(src))
    gy = GHOST_OPS[kind](f, gx)
    try:
        w = _unghost_guarded(gy, max_degree, max_terms)
    except NotInImage as exc:
        raise LemmaViolation(f"universal {kind} along {f} left the ghost image: {exc}") from None
    if ghost(w) != gy:
        raise LemmaViolation(f"universal {kind} along {f} does not reproduce its ghost formula")
    formula = UniversalFormula(f, kind, src, dst, dict(w._raw))
    _MEMO[key] = formula
    return formula


def _unghost_guarded(g: GhostVector, max_degree: int, max_terms: int) -> WittVector:
    P = g.poset
    norm = P.norm
    a: dict = {}
    for s in P.elements:
        acc = g._raw[s]
        for t in P.down(s):
            if t != s:
                acc = acc - (a[t] ** (norm[s] // norm[t])) * norm[t]
        try:
            a[s] = acc.div_exact(norm[s])
        except NotDivisible as exc:
            raise NotInImage(str(exc), s) from None
        _guard(a[s], max_degree, max_terms, P.label(s))
    return WittVector._from_raw(P, POLY, a)


def _canon_kind(kind: str) -> str:
    k = str(kind).lower()
    aliases = {"pull": "pull", "r": "pull", "restriction": "pull", "*": "pull",
               "transfer": "transfer", "t": "transfer", "sum": "transfer", "⊕": "transfer",
               "norm": "norm", "n": "norm", "product": "norm", "⊗": "norm"}
    if k not in aliases:
        raise ValueError(f"unknown operation kind {kind!r}")
    return aliases[k]


def _apply(f: PosetMap, kind: str, v: WittVector, via: str) -> WittVector:
    kind = _canon_kind(kind)
    if kind != "pull":
        _require(f, kind)
    src, dst = _endpoints(f, kind)
    _check_poset(v, src, "target" if kind == "pull" else "source")
    if via == "ghost":
        return unghost(GHOST_OPS[kind](f, ghost(v)))
    if via != "universal":
        raise ValueError(f"unknown route {via!r}")
    formula = universal(f, kind)
    return WittVector._from_raw(dst, v.ring, formula.evaluate_raw(v._raw, v.ring))


def pull(f: PosetMap, v: WittVector, *, via: str = "universal") -> WittVector:
    """``f*``: Witt vectors on the target to Witt vectors on the source."""
    return _apply(f, "pull", v, via)


def transfer(f: PosetMap, v: WittVector, *, via: str = "universal") -> WittVector:
    """``f_⊕`` for a T-map."""
    return _apply(f, "transfer", v, via)


def norm(f: PosetMap, v: WittVector, *, via: str = "universal") -> WittVector:
    """``f_⊗`` for an N-map."""
    return _apply(f, "norm", v, via)


def apply_kind(kind: str, f: PosetMap, v: WittVector, *, via: str = "universal") -> WittVector:
    return _apply(f, kind, v, via)


def apply_ghost(kind: str, f: PosetMap, g: GhostVector) -> GhostVector:
    return GHOST_OPS[_canon_kind(kind)](f, g)


# --- change of rings ------------------------------------------------------------

def change_ring(v: _Vector, ring: RingHandle, fn: Callable | None = None):
    """Apply a ring map coordinatewise.  Without ``fn`` the map is the
    canonical one out of Z (integer reduction) or ``Z[...] -> Z[...]``."""
    if fn is None:
        if v.ring.kind == "Z" or (v.ring.kind == "Zmod" and ring.kind == "Zmod" and v.ring.m % ring.m == 0):
            fn = ring.from_int
        elif v.ring.kind == ring.kind == "Poly":
            fn = lambda x: x  # noqa: E731
        else:
            raise HandleMismatch(f"no canonical ring map {v.ring} -> {ring}")
    return type(v)._from_raw(v.poset, ring, {s: fn(v._raw[s]) for s in v.poset})


# --- pairs of vectors through coproducts ----------------------------------------

def pair(v: WittVector, w: WittVector) -> tuple[WittVector, PosetMap]:
    """The vector on ``S ⊔ S`` built from two vectors on ``S``, with the fold map."""
    if v.poset != w.poset:
        raise WittError("vectors live on different posets")
    if v.ring != w.ring:
        raise HandleMismatch(f"vectors live in {v.ring} and {w.ring}")
    nabla = fold(v.poset)
    _, i, j = coproduct_with_injections(v.poset, v.poset)
    raw = {i[s]: v._raw[s] for s in v.poset}
    raw.update({j[s]: w._raw[s] for s in w.poset})
    return WittVector._from_raw(nabla.source, v.ring, raw), nabla


def add(v: WittVector, w: WittVector, *, via: str = "universal") -> WittVector:
    u, nabla = pair(v, w)
    return transfer(nabla, u, via=via)


def mul(v: WittVector, w: WittVector, *, via: str = "universal") -> WittVector:
    u, nabla = pair(v, w)
    return norm(nabla, u, via=via)


def restrict(v: WittVector, sub: TruncationPoset, *, via: str = "universal") -> WittVector:
    """Classical restriction ``R^S_T`` along an inclusion of ordinary truncation sets."""
    return pull(inclusion(sub, v.poset), v, via=via)


def frobenius(v: WittVector, n: int, *, via: str = "universal") -> WittVector:
    """``F_n: W_S -> W_{S/n}``."""
    return pull(mult(v.poset, n, "from_quotient"), v, via=via)


def verschiebung(v: WittVector, n: int, target: TruncationPoset | None = None, *,
                 via: str = "universal") -> WittVector:
    """``V_n: W_S -> W_T`` for ``T/n = S`` (default ``T = <n>S``)."""
    if target is None:
        _, target = scale_quotient(v.poset, n)
    return transfer(mult_map(v.poset, target, n), v, via=via)


def norm_n(v: WittVector, n: int, *, via: str = "universal") -> WittVector:
    """``N_n: W_S -> W_{<n>S}``."""
    return norm(mult(v.poset, n, "into"), v, via=via)


def classical(op: str, *args, **kwargs) -> WittVector:
    """Named classical operations: add, mul, restrict, frobenius, verschiebung, norm_n."""
    table = {"add": add, "mul": mul, "restrict": restrict, "frobenius": frobenius,
             "verschiebung": verschiebung, "norm_n": norm_n}
    if op not in table:
        raise ValueError(f"unknown classical operation {op!r}")
    return table[op](*args, **kwargs)


def witt_vector(P: TruncationPoset, ring: RingHandle, values) -> WittVector:
    """Convenience constructor; ``values`` is a mapping or a sequence in poset order."""
    if not isinstance(values, Mapping):
        values = dict(zip(P.elements, values))
    return WittVector(P, ring, values)


def ghost_vector(P: TruncationPoset, ring: RingHandle, values) -> GhostVector:
    if not isinstance(values, Mapping):
        values = dict(zip(P.elements, values))
    return GhostVector(P, ring, values)
