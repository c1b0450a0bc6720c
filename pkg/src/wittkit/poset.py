"""Finite truncation posets.

A truncation poset is a finite poset (written ``s | t``) with a norm
``|s| >= 1`` such that

1. ``s | t`` implies ``|s|`` divides ``|t|``;
2. ``s | t | u`` implies ``|u|/|s| = (|u|/|t|) * (|t|/|s|)``;
3. for every ``s`` and every divisor ``d`` of ``|s|`` there is exactly one
   ``t | s`` with ``|t| = |s|/d``;
4. for every ``s`` and every ``d`` there is at most one ``t`` with ``s | t``
   and ``|t| = d*|s|``.

Elements are integer ids.  The poset splits into connected components, one per
norm-1 element, each isomorphic (through the norm) to an ordinary truncation
set of positive integers closed under division.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

from .errors import (
    AxiomViolation,
    LengthNotDivisible,
    NotDivisionClosed,
    NotOrdinary,
    NotPartialOrder,
    SizeCapExceeded,
    WeightViolation,
)
from .rings import divisors, natural_key

DEFAULT_MAX_ELEMS = 10_000


def max_elements() -> int:
    raw = os.environ.get("WITTKIT_MAX_ELEMS")
    return int(raw) if raw else DEFAULT_MAX_ELEMS


class TruncationPoset:
    """An immutable, validated truncation poset.

    Build one with :func:`validate` (raw data) or one of the constructors
    (:func:`divisor_poset`, :func:`from_set`, :func:`gcd_poset`, ...).
    ``elements`` is sorted by ``(norm, label, id)``.
    """

    def __init__(self, norm: Mapping[int, int], divides: Iterable[tuple[int, int]] = (),
                 labels: Mapping[int, str] | None = None, *, check: bool = True):
        cap = max_elements()
        if len(norm) > cap:
            raise SizeCapExceeded(f"poset has {len(norm)} elements, cap is {cap} (WITTKIT_MAX_ELEMS)",
                                  len(norm))
        self.norm: dict[int, int] = {int(s): int(n) for s, n in norm.items()}
        self.labels: dict[int, str] = {int(k): str(v) for k, v in (labels or {}).items()}
        for s, n in self.norm.items():
            if n < 1:
                raise AxiomViolation(1, (s,), f"norm {n} is not a positive integer")
        up: dict[int, set] = {s: {s} for s in self.norm}
        for s, t in divides:
            if s not in self.norm or t not in self.norm:
                raise NotPartialOrder(f"relation ({s}, {t}) mentions an unknown element", (s, t))
            up[s].add(t)
        self._up = _transitive_closure(up)
        self.elements: tuple[int, ...] = tuple(
            sorted(self.norm, key=lambda s: (self.norm[s], natural_key(self.labels.get(s, "")), s)))
        self._down: dict[int, frozenset] = {s: set() for s in self.norm}
        for s, ups in self._up.items():
            for t in ups:
                self._down[t].add(s)
        self._down = {s: frozenset(d) for s, d in self._down.items()}
        if check:
            self._check_axioms()

    # --- validation -------------------------------------------------------
    def _check_axioms(self) -> None:
        norm = self.norm
        for s in self.elements:
            for t in self._up[s]:
                if t != s and s in self._up[t]:
                    raise NotPartialOrder(f"{s} and {t} divide each other", (s, t))
        for s in self.elements:
            for t in sorted(self._up[s]):
                if norm[t] % norm[s]:
                    raise AxiomViolation(1, (s, t), f"|{s}|={norm[s]} does not divide |{t}|={norm[t]}")
        for s in self.elements:
            for t in sorted(self._up[s]):
                for u in sorted(self._up[t]):
                    if norm[u] % norm[s] or norm[u] % norm[t] or norm[t] % norm[s] \
                            or norm[u] // norm[s] != (norm[u] // norm[t]) * (norm[t] // norm[s]):
                        raise AxiomViolation(2, (s, t, u))
        for s in self.elements:
            down_by_norm: dict[int, list] = {}
            for t in self._down[s]:
                down_by_norm.setdefault(norm[t], []).append(t)
            for d in divisors(norm[s]):
                found = down_by_norm.get(norm[s] // d, [])
                if len(found) != 1:
                    raise AxiomViolation(3, (s, d), f"{len(found)} divisors of {s} with norm {norm[s] // d}")
        for s in self.elements:
            seen: dict[int, int] = {}
            for t in sorted(self._up[s]):
                if norm[t] in seen:
                    raise AxiomViolation(4, (s, seen[norm[t]], t),
                                         f"two multiples of {s} with norm {norm[t]}")
                seen[norm[t]] = t

    # --- basic queries ----------------------------------------------------
    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, s):
        return s in self.norm

    def divides(self, s: int, t: int) -> bool:
        return t in self._up[s]

    def up(self, s: int) -> frozenset:
        """All ``t`` with ``s | t`` (including ``s``)."""
        return self._up[s]

    def down(self, s: int) -> frozenset:
        """All ``t`` with ``t | s`` (including ``s``)."""
        return self._down[s]

    def label(self, s: int) -> str:
        return self.labels.get(s, str(s))

    def quotient(self, s: int, d: int) -> int:
        """The unique ``t | s`` with ``|t| = |s|/d`` (written ``s/d``)."""
        target = self.norm[s] // d
        if self.norm[s] % d:
            raise ValueError(f"{d} does not divide |{s}| = {self.norm[s]}")
        for t in self._down[s]:
            if self.norm[t] == target:
                return t
        raise AssertionError("axiom 3 guarantees a divisor")

    def multiple(self, s: int, d: int) -> int | None:
        """The ``t`` with ``s | t`` and ``|t| = d*|s|``, if present."""
        target = self.norm[s] * d
        for t in self._up[s]:
            if self.norm[t] == target:
                return t
        return None

    def root(self, s: int) -> int:
        return self._roots[s]

    def in_same_component(self, s: int, t: int) -> bool:
        return self._roots[s] == self._roots[t]

    @cached_property
    def _roots(self) -> dict[int, int]:
        out = {}
        for s in self.elements:
            for t in self._down[s]:
                if self.norm[t] == 1:
                    out[s] = t
                    break
        return out

    @cached_property
    def roots(self) -> tuple[int, ...]:
        return tuple(s for s in self.elements if self.norm[s] == 1)

    def component_of(self, s: int) -> frozenset:
        return self._up[self._roots[s]]

    def covers(self) -> list[tuple[int, int]]:
        """Hasse diagram: pairs ``(s, t)`` with ``t`` covering ``s``."""
        out = []
        for s in self.elements:
            for t in self._up[s]:
                if t == s:
                    continue
                if not any(u != s and u != t and t in self._up[u] for u in self._up[s]):
                    out.append((s, t))
        return sorted(out, key=lambda p: (self.elements.index(p[0]), self.elements.index(p[1])))

    def is_ordinary(self) -> bool:
        """True when ids are positive integers, norm is the identity and
        divisibility is integer divisibility."""
        if any(s != n for s, n in self.norm.items()):
            return False
        return all((t % s == 0) == (t in self._up[s]) for s in self.norm for t in self.norm)

    def norm_set(self, s: int | None = None) -> frozenset:
        """Norms occurring in the component of ``s`` (whole poset if None)."""
        elems = self.component_of(s) if s is not None else self.elements
        return frozenset(self.norm[t] for t in elems)

    # --- identity ---------------------------------------------------------
    @cached_property
    def key(self) -> tuple:
        """Canonical serialization (ids, norms and relation; labels excluded)."""
        return (tuple((s, self.norm[s]) for s in sorted(self.norm)),
                tuple(sorted((s, t) for s in self.norm for t in self._up[s] if s != t)))

    def __eq__(self, other):
        if not isinstance(other, TruncationPoset):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        body = ", ".join(f"{self.label(s)}:{self.norm[s]}" for s in self.elements[:12])
        more = ", ..." if len(self) > 12 else ""
        return f"TruncationPoset({body}{more})"

    def to_json(self) -> dict:
        elems = []
        for s in self.elements:
            e = {"id": s, "norm": self.norm[s]}
            if s in self.labels:
                e["label"] = self.labels[s]
            elems.append(e)
        return {"elements": elems, "divides": [list(p) for p in self.covers()]}


def _transitive_closure(up: dict[int, set]) -> dict[int, frozenset]:
    closed: dict[int, frozenset] = {}
    for s in up:
        seen = set()
        stack = [s]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(up[x] - seen)
        closed[s] = frozenset(seen)
    return closed


# --- the public operations ----------------------------------------------------

def validate(data) -> TruncationPoset:
    """Validate raw poset data.

    Accepts a :class:`TruncationPoset` (returned unchanged), the JSON form
    ``{"elements": [{"id", "norm", "label"?}], "divides": [[s, t], ...]}``, or
    the shorthand forms ``{"divisors_of": n}``, ``{"set": [...]}``,
    ``{"gcd_tuples": [...], "weights": [...]}``,
    ``{"words": [...], "letters": n, "block": a}`` and
    ``{"coproduct": [P, Q, ...]}``.
    """
    if isinstance(data, TruncationPoset):
        return data
    if not isinstance(data, Mapping):
        raise TypeError(f"cannot read a poset from {type(data).__name__}")
    if "divisors_of" in data:
        return divisor_poset(int(data["divisors_of"]))
    if "set" in data:
        return from_set(data["set"])
    if "gcd_tuples" in data:
        return gcd_poset(data["gcd_tuples"], data.get("weights"))
    if "words" in data:
        return word_poset(data["words"], data.get("block", 1), data.get("letters"))
    if "coproduct" in data:
        parts = [validate(p) for p in data["coproduct"]]
        out = parts[0] if parts else TruncationPoset({})
        for p in parts[1:]:
            out = coproduct(out, p)
        return out
    norm = {}
    labels = {}
    for e in data.get("elements", []):
        norm[int(e["id"])] = int(e["norm"])
        if e.get("label") is not None:
            labels[int(e["id"])] = str(e["label"])
    pairs = [(int(s), int(t)) for s, t in data.get("divides", [])]
    return TruncationPoset(norm, pairs, labels)


@dataclass(frozen=True)
class ComponentPartition:
    """Connected components, each given as (root, elements)."""

    roots: tuple[int, ...]
    components: tuple[frozenset, ...]

    def __len__(self):
        return len(self.components)

    def index_of(self, s: int) -> int:
        for i, comp in enumerate(self.components):
            if s in comp:
                return i
        raise KeyError(s)


def components(P: TruncationPoset) -> ComponentPartition:
    roots = P.roots
    comps = tuple(P.up(r) for r in roots)
    covered = set().union(*comps) if comps else set()
    if covered != set(P.elements) or sum(len(c) for c in comps) != len(P):
        raise AssertionError("components do not partition the poset")
    return ComponentPartition(roots, comps)


def component_as_set(P: TruncationPoset, root: int) -> TruncationPoset:
    """The component of ``root`` relabelled through the norm."""
    return from_set(P.norm[s] for s in P.up(root))


def divisor_poset(n: int) -> TruncationPoset:
    """``<n>``: the divisors of n."""
    if n < 1:
        raise ValueError("n must be positive")
    return _ordinary(divisors(n))


def _ordinary(values: Iterable[int]) -> TruncationPoset:
    vals = sorted(set(values))
    vs = set(vals)
    pairs = [(d, v) for v in vals for d in divisors(v) if d in vs and d != v]
    return TruncationPoset({v: v for v in vals}, pairs, check=False)


def from_set(naturals: Iterable[int]) -> TruncationPoset:
    """An ordinary truncation set (norm = identity)."""
    vals = sorted({int(x) for x in naturals})
    if any(v < 1 for v in vals):
        raise NotDivisionClosed("truncation sets contain positive integers only",
                                [v for v in vals if v < 1][0])
    vs = set(vals)
    for v in vals:
        for d in divisors(v):
            if d not in vs:
                raise NotDivisionClosed(f"{d} divides {v} but is missing", (d, v))
    return _ordinary(vals)


def division_closure(naturals: Iterable[int]) -> set[int]:
    out = set()
    for v in naturals:
        out.update(divisors(int(v)))
    return out


def scale_quotient(P: TruncationPoset, n: int) -> tuple[TruncationPoset, TruncationPoset]:
    """For an ordinary truncation set S return ``(S/n, <n>S)``."""
    if not P.is_ordinary():
        raise NotOrdinary("scale_quotient needs an ordinary truncation set", None)
    S = set(P.elements)
    quotient = {t // n for t in S if t % n == 0}
    scaled = {e * s for s in S for e in divisors(n)}
    if {t // n for t in scaled if t % n == 0} != S:
        raise AssertionError("(<n>S)/n != S")
    return _ordinary(quotient), _ordinary(scaled)


def coproduct_with_injections(P: TruncationPoset, Q: TruncationPoset):
    """``P ⊔ Q`` together with the id maps ``P -> P⊔Q`` and ``Q -> P⊔Q``."""
    inj_p = {s: i for i, s in enumerate(P.elements)}
    inj_q = {s: len(P) + i for i, s in enumerate(Q.elements)}
    norm = {inj_p[s]: P.norm[s] for s in P}
    norm.update({inj_q[s]: Q.norm[s] for s in Q})
    labels = {inj_p[s]: f"0.{P.label(s)}" for s in P}
    labels.update({inj_q[s]: f"1.{Q.label(s)}" for s in Q})
    pairs = [(inj_p[s], inj_p[t]) for s in P for t in P.up(s) if s != t]
    pairs += [(inj_q[s], inj_q[t]) for s in Q for t in Q.up(s) if s != t]
    return TruncationPoset(norm, pairs, labels, check=False), inj_p, inj_q


def coproduct(P: TruncationPoset, Q: TruncationPoset) -> TruncationPoset:
    return coproduct_with_injections(P, Q)[0]


def disjoint_union(parts: Sequence[TruncationPoset]):
    """Coproduct of many posets with flat tagging; returns (poset, injections)."""
    norm, labels, pairs, injections = {}, {}, [], []
    nxt = 0
    for k, P in enumerate(parts):
        inj = {}
        for s in P.elements:
            inj[s] = nxt
            norm[nxt] = P.norm[s]
            labels[nxt] = f"{k}.{P.label(s)}"
            nxt += 1
        pairs += [(inj[s], inj[t]) for s in P for t in P.up(s) if s != t]
        injections.append(inj)
    return TruncationPoset(norm, pairs, labels, check=False), injections


def gcd_poset(tuples: Iterable[Sequence[int]], weights: Sequence[int] | None = None) -> TruncationPoset:
    """Subsets of N^k ordered by ``t = d*s`` with norm the gcd of ``s_i/a_i``."""
    pts = sorted({tuple(int(x) for x in t) for t in tuples})
    if not pts:
        return TruncationPoset({})
    k = len(pts[0])
    if any(len(p) != k for p in pts):
        raise ValueError("all tuples must have the same length")
    w = tuple(int(a) for a in weights) if weights else (1,) * k
    if len(w) != k or any(a < 1 for a in w):
        raise WeightViolation("weights must be positive and match the tuple length", w)
    for p in pts:
        if any(x < 1 for x in p):
            raise NotDivisionClosed("tuple coordinates must be positive", p)
        for x, a in zip(p, w):
            if x % a:
                raise WeightViolation(f"{a} does not divide coordinate {x} of {p}", (p, w))
    reduced = {p: tuple(x // a for x, a in zip(p, w)) for p in pts}
    norms = {p: _gcd_all(r) for p, r in reduced.items()}
    index = {p: i for i, p in enumerate(pts)}
    pset = set(pts)
    pairs = []
    for p in pts:
        g = norms[p]
        for d in divisors(g):
            q = tuple(a * (r // d) for r, a in zip(reduced[p], w))
            if q not in pset:
                raise NotDivisionClosed(f"{q} = {p}/{d} is missing", (q, p))
            if d != 1:
                pairs.append((index[q], index[p]))
    labels = {index[p]: "(" + ",".join(map(str, p)) + ")" for p in pts}
    return TruncationPoset({index[p]: norms[p] for p in pts}, pairs, labels)


def _gcd_all(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g


_X_TOKEN = re.compile(r"x\d+")


def _tokenize_word(w) -> tuple:
    if isinstance(w, str):
        compact = w.replace(" ", "")
        if re.fullmatch(r"(x\d+)+", compact):
            return tuple(_X_TOKEN.findall(compact))
        return tuple(compact)
    return tuple(str(x) for x in w)


def _block_rotations(word: tuple, a: int) -> list[tuple]:
    m = len(word) // a
    return [word[j * a:] + word[:j * a] for j in range(m)]


def _word_norm(word: tuple, a: int) -> int:
    m = len(word) // a
    for p in range(1, m + 1):
        if m % p == 0 and word == word[:p * a] * (m // p):
            return m // p
    return 1


def word_poset(words: Iterable, block: int = 1, letters: int | None = None) -> TruncationPoset:
    """Words modulo cyclic permutation of blocks of ``block`` letters.

    ``[u] | [w]`` iff ``w ~ u'^d`` for some ``u' ~ u``; the norm of ``[w]`` is the
    largest ``d`` with ``w`` a d-th power of a word whose length is a multiple of
    ``block``.  Words may be strings (``"x1x2x1x2"`` or ``"abab"``) or token lists.
    """
    a = int(block)
    if a < 1:
        raise ValueError("block must be positive")
    classes: dict[tuple, tuple] = {}
    for w in words:
        tok = _tokenize_word(w)
        if not tok or len(tok) % a:
            raise LengthNotDivisible(f"length {len(tok)} of {''.join(tok)} is not a positive multiple of {a}",
                                     "".join(tok))
        if letters is not None and len(set(tok)) > int(letters):
            raise ValueError(f"{''.join(tok)} uses more than {letters} letters")
        canon = min(_block_rotations(tok, a))
        classes[canon] = canon
    reps = sorted(classes, key=lambda w: (len(w), w))
    index = {w: i for i, w in enumerate(reps)}
    norms = {w: _word_norm(w, a) for w in reps}
    pairs = []
    for w in reps:
        for d in divisors(norms[w]):
            root = w[: len(w) // d]
            canon = min(_block_rotations(root, a))
            if canon not in index:
                raise NotDivisionClosed(f"{''.join(canon)} divides {''.join(w)} but is missing",
                                        ("".join(canon), "".join(w)))
            if d != 1:
                pairs.append((index[canon], index[w]))
    labels = {index[w]: "".join(w) for w in reps}
    return TruncationPoset({index[w]: norms[w] for w in reps}, pairs, labels)


def has_joins(P: TruncationPoset) -> bool:
    """Every two elements with a common divisor have a common multiple.

    Within a component (isomorphic to an ordinary truncation set U through the
    norm) this holds iff U is closed under lcm; distinct components never share
    a divisor.
    """
    for r in P.roots:
        norms = sorted(P.norm[s] for s in P.up(r))
        ns = set(norms)
        for x, y in itertools.combinations(norms, 2):
            if x * y // gcd(x, y) not in ns:
                return False
    return True


def has_joins_bruteforce(P: TruncationPoset) -> bool:
    for t in P:
        for t1 in P.up(t):
            for t2 in P.up(t):
                if not any(P.divides(t1, u) and P.divides(t2, u) for u in P):
                    return False
    return True


def join(P: TruncationPoset, s: int, t: int) -> int | None:
    """Least common multiple of two elements of one component, if present."""
    if not P.in_same_component(s, t):
        return None
    r = P.root(s)
    target = P.norm[s] * P.norm[t] // gcd(P.norm[s], P.norm[t])
    return P.multiple(r, target)
