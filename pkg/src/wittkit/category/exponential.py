"""Exponential diagrams: rewriting ``g_⊗ f_⊕`` as ``t_⊕ n_⊗ r*``.

For a T-map ``f: S -> A`` and an N-map ``g: A -> T`` the diagram is

    S <-r- E -n-> D -t-> T

Internally the tuples indexing D are handled as *sections*.  Over a component
of T, each component ``j`` of A contributes a cyclic orbit ``Z/n_j`` (``n_j``
the multiplier of g on j) and each component ``c`` of S above j contributes
the orbit ``Z/(n_j m_c)`` (``m_c`` the multiplier of f on c), projecting onto
``Z/n_j`` by reduction.  A section picks, for every point ``y`` of every
``Z/n_j``, a point ``p`` of some orbit above j with ``p ≡ y (mod n_j)``.  The
integers act by ``(g.σ)(y) = σ(y - g) + g``.

For ``t`` in T the set of tuples over t is the set of sections fixed by
``|t|`` whose S-components are allowed at t; one tuple slot per residue
``y mod gcd(|t|, n_j)``, the slot value being ``(c, ζ)`` with
``p = y + n_j ζ``.  D_t is the set of orbits, with norm ``|t| / period``.
E is indexed by orbits of pairs ``(y, σ)`` under the diagonal action.

In these coordinates the wrap-around twist of the generator is the unit
``(n_j / gcd(|t|, n_j))^-1`` mod ``m_c`` rather than 1; :class:`ExpDTuple`
rescales ``ζ`` by that unit so the displayed tuples rotate with a plain +1
twist.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from math import gcd, prod

from ..errors import DiagramTooLarge, LemmaViolation, MapError, NotNMap, NotTMap, PosetError, SizeCapExceeded
from ..maps import PosetMap
from ..poset import TruncationPoset
from ..rings import divisors

DEFAULT_MAX_TUPLES = 10**6


def max_tuples() -> int:
    raw = os.environ.get("WITTKIT_MAX_TUPLES")
    return int(raw) if raw else DEFAULT_MAX_TUPLES


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class ExpDTuple:
    """One element of D written as a tuple ``(a, ξ) -> (s, ζ)``.

    ``choices`` is a tuple of ``((a, ξ), (s, ζ))`` pairs; ``orders[(a, ξ)]``
    is the order ``|a|/|s|`` of the group ζ lives in.
    """

    t: int
    choices: tuple
    norm: int
    orders: tuple = field(default=(), compare=False)

    def as_dict(self) -> dict:
        return dict(self.choices)

    def rotate(self) -> "ExpDTuple":
        """The generator: rotate each a-block, twisting the wrapped ζ by +1."""
        blocks: dict = {}
        for (a, xi), v in self.choices:
            blocks.setdefault(a, []).append((xi, v))
        order = dict(self.orders)
        out = []
        for a, entries in blocks.items():
            entries.sort()
            vals = [v for _, v in entries]
            n = len(vals)
            for xi in range(n):
                s, zeta = vals[xi - 1]
                if xi == 0:
                    zeta = (zeta + 1) % order[(a, n - 1)]
                out.append(((a, xi), (s, zeta)))
        new_orders = tuple(((a, xi), order[(a, (xi - 1) % len(blocks[a]))]) for (a, xi), _ in out)
        return ExpDTuple(self.t, tuple(out), self.norm, new_orders)

    def orbit_size(self) -> int:
        seen = 1
        cur = self.rotate()
        while cur.choices != self.choices:
            cur = cur.rotate()
            seen += 1
        return seen


class _Layout:
    """Component bookkeeping shared by D and E."""

    def __init__(self, f: PosetMap, g: PosetMap):
        S, A, T = f.source, f.target, g.target
        self.S, self.A, self.T = S, A, T
        self.j_of = {c: A.root(f.assign[c]) for c in S.roots}
        self.n = {j: g.ratio(j) for j in A.roots}
        self.m = {c: f.ratio(c) for c in S.roots}
        self.over_t: dict[int, list[int]] = {tau: [] for tau in T.roots}
        for j in A.roots:
            self.over_t[T.root(g.assign[j])].append(j)
        self.over_a: dict[int, list[int]] = {j: [] for j in A.roots}
        for c in S.roots:
            self.over_a[A.root(f.assign[c])].append(c)

    def slot_choices(self, t: int, j: int) -> list[tuple[int, int]]:
        L = gcd(self.T.norm[t], self.n[j])
        alen = self.T.norm[t] // L
        return [(c, z) for c in self.over_a[j] if alen % self.m[c] == 0 for z in range(self.m[c])]

    def count(self, t: int) -> int:
        tau = self.T.root(t)
        return prod(len(self.slot_choices(t, j)) ** gcd(self.T.norm[t], self.n[j]) for j in self.over_t[tau])

    def sections(self, t: int):
        tau = self.T.root(t)
        js = self.over_t[tau]
        tn = self.T.norm[t]
        per_j = []
        for j in js:
            L = gcd(tn, self.n[j])
            per_j.append(itertools.product(self.slot_choices(t, j), repeat=L))
        for combo in itertools.product(*per_j):
            yield tuple(self._extend(tn, j, slots) for j, slots in zip(js, combo))

    def _extend(self, tn: int, j: int, slots) -> tuple:
        nj = self.n[j]
        L = len(slots)
        arr = [None] * nj
        for y0, (c, z) in enumerate(slots):
            mod = nj * self.m[c]
            p0 = y0 + nj * z
            for k in range(nj // L):
                arr[(y0 + tn * k) % nj] = (c, (p0 + tn * k) % mod)
        return tuple(arr)

    def shift(self, sigma: tuple, by: int) -> tuple:
        js = self._js(sigma)
        out = []
        for j, block in zip(js, sigma):
            nj = self.n[j]
            out.append(tuple((block[(y - by) % nj][0],
                              (block[(y - by) % nj][1] + by) % (nj * self.m[block[(y - by) % nj][0]]))
                             for y in range(nj)))
        return tuple(out)

    def _js(self, sigma: tuple) -> list[int]:
        # blocks are non-empty and their first point names an S-component over j
        return [self.j_of[block[0][0]] for block in sigma]

    def period(self, sigma: tuple, tn: int) -> int:
        for d in divisors(tn):
            if self.shift(sigma, d) == sigma:
                return d
        raise LemmaViolation("section is not fixed by |t|")

    def canon(self, sigma: tuple, per: int) -> tuple:
        """Least element of the orbit of ``sigma``."""
        return min(self.shift(sigma, k) for k in range(per))


@dataclass
class ExponentialDiagram:
    """``S <-r- E -n-> D -t-> T`` with ``g_⊗ f_⊕ = t_⊕ n_⊗ r*``."""

    f: PosetMap
    g: PosetMap
    E: TruncationPoset
    D: TruncationPoset
    r: PosetMap
    n: PosetMap
    t: PosetMap
    d_keys: dict  # D id -> (t, canonical section)
    e_keys: dict  # E id -> (t, A-component, canonical section)
    _layout: _Layout = field(repr=False, default=None)

    def d_tuple(self, d: int) -> ExpDTuple:
        """Element ``d`` of D as a tuple indexed by ``(a, ξ)``."""
        lay = self._layout
        t, sigma = self.d_keys[d]
        tn = lay.T.norm[t]
        tau = lay.T.root(t)
        choices, orders = [], []
        for j, block in zip(lay.over_t[tau], sigma):
            nj = lay.n[j]
            L = gcd(tn, nj)
            a = lay.A.multiple(j, tn // L)
            unit = nj // L
            for xi in range(L):
                c, p = block[xi]
                mc = lay.m[c]
                zeta = ((p - xi) // nj) % mc
                s = lay.S.multiple(c, lay.A.norm[a] // mc)
                choices.append(((a, xi), (s, (unit * zeta) % mc)))
                orders.append(((a, xi), mc))
        return ExpDTuple(t, tuple(choices), self.D.norm[d], tuple(orders))

    def check_orbits(self) -> None:
        """Orbit size times norm equals ``|t|`` for every element of D."""
        for d in self.D:
            tup = self.d_tuple(d)
            tn = self.T.norm[tup.t]
            if tup.orbit_size() * tup.norm != tn:
                raise LemmaViolation(f"orbit of {tup} has size {tup.orbit_size()}, norm {tup.norm}, |t| = {tn}")

    @property
    def T(self) -> TruncationPoset:
        return self.g.target

    @property
    def S(self) -> TruncationPoset:
        return self.f.source


def exponential_diagram(f: PosetMap, g: PosetMap, *, cap: int | None = None) -> ExponentialDiagram:
    """Build the exponential diagram for a T-map ``f: S -> A`` and N-map ``g: A -> T``."""
    if not f.is_T:
        raise NotTMap("exponential diagram needs a T-map on the left", f.fibration_witness())
    if not g.is_N:
        raise NotNMap("exponential diagram needs an N-map on the right", g.strong_fibration_witness())
    if f.target != g.source:
        raise LemmaViolation("f and g are not composable")
    cap = max_tuples() if cap is None else cap
    lay = _Layout(f, g)
    S, A, T = lay.S, lay.A, lay.T
    total = sum(lay.count(t) for t in T)
    if total > cap:
        raise DiagramTooLarge(f"exponential diagram needs {total} tuples, cap is {cap} (WITTKIT_MAX_TUPLES)",
                              total)

    d_set: dict = {}
    e_set: dict = {}
    for t in T.elements:
        tn = T.norm[t]
        tau = T.root(t)
        e_here = {j: A.multiple(j, tn // lay.n[j]) for j in lay.over_t[tau]
                  if tn % lay.n[j] == 0 and A.multiple(j, tn // lay.n[j]) is not None}
        for sigma in lay.sections(t):
            per = lay.period(sigma, tn)
            d_set.setdefault((t, lay.canon(sigma, per)), tn // per)
            for j in e_here:
                nj = lay.n[j]
                orbit = _lcm(nj, per)
                key = (t, j, min(lay.shift(sigma, nj * k) for k in range(orbit // nj)))
                e_set.setdefault(key, tn // orbit)

    order_t = {t: i for i, t in enumerate(T.elements)}
    d_list = sorted(d_set, key=lambda k: (order_t[k[0]], k[1]))
    d_id = {k: i for i, k in enumerate(d_list)}
    by_section: dict = {}
    for k in d_list:
        by_section.setdefault(k[1], []).append(k)
    d_pairs = [(d_id[k1], d_id[k2]) for grp in by_section.values() for k1 in grp for k2 in grp
               if k1 != k2 and T.divides(k1[0], k2[0])]
    d_labels = {d_id[k]: f"{T.label(k[0])}#{_short(k[1])}" for k in d_list}
    try:
        D = TruncationPoset({d_id[k]: d_set[k] for k in d_list}, d_pairs, d_labels)
    except SizeCapExceeded as exc:
        raise DiagramTooLarge(f"D: {exc}", exc.witness) from None
    except PosetError as exc:
        raise LemmaViolation(f"D is not a truncation poset: {exc}") from None

    e_list = sorted(e_set, key=lambda k: (order_t[k[0]], k[1], k[2]))
    e_id = {k: i for i, k in enumerate(e_list)}
    by_es: dict = {}
    for k in e_list:
        by_es.setdefault((k[1], k[2]), []).append(k)
    e_pairs = [(e_id[k1], e_id[k2]) for grp in by_es.values() for k1 in grp for k2 in grp
               if k1 != k2 and T.divides(k1[0], k2[0])]
    e_labels = {e_id[k]: f"{T.label(k[0])}@{A.label(k[1])}#{_short(k[2])}" for k in e_list}
    try:
        E = TruncationPoset({e_id[k]: e_set[k] for k in e_list}, e_pairs, e_labels)
    except SizeCapExceeded as exc:
        raise DiagramTooLarge(f"E: {exc}", exc.witness) from None
    except PosetError as exc:
        raise LemmaViolation(f"E is not a truncation poset: {exc}") from None

    r_assign, n_assign = {}, {}
    for k in e_list:
        t, j, sigma = k
        tn = T.norm[t]
        idx = lay.over_t[T.root(t)].index(j)
        c = sigma[idx][0][0]
        s = S.multiple(c, tn // (lay.n[j] * lay.m[c]))
        if s is None:
            raise LemmaViolation(f"no element of S below {T.label(t)} for {k}")
        r_assign[e_id[k]] = s
        per = lay.period(sigma, tn)
        n_assign[e_id[k]] = d_id[(t, lay.canon(sigma, per))]
    t_assign = {d_id[k]: k[0] for k in d_list}
    try:
        r = PosetMap(E, S, r_assign)
        n = PosetMap(E, D, n_assign)
        tmap = PosetMap(D, T, t_assign)
    except MapError as exc:
        raise LemmaViolation(f"exponential diagram map is not an R-map: {exc}") from None
    if not n.is_N:
        raise LemmaViolation(f"n is not an N-map: {n.strong_fibration_witness()}")
    if not tmap.is_T:
        raise LemmaViolation(f"t is not a T-map: {tmap.fibration_witness()}")
    return ExponentialDiagram(f, g, E, D, r, n, tmap,
                              {d_id[k]: k for k in d_list},
                              {e_id[k]: k for k in e_list}, lay)


def _short(sigma: tuple) -> str:
    return "|".join(".".join(f"{c}:{p}" for c, p in block) for block in sigma) or "-"
