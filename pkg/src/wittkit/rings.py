"""Exact coefficient rings: the integers, the integers mod m, and sparse
multivariate polynomials over the integers.

Witt vector code works on *raw* values (``int`` or :class:`Poly`) through the
methods of a :class:`RingHandle`; :class:`RingElement` is the user-facing
wrapper with operator overloading.

A polynomial is a dict from monomials to nonzero ``int`` coefficients.  A
monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable name,
with exponent >= 1; the empty tuple is the constant monomial.

    a_1^2 + 2*a_2   ->   {(("a_1", 2),): 1, (("a_2", 1),): 2}
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Union

from .errors import (
    HandleMismatch,
    NoFrobeniusLift,
    NotDivisible,
    NotTorsionFree,
    PolynomialParseError,
    UnboundVariable,
)

Monomial = tuple  # tuple[tuple[str, int], ...]


def nu_p(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def natural_key(name: str):
    return tuple(int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name))


@lru_cache(maxsize=1 << 17)
def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        v1, e1 = m1[i]
        v2, e2 = m2[j]
        if v1 == v2:
            out.append((v1, e1 + e2))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


class Poly:
    """Immutable sparse polynomial with integer coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None

    # construction --------------------------------------------------------
    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({(): c}) if c else cls()

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    # inspection ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_term(self) -> int:
        return self.terms.get((), 0)

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return Poly()
            return Poly._raw({m: c * other for m, c in self.terms.items()})
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Poly()
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = _mono_mul(ma, mb)
                out[m] = get(m, 0) + ca * cb
        return Poly._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        if n == 0:
            return Poly.const(1)
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            return Poly._raw({tuple((v, e * n) for v, e in m): c ** n})
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == ({(): other} if other else {})
        if isinstance(other, Poly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # ring-specific operations ---------------------------------------------
    def div_exact(self, n: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            q, r = divmod(c, n)
            if r:
                raise NotDivisible(f"coefficient {c} of {render_monomial(m) or '1'} not divisible by {n}",
                                   (render_monomial(m) or "1", c))
            out[m] = q
        return Poly._raw(out)

    def all_coefficients_divisible(self, q: int) -> bool:
        return all(c % q == 0 for c in self.terms.values())

    def frobenius(self, p: int) -> "Poly":
        return Poly._raw({tuple((v, e * p) for v, e in m): c for m, c in self.terms.items()})

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        out: dict = {}
        for m, c in self.terms.items():
            nm = tuple(sorted((mapping.get(v, v), e) for v, e in m))
            out[nm] = out.get(nm, 0) + c
        return Poly(out)

    def __str__(self):
        return render_poly(self)

    def __repr__(self):
        return f"Poly({render_poly(self)!r})"


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, int):
        return Poly.const(x)
    return NotImplemented


# --- rendering and parsing ----------------------------------------------------

def render_monomial(m: Monomial) -> str:
    parts = []
    for v, e in sorted(m, key=lambda ve: natural_key(ve[0])):
        parts.append(v if e == 1 else f"{v}^{e}")
    return "*".join(parts)


def _grlex_key(m: Monomial, order: list[str]):
    exps = dict(m)
    return (-sum(exps.values()), tuple(-exps.get(v, 0) for v in order))


def render_poly(p: Poly) -> str:
    """Render in graded-lex order (highest total degree first)."""
    if not p.terms:
        return "0"
    order = sorted(p.variables(), key=natural_key)
    pieces = []
    for m in sorted(p.terms, key=lambda m: _grlex_key(m, order)):
        c = p.terms[m]
        mono = render_monomial(m)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not pieces:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f" + {body}" if c > 0 else f" - {body}")
    return "".join(pieces)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*^()]))")


def parse_poly(text: str) -> Poly:
    """Parse ``+ - * ^ **`` and parentheses over integers and identifiers."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialParseError(f"unexpected character at offset {pos} in {text!r}", pos)
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif ident is not None:
            tokens.append(("var", ident))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise PolynomialParseError("empty expression")
    parser = _Parser(tokens, text)
    result = parser.expr()
    if parser.i != len(tokens):
        raise PolynomialParseError(f"trailing input in {text!r}", parser.i)
    return result


class _Parser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self) -> Poly:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = self.term() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Poly:
        acc = self.power()
        while self.peek() == ("op", "*"):
            self.take()
            acc = acc * self.power()
        return acc

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise PolynomialParseError(f"exponent must be a nonnegative integer in {self.text!r}")
            return base ** val
        return base

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            return Poly.const(val)
        if kind == "var":
            return Poly.var(val)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise PolynomialParseError(f"unbalanced parentheses in {self.text!r}")
            return inner
        if (kind, val) == ("op", "-"):
            return -self.atom()
        raise PolynomialParseError(f"unexpected token {val!r} in {self.text!r}")


# --- ring handles -------------------------------------------------------------

Raw = Union[int, Poly]


@dataclass(frozen=True)
class RingHandle:
    """Describes a coefficient ring.

    ``kind`` is one of ``"Z"``, ``"Zmod"``, ``"Poly"``.  The variable set of a
    polynomial ring is informational and does not take part in equality, so
    polynomials in different variables can be combined freely.
    """

    kind: str
    m: int | None = None
    variables: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in ("Z", "Zmod", "Poly"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Zmod" and (self.m is None or self.m < 1):
            raise ValueError("Zmod requires a modulus m >= 1")

    @property
    def torsion_free(self) -> bool:
        return self.kind in ("Z", "Poly")

    @property
    def has_frobenius_lifts(self) -> bool:
        return self.kind in ("Z", "Poly")

    def __str__(self):
        if self.kind == "Zmod":
            return f"Z/{self.m}"
        if self.kind == "Poly":
            return "Z[" + ",".join(self.variables) + "]" if self.variables else "Z[...]"
        return "Z"

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "Zmod":
            out["m"] = self.m
        if self.kind == "Poly" and self.variables:
            out["vars"] = list(self.variables)
        return out

    # raw arithmetic -------------------------------------------------------
    @property
    def zero(self) -> Raw:
        return Poly() if self.kind == "Poly" else 0

    @property
    def one(self) -> Raw:
        if self.kind == "Poly":
            return Poly.const(1)
        return 1 % self.m if self.kind == "Zmod" else 1

    def from_int(self, n: int) -> Raw:
        if self.kind == "Poly":
            return Poly.const(n)
        if self.kind == "Zmod":
            return n % self.m
        return n

    def coerce(self, x) -> Raw:
        """Bring an int, Poly or RingElement into this ring's raw form."""
        if isinstance(x, RingElement):
            if x.handle != self:
                raise HandleMismatch(f"element of {x.handle} used in {self}", (str(x.handle), str(self)))
            return x.value
        if isinstance(x, bool):
            raise TypeError("bool is not a ring element")
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Poly):
            if self.kind != "Poly":
                if x.is_constant():
                    return self.from_int(x.constant_term())
                raise HandleMismatch(f"polynomial {x} used in {self}")
            return x
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def add(self, x: Raw, y: Raw) -> Raw:
        r = x + y
        return r % self.m if self.kind == "Zmod" else r

    def sub(self, x: Raw, y: Raw) -> Raw:
        r = x - y
        return r % self.m if self.kind == "Zmod" else r

    def neg(self, x: Raw) -> Raw:
        return (-x) % self.m if self.kind == "Zmod" else -x

    def mul(self, x: Raw, y: Raw) -> Raw:
        r = x * y
        return r % self.m if self.kind == "Zmod" else r

    def scale(self, n: int, x: Raw) -> Raw:
        return self.mul(self.from_int(n), x) if self.kind != "Poly" else x * n

    def pow(self, x: Raw, n: int) -> Raw:
        if self.kind == "Zmod":
            return pow(x, n, self.m)
        return x ** n

    def eq(self, x: Raw, y: Raw) -> bool:
        return x == y

    def is_zero(self, x: Raw) -> bool:
        return x == 0 if self.kind != "Poly" else x.is_zero()

    def div_exact(self, x: Raw, n: int) -> Raw:
        if not self.torsion_free:
            raise NotTorsionFree(f"exact division by {n} is not defined in {self}")
        if n <= 0:
            raise ValueError("divisor must be positive")
        if self.kind == "Poly":
            return x.div_exact(n)
        q, r = divmod(x, n)
        if r:
            raise NotDivisible(f"{x} is not divisible by {n}", (x, n))
        return q

    def divisible_by(self, x: Raw, q: int) -> bool:
        """True iff x lies in the ideal generated by the integer q."""
        if self.kind == "Poly":
            return x.all_coefficients_divisible(q)
        if self.kind == "Zmod":
            raise NotTorsionFree(f"congruences mod {q} are not meaningful in {self}")
        return x % q == 0

    def frobenius(self, p: int, x: Raw) -> Raw:
        if self.kind == "Z":
            return x
        if self.kind == "Poly":
            return x.frobenius(p)
        raise NoFrobeniusLift(f"{self} has no chosen Frobenius lift")

    def render(self, x: Raw) -> str:
        return render_poly(x) if self.kind == "Poly" else str(x)

    def parse(self, text: str) -> Raw:
        p = parse_poly(str(text))
        if self.kind == "Poly":
            return p
        if not p.is_constant():
            raise PolynomialParseError(f"{text!r} is not a constant of {self}")
        return self.from_int(p.constant_term())

    def element(self, x) -> "RingElement":
        return RingElement(self, self.coerce(x))

    def var(self, name: str) -> "RingElement":
        if self.kind != "Poly":
            raise HandleMismatch(f"{self} has no variables")
        return RingElement(self, Poly.var(name))


def Integers() -> RingHandle:
    return RingHandle("Z")


def Modular(m: int) -> RingHandle:
    return RingHandle("Zmod", m)


def PolyRing(variables: Iterable[str] = ()) -> RingHandle:
    return RingHandle("Poly", None, tuple(variables))


ZZ = Integers()


class RingElement:
    """A value tagged with its ring; supports ``+ - * **`` and ``==``."""

    __slots__ = ("handle", "value")

    def __init__(self, handle: RingHandle, value: Raw):
        self.handle = handle
        self.value = value

    def _other(self, other) -> Raw:
        if isinstance(other, RingElement):
            if other.handle != self.handle:
                raise HandleMismatch(f"cannot combine elements of {self.handle} and {other.handle}",
                                     (str(self.handle), str(other.handle)))
            return other.value
        if isinstance(other, (int, Poly)) and not isinstance(other, bool):
            return self.handle.coerce(other)
        raise TypeError(f"unsupported operand {other!r}")

    def __add__(self, other):
        return RingElement(self.handle, self.handle.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElement(self.handle, self.handle.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return RingElement(self.handle, self.handle.sub(self._other(other), self.value))

    def __mul__(self, other):
        return RingElement(self.handle, self.handle.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.handle, self.handle.neg(self.value))

    def __pow__(self, n: int):
        return RingElement(self.handle, self.handle.pow(self.value, n))

    def __eq__(self, other):
        if isinstance(other, RingElement):
            if other.handle != self.handle:
                raise HandleMismatch(f"cannot compare elements of {self.handle} and {other.handle}",
                                     (str(self.handle), str(other.handle)))
            return self.value == other.value
        if isinstance(other, (int, Poly)) and not isinstance(other, bool):
            return self.value == self.handle.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.handle, self.value))

    def __str__(self):
        return self.handle.render(self.value)

    def __repr__(self):
        return f"RingElement({self.handle}, {self})"


# --- module-level operations ------------------------------------------------

def arith(op: str, *args: RingElement) -> RingElement | bool:
    """Dispatch ``add | mul | neg | pow | eq`` on ring elements."""
    if op == "add":
        x, y = args
        return x + y
    if op == "mul":
        x, y = args
        return x * y
    if op == "neg":
        (x,) = args
        return -x
    if op == "pow":
        x, n = args
        return x ** n
    if op == "eq":
        x, y = args
        return x == y
    raise ValueError(f"unknown operation {op!r}")


def div_exact(x: RingElement, n: int) -> RingElement:
    return RingElement(x.handle, x.handle.div_exact(x.value, n))


def frobenius_lift(p: int, x: RingElement) -> RingElement:
    return RingElement(x.handle, x.handle.frobenius(p, x.value))


def evaluate_raw(poly: Poly, bindings: Mapping[str, Raw], handle: RingHandle) -> Raw:
    """Evaluate ``poly`` with each variable replaced by a raw value of ``handle``."""
    powers: dict = {}
    total = handle.zero
    for mono, c in poly.terms.items():
        term = handle.from_int(c)
        for v, e in mono:
            key = (v, e)
            pw = powers.get(key)
            if pw is None:
                try:
                    base = bindings[v]
                except KeyError:
                    raise UnboundVariable(f"variable {v} is not bound", v) from None
                pw = handle.pow(base, e)
                powers[key] = pw
            term = handle.mul(term, pw)
        total = handle.add(total, term)
    return total


def evaluate(poly: RingElement | Poly, bindings: Mapping[str, RingElement]) -> RingElement:
    """Evaluate a polynomial at ring elements that all share one handle."""
    p = poly.value if isinstance(poly, RingElement) else poly
    handles = {b.handle for b in bindings.values()}
    if len(handles) > 1:
        raise HandleMismatch("bindings live in different rings", sorted(str(h) for h in handles))
    handle = handles.pop() if handles else ZZ
    return RingElement(handle, evaluate_raw(p, {k: b.value for k, b in bindings.items()}, handle))
