"""JSON formats for posets, maps, vectors, words and bispans.

A file holds one object, or a workspace bundle::

    {"posets": {name: poset}, "maps": {name: map}, "vectors": {name: vector},
     "bispans": {name: bispan}, "word": word, "vector": vector}

Inside a bundle any poset or map may be given by name.  Maps are written as
``{"source", "target", "assign": [[s, t], ...]}`` or with the shorthands
``{"fold": P}``, ``{"identity": P}``, ``{"inclusion": [sub, sup]}`` and
``{"mult": {"poset": P, "n": n, "variant": "into" | "from_quotient"}}``.
Vectors are ``{"poset", "ring": {"kind": "Z" | "Zmod" | "Poly", "m"?, "vars"?},
"coords": {"<id or label>": "<element>"}}``; coords may also be a list in
poset order.  Words and bispans are ``{"legs": [{"kind": "R"|"N"|"T", "map"}]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import ParseError, PolynomialParseError
from .maps import PosetMap, fold, identity, inclusion, mult, mult_map
from .poset import TruncationPoset, validate
from .rings import Integers, Modular, PolyRing, RingHandle
from .witt import GhostVector, WittVector

MAP_SHORTHANDS = ("fold", "identity", "inclusion", "mult")


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None


def load(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _need(data, key, what):
    if not isinstance(data, Mapping) or key not in data:
        raise ParseError(f"{what} needs a {key!r} field")
    return data[key]


@dataclass
class Workspace:
    """Named posets, maps, vectors and bispans; names are unique across kinds."""

    posets: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    vectors: dict = field(default_factory=dict)
    bispans: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def _add(self, table: dict, name: str, value):
        if name in self.posets or name in self.maps or name in self.vectors or name in self.bispans:
            raise ParseError(f"duplicate name {name!r} in workspace")
        table[name] = value

    # readers ------------------------------------------------------------
    def poset(self, data) -> TruncationPoset:
        if isinstance(data, str):
            if data not in self.posets:
                raise ParseError(f"unknown poset {data!r}")
            return self.posets[data]
        try:
            if isinstance(data, Mapping) and "coproduct" in data:
                return validate({"coproduct": [self.poset(p) for p in data["coproduct"]]})
            return validate(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed poset: {exc}") from None

    def map(self, data) -> PosetMap:
        if isinstance(data, str):
            if data not in self.maps:
                raise ParseError(f"unknown map {data!r}")
            return self.maps[data]
        if not isinstance(data, Mapping):
            raise ParseError("a map must be an object or a name")
        try:
            if "fold" in data:
                return fold(self.poset(data["fold"]))
            if "identity" in data:
                return identity(self.poset(data["identity"]))
            if "inclusion" in data:
                sub, sup = data["inclusion"]
                return inclusion(self.poset(sub), self.poset(sup))
            if "mult" in data:
                params = data["mult"]
                n = int(_need(params, "n", "mult"))
                if "target" in params:
                    return mult_map(self.poset(params["poset"]), self.poset(params["target"]), n)
                return mult(self.poset(_need(params, "poset", "mult")), n, params.get("variant", "into"))
            S = self.poset(_need(data, "source", "map"))
            T = self.poset(_need(data, "target", "map"))
            assign = _need(data, "assign", "map")
            if isinstance(assign, Mapping):
                pairs = {int(k): int(v) for k, v in assign.items()}
            else:
                pairs = {int(s): int(t) for s, t in assign}
            return PosetMap(S, T, pairs)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed map: {exc}") from None

    def vector(self, data, *, ghost: bool = False):
        if isinstance(data, str):
            if data not in self.vectors:
                raise ParseError(f"unknown vector {data!r}")
            return self.vectors[data]
        P = self.poset(_need(data, "poset", "vector"))
        ring = read_ring(data.get("ring", {"kind": "Z"}))
        coords = _need(data, "coords", "vector")
        by_label = {P.label(s): s for s in P}
        values = {}
        try:
            if isinstance(coords, Mapping):
                for k, v in coords.items():
                    s = _element_key(k, P, by_label)
                    values[s] = ring.coerce(str(v))
            else:
                if len(coords) != len(P):
                    raise ParseError(f"vector has {len(coords)} coordinates, poset has {len(P)} elements")
                values = {s: ring.coerce(str(v)) for s, v in zip(P.elements, coords)}
        except PolynomialParseError as exc:
            raise ParseError(f"bad coordinate: {exc}") from None
        cls = GhostVector if ghost or data.get("ghost") else WittVector
        return cls(P, ring, values)

    def word(self, data) -> list[tuple[str, PosetMap]]:
        legs = data.get("legs") if isinstance(data, Mapping) else data
        if not isinstance(legs, list):
            raise ParseError("a word needs a list of legs")
        out = []
        for i, leg in enumerate(legs):
            kind = str(_need(leg, "kind", f"leg {i}")).upper()
            if kind not in ("R", "T", "N"):
                raise ParseError(f"leg {i}: kind must be R, T or N, not {kind!r}")
            out.append((kind, self.map(_need(leg, "map", f"leg {i}"))))
        return out

    def bispan(self, data):
        from .category.bispan import Bispan
        if isinstance(data, str):
            if data not in self.bispans:
                raise ParseError(f"unknown bispan {data!r}")
            return self.bispans[data]
        word = self.word(data)
        if [k for k, _ in word] != ["R", "N", "T"]:
            raise ParseError("a bispan has exactly three legs: R, N, T")
        return Bispan(word[0][1], word[1][1], word[2][1])


def _element_key(k, P: TruncationPoset, by_label: dict) -> int:
    try:
        s = int(k)
        if s in P:
            return s
    except ValueError:
        pass
    if k in by_label:
        return by_label[k]
    raise ParseError(f"{k!r} is not an element of the vector's poset")


def read_ring(data) -> RingHandle:
    if isinstance(data, str):
        data = {"kind": data}
    kind = _need(data, "kind", "ring")
    if kind == "Z":
        return Integers()
    if kind == "Zmod":
        return Modular(int(_need(data, "m", "ring")))
    if kind == "Poly":
        return PolyRing(data.get("vars", ()))
    raise ParseError(f"unknown ring kind {kind!r}")


def is_workspace(data) -> bool:
    return isinstance(data, Mapping) and any(k in data for k in ("posets", "maps", "vectors", "bispans"))


def read_workspace(data) -> Workspace:
    ws = Workspace()
    if not is_workspace(data):
        return ws
    for name, p in data.get("posets", {}).items():
        ws._add(ws.posets, name, ws.poset(p))
    for name, m in data.get("maps", {}).items():
        ws._add(ws.maps, name, ws.map(m))
    for name, v in data.get("vectors", {}).items():
        ws._add(ws.vectors, name, ws.vector(v))
    for name, b in data.get("bispans", {}).items():
        ws._add(ws.bispans, name, ws.bispan(b))
    ws.extra = {k: v for k, v in data.items() if k not in ("posets", "maps", "vectors", "bispans")}
    return ws


def classify(data) -> str:
    """Guess what a JSON document describes."""
    if is_workspace(data):
        return "workspace"
    if isinstance(data, list) or (isinstance(data, Mapping) and "legs" in data):
        return "word"
    if isinstance(data, Mapping) and ("coords" in data):
        return "vector"
    if isinstance(data, Mapping) and ("assign" in data or any(k in data for k in MAP_SHORTHANDS)):
        return "map"
    return "poset"


def vector_to_json(v) -> dict:
    out = {"poset": v.poset.to_json(), **v.to_json()}
    if isinstance(v, GhostVector):
        out["ghost"] = True
    return out
