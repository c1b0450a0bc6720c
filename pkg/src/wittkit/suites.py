"""Seeded property suites shared by the CLI and the test-suite."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .category import compose_bispans, verify_law
from .errors import DiagramTooLarge, DoesNotExist, NotInImage, SizeCapExceeded
from .generators import nr_pair, random_bispan, random_poset, random_vector, rt_pair, tn_pair
from .rings import ZZ
from .witt import GhostVector, dwork_check, ghost, unghost, universal_vector

SUITES = ("rt", "nr", "tn", "bispan", "dwork", "roundtrip")


@dataclass
class SuiteResult:
    suite: str
    seed: int
    size: int
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    first_counterexample: dict | None = None
    notes: list = field(default_factory=list)

    def fail(self, detail: dict) -> None:
        self.failed += 1
        if self.first_counterexample is None:
            self.first_counterexample = detail

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        out = {"suite": self.suite, "seed": self.seed, "size": self.size,
               "passed": self.passed, "failed": self.failed, "skipped": self.skipped,
               "first_counterexample": self.first_counterexample}
        if self.notes:
            out["notes"] = self.notes
        return out


def dwork_agreement(g: GhostVector) -> tuple[bool, bool]:
    """``(dwork_check(g), unghost(g) succeeds)``."""
    try:
        unghost(g)
        image = True
    except NotInImage:
        image = False
    return bool(dwork_check(g)), image


def run_dwork(seed: int, size: int, count: int = 100, vectors: int = 20, bound: int = 20) -> SuiteResult:
    res = SuiteResult("dwork", seed, size)
    rng = random.Random(seed)
    for i in range(count):
        P = random_poset(rng, size)
        for _ in range(vectors):
            if rng.random() < 0.3:
                g = ghost(random_vector(rng, P, ZZ, bound))
            else:
                g = GhostVector(P, ZZ, {s: rng.randint(-bound, bound) for s in P})
            d, u = dwork_agreement(g)
            if d == u:
                res.passed += 1
            else:
                res.fail({"trial": i, "poset": P.to_json(), "ghost": g.to_json(), "dwork": d, "unghost": u})
    return res


def run_roundtrip(seed: int, size: int, count: int = 100) -> SuiteResult:
    res = SuiteResult("roundtrip", seed, size)
    rng = random.Random(seed)
    for i in range(count):
        P = random_poset(rng, size)
        for v in (random_vector(rng, P, ZZ, 50), universal_vector(P)):
            if unghost(ghost(v)) == v:
                res.passed += 1
            else:
                res.fail({"trial": i, "poset": P.to_json(), "vector": v.to_json()})
    return res


def run_law(law: str, seed: int, size: int, count: int = 50, trials: int = 2) -> SuiteResult:
    res = SuiteResult(law, seed, size)
    rng = random.Random(seed)
    gen = {"rt": lambda: rt_pair(rng, size), "nr": lambda: nr_pair(rng, size),
           "tn": lambda: tn_pair(rng, size)}[law]
    for i in range(count):
        f, g = gen()
        try:
            rep = verify_law(law, f, g, trials=trials, seed=seed + i)
        except DoesNotExist as exc:
            res.fail({"trial": i, "error": exc.to_json()})
            continue
        if rep.ok:
            res.passed += 1
        else:
            res.fail({"trial": i, "f": f.to_json(), "g": g.to_json(), "report": rep.to_json()})
    return res


def random_bispan_chain(rng: random.Random, length: int, size: int = 4, max_norm: int = 8):
    """``length`` composable random bispans, every poset with joins."""
    while True:
        objs = [random_poset(rng, size, max_norm, joins=True) for _ in range(length + 1)]
        chain = [random_bispan(rng, objs[i], objs[i + 1], max_elems=size) for i in range(length)]
        if all(b is not None and len(b.g.source) for b in chain):
            return chain


def run_bispan(seed: int, size: int, count: int = 20, vectors: int = 5) -> SuiteResult:
    res = SuiteResult("bispan", seed, size)
    rng = random.Random(seed)
    for i in range(count):
        b1, b2 = random_bispan_chain(rng, 2, size)
        try:
            c = compose_bispans(b1, b2)
        except (DiagramTooLarge, SizeCapExceeded):
            res.skipped += 1
            continue
        for _ in range(vectors):
            v = random_vector(rng, b1.source, ZZ, 5)
            lhs, rhs = c.evaluate(v), b2.evaluate(b1.evaluate(v))
            if lhs == rhs:
                res.passed += 1
            else:
                res.fail({"trial": i, "vector": v.to_json(), "composite": lhs.to_json(),
                          "legwise": rhs.to_json()})
    return res


def run_suite(name: str, seed: int = 0, size: int = 4, count: int | None = None) -> SuiteResult:
    if name == "dwork":
        return run_dwork(seed, size, count or 100)
    if name == "roundtrip":
        return run_roundtrip(seed, size, count or 100)
    if name in ("rt", "nr", "tn"):
        return run_law(name, seed, size, count or 50)
    if name == "bispan":
        return run_bispan(seed, size, count or 20)
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")


__all__ = ["SUITES", "SuiteResult", "run_suite", "dwork_agreement", "random_bispan_chain"]
