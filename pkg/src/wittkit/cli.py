"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 parse error, 3 internal
assertion (a broken invariant, always a bug).
"""

from __future__ import annotations

import argparse
import sys

from . import io
from .category import evaluate_morphism, verify_law
from .errors import DoesNotExist, LemmaViolation, ParseError, WittkitError
from .poset import components, has_joins
from .suites import SUITES, run_suite
from .witt import GhostVector, apply_ghost, ghost, universal

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_BUG = 0, 1, 2, 3


def _emit(args, payload, text: str | None = None) -> None:
    if args.text and text is not None:
        print(text)
    else:
        print(io.dumps(payload))


def _poset_report(P) -> dict:
    return {"kind": "poset", "valid": True, "elements": len(P), "components": len(P.roots),
            "ordinary": P.is_ordinary(), "has_joins": has_joins(P)}


def cmd_validate(args) -> int:
    data = io.load(args.path)
    kind = io.classify(data)
    try:
        if kind == "workspace":
            ws = io.read_workspace(data)
            report = {"kind": "workspace", "valid": True,
                      "posets": {k: _poset_report(v) for k, v in ws.posets.items()},
                      "maps": {k: v.flags for k, v in ws.maps.items()},
                      "vectors": sorted(ws.vectors), "bispans": sorted(ws.bispans)}
        elif kind == "map":
            f = io.Workspace().map(data)
            report = {"kind": "map", "valid": True, "flags": f.flags}
        elif kind == "word":
            word = io.Workspace().word(data)
            report = {"kind": "word", "valid": True, "legs": [[k, m.flags] for k, m in word]}
        elif kind == "vector":
            v = io.Workspace().vector(data)
            report = {"kind": "vector", "valid": True, "elements": len(v.poset), "ring": v.ring.to_json()}
        else:
            report = _poset_report(io.Workspace().poset(data))
    except ParseError:
        raise
    except WittkitError as exc:
        _emit(args, {"kind": kind, "valid": False, **exc.to_json()}, f"invalid {kind}: {exc}")
        return EXIT_INVALID
    _emit(args, report, f"valid {kind}")
    return EXIT_OK


def _load_word_and_vector(args):
    data = io.load(args.word)
    ws = io.read_workspace(data)
    word_data = ws.extra.get("word", data) if io.is_workspace(data) else data
    word = ws.word(word_data)
    if args.vector is not None:
        vec_data = io.load(args.vector)
        vws = io.read_workspace(vec_data)
        if io.is_workspace(vec_data):
            v = vws.vector(vws.extra.get("vector", next(iter(vws.vectors), None)))
        else:
            v = ws.vector(vec_data)
    else:
        if "vector" not in ws.extra:
            raise ParseError("no vector given: pass a vector file or bundle a 'vector' entry")
        v = ws.vector(ws.extra["vector"])
    return word, v


def cmd_eval(args) -> int:
    word, v = _load_word_and_vector(args)
    if isinstance(v, GhostVector):
        # ghost input: run the ghost-level formulas directly
        out = v
        for i, (kind, f) in enumerate(word):
            out = apply_ghost({"R": "pull", "T": "transfer", "N": "norm"}[kind], f, out)
        args.ghost = True
    else:
        out = evaluate_morphism(word, v)
        if args.ghost:
            out = ghost(out)
    text = ("<" if args.ghost else "(") + ", ".join(out.ring.render(x) for x in out.values()) + \
        (">" if args.ghost else ")")
    _emit(args, io.vector_to_json(out), text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.maps:
        return _verify_given(args)
    res = run_suite(args.suite, args.seed, args.size, args.count)
    text = f"{res.suite} seed={res.seed} size={res.size}: {res.passed} passed, {res.failed} failed" + \
        (f", {res.skipped} skipped" if res.skipped else "")
    _emit(args, res.to_json(), text)
    return EXIT_OK if res.ok else EXIT_INVALID


def _verify_given(args) -> int:
    if args.suite not in ("rt", "nr", "tn"):
        raise ParseError("--maps is only meaningful for the rt, nr and tn suites")
    ws = io.read_workspace(io.load(args.maps))
    f, g = ws.map("f"), ws.map("g")
    try:
        rep = verify_law(args.suite, f, g, seed=args.seed)
    except DoesNotExist as exc:
        expected = not has_joins(g.source)
        payload = {"suite": args.suite, "status": "does_not_exist", "expected": expected, **exc.to_json()}
        _emit(args, payload, f"{args.suite}: pullback does not exist" + (" (expected)" if expected else ""))
        if not expected:
            raise LemmaViolation(f"pullback missing although the source has joins: {exc}") from None
        return EXIT_OK
    _emit(args, {"suite": args.suite, "status": "ok" if rep.ok else "failed", **rep.to_json()},
          f"{args.suite}: {'law holds' if rep.ok else 'law FAILS'} ({rep.checks} checks)")
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_show(args) -> int:
    P = io.Workspace().poset(io.load(args.path))
    comps = components(P)
    payload = {"elements": [{"id": s, "label": P.label(s), "norm": P.norm[s]} for s in P.elements],
               "covers": [[P.label(a), P.label(b)] for a, b in P.covers()],
               "components": [[P.label(s) for s in sorted(c, key=P.elements.index)] for c in comps.components]}
    lines = []
    for root, comp in zip(comps.roots, comps.components):
        members = sorted(comp, key=P.elements.index)
        lines.append(f"component {P.label(root)}: " + ", ".join(f"{P.label(s)}[{P.norm[s]}]" for s in members))
        for a, b in P.covers():
            if a in comp:
                lines.append(f"  {P.label(a)} -> {P.label(b)}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_universal(args) -> int:
    data = io.load(args.map)
    if io.is_workspace(data):
        f = io.read_workspace(data).map(args.name)
    else:
        f = io.Workspace().map(data)
    formula = universal(f, args.kind)
    inp, out = formula.input_poset, formula.output_poset
    text = "\n".join(f"{out.label(e)}: {formula.polys[e]}" for e in out.elements)
    payload = formula.to_json()
    payload["labels"] = {str(s): inp.label(s) for s in inp.elements}
    _emit(args, payload, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wittkit", description="Witt vectors over truncation posets.")
    p.add_argument("--text", action="store_true", help="plain text instead of JSON")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--text", action="store_true", default=argparse.SUPPRESS,
                        help="plain text instead of JSON")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="validate a poset, map, word, vector or workspace file")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("eval", parents=[common], help="evaluate a word of R/T/N arrows on a Witt vector")
    e.add_argument("word", help="word file, or a bundle holding 'word' and 'vector'")
    e.add_argument("vector", nargs="?")
    e.add_argument("--ghost", action="store_true", help="print ghost coordinates")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("verify", parents=[common], help="run a seeded property suite")
    r.add_argument("suite", choices=SUITES)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--size", type=int, default=4, help="maximum poset size")
    r.add_argument("--count", type=int, default=None, help="number of random instances")
    r.add_argument("--maps", help="workspace with maps 'f' and 'g' to check instead of random ones")
    r.set_defaults(func=cmd_verify)

    s = sub.add_parser("show", parents=[common], help="print a poset's Hasse diagram")
    s.add_argument("path")
    s.set_defaults(func=cmd_show)

    u = sub.add_parser("universal", parents=[common], help="print universal polynomials for a map")
    u.add_argument("map")
    u.add_argument("--kind", choices=("pull", "transfer", "norm"), required=True)
    u.add_argument("--name", default="f", help="map to use when the file is a workspace")
    u.set_defaults(func=cmd_universal)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        _emit(args, exc.to_json(), f"parse error: {exc}")
        return EXIT_PARSE
    except LemmaViolation as exc:
        _emit(args, {"error": "LemmaViolation", "message": str(exc)}, f"internal error: {exc}")
        return EXIT_BUG
    except WittkitError as exc:
        _emit(args, exc.to_json(), f"error: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
