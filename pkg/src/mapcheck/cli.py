"""Command-line interface.

Exit codes: 0 expectations met / no bug, 1 bug found or expectation
mismatch, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import harness
from .c11 import compute_hb, compute_sw, forced_sc_edges
from .corpus import corpus_path
from .dot import emit_dot
from .hw import hw_relations
from .litmus import LitmusSyntaxError, load_litmus, parse_litmus, render_litmus
from .mapping import MappingError, compile_test, get_mapping, mapping_catalog

EXIT_OK, EXIT_BUG, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _load(path: str):
    """Read a litmus file; bare names fall back to the bundled corpus."""
    try:
        if not os.path.exists(path) and os.sep not in path:
            bundled = corpus_path(path)
            if bundled is not None:
                return parse_litmus(bundled.read_text("utf-8"))
        return load_litmus(path)
    except LitmusSyntaxError as exc:
        raise _UsageError(f"{path}:{exc}") from None
    except OSError as exc:
        raise _UsageError(f"{path}: {exc.strerror}") from None


def _c11_dot(report, path: str):
    ex = report.c11_execution
    if ex is None:
        return
    sw = compute_sw(ex)
    hb = compute_hb(ex, sw)
    rels = {"sb": _immediate(ex.sb), "rf": ex.rf, "sw": sw}
    rels.update(forced_sc_edges(ex, hb))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_dot(ex, rels))


def _immediate(rel):
    """Drop pairs implied by transitivity (for readable sb edges)."""
    return rel - rel.then(rel)


def cmd_check(args) -> int:
    test = _load(args.file)
    v = harness.check(test)
    met = test.expectation is None or v.text == test.expectation
    if args.dot and v.witness is not None:
        ex = v.witness
        rels = {"sb": _immediate(ex.sb), "rf": ex.rf, "mo": _immediate(ex.mo)}
        if test.level == "isa":
            r = hw_relations(ex)
            rels.update(ppo=r.ppo, lwfence=_immediate(r.lwfence), ffence=_immediate(r.ffence))
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(emit_dot(ex, rels))
    if args.json:
        out = {
            "schema": harness.SCHEMA,
            "command": "check",
            "test": test.name,
            "expected": test.expectation,
            "expectation_met": met,
            **v.to_json(),
        }
        print(_dump(out))
    else:
        print(f"{test.name}: {v.text} ({v.reason})")
        if not met:
            print(f"expected {test.expectation}", file=sys.stderr)
    return EXIT_OK if met else EXIT_BUG


def cmd_compile(args) -> int:
    test = _load(args.file)
    text = render_litmus(compile_test(test, get_mapping(args.mapping)))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_compare(args) -> int:
    test = _load(args.file)
    report = harness.compare(test, args.mapping)
    if args.dot and report.is_bug:
        _c11_dot(report, args.dot)
    if args.json:
        print(_dump({"schema": harness.SCHEMA, "command": "compare", **report.to_json()}))
    else:
        src, tgt = report.source_verdict, report.target_verdict
        status = "BUG" if report.is_bug else "ok"
        print(f"{status}: {test.name} under {report.mapping}: c11 {src.text}, hw {tgt.text}")
        if report.is_bug and report.forced_cycle:
            cyc = report.forced_cycle
            print("  forced sc cycle: " + " -> ".join(cyc + cyc[:1]))
            print(f"  loophole gap: {report.gap}")
    return EXIT_BUG if report.is_bug else EXIT_OK


def _position(text: str) -> tuple:
    tid, sep, idx = text.rpartition(":")
    if not sep or not idx.isdigit():
        raise _UsageError(f"bad position {text!r}; expected <thread>:<index>")
    return tid, int(idx)


def cmd_sweep(args) -> int:
    test = _load(args.file)
    positions = [_position(p) for p in args.vary.split(",") if p]
    orders = [o for o in args.orders.split(",") if o]
    try:
        rows = harness.sweep(test, positions, orders, args.mapping or None, args.jobs)
    except (harness.SweepError, ValueError) as exc:
        raise _UsageError(str(exc)) from None
    flagged = any(r.flagged for r in rows)
    if args.json:
        out = {
            "schema": harness.SCHEMA,
            "command": "sweep",
            "skeleton": test.name,
            "variants": [
                {
                    "name": r.variant.name,
                    "assignment": [[t, i, str(o)] for t, i, o in r.assignment],
                    "flagged": r.flagged,
                    "results": {
                        name: {
                            "status": "bug" if res.is_bug else "ok",
                            "c11": res.source_verdict.text,
                            "hw": res.target_verdict.text,
                        }
                        for name, res in r.results.items()
                    },
                }
                for r in rows
            ],
        }
        print(_dump(out))
    else:
        for r in rows:
            assign = ", ".join(f"{t}:{i}={o}" for t, i, o in r.assignment)
            print(f"{assign}: " + (", ".join(r.flagged) if r.flagged else "no bug"))
    return EXIT_BUG if flagged else EXIT_OK


def cmd_corpus(args) -> int:
    report = harness.run_corpus()
    if args.json:
        print(_dump(report))
    else:
        for e in report["entries"]:
            mark = "ok  " if e["ok"] and e.get("compiled_matches_source", True) else "FAIL"
            print(f"{mark} {e['path']}: {e['verdict']} (expected {e['expected']})")
        for b in report["bugs"]:
            print(f"bug  {b['source']} under {b['mapping']}")
    return EXIT_OK if report["ok"] else EXIT_BUG


def cmd_mappings(args) -> int:
    for table in mapping_catalog():
        sys.stdout.write(table.render())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mapcheck", description="Check C11-to-Power/ARMv7 compiler mappings on litmus tests.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", help="decide a c11 or isa test")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.add_argument("--dot", metavar="OUT")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("compile", help="compile a c11 test under a mapping")
    s.add_argument("file")
    s.add_argument("--mapping", required=True, help="built-in name or mapping file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("compare", help="look for a forbidden->allowed mapping bug")
    s.add_argument("file")
    s.add_argument("--mapping", required=True, help="built-in name or mapping file")
    s.add_argument("--dot", metavar="OUT")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="vary memory orders and compare under each mapping")
    s.add_argument("file")
    s.add_argument("--vary", required=True, help="comma-separated <thread>:<op index> list")
    s.add_argument("--orders", required=True, help="comma-separated memory orders")
    s.add_argument("--mapping", action="append", help="restrict to these mappings (repeatable)")
    s.add_argument("--jobs", type=int, help="worker processes (default: $MAPCHECK_JOBS or 1)")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("corpus", help="check every bundled expectation")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_corpus)

    s = sub.add_parser("mappings", help="print the built-in mapping tables")
    s.set_defaults(func=cmd_mappings)
    return p


def main(argv: Optional[list] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except MappingError as exc:
        print(f"mapcheck: {exc}", file=sys.stderr)
        return EXIT_USAGE


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
