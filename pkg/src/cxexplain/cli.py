"""Command-line driver.

Subcommands: check, explain, explain-formula, export, serve. Exit
codes: 0 loaded clean, 2 consistency mismatches under --strict,
3 parse/semantic error, 4 unknown gate/step. stdout carries data only;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from .errors import (CxError, ParseError, StepOutOfRangeError,
                     TargetOutsideTraceError, UnknownGateError)
from .explain import format_terminating
from .jsonutil import dumps
from .session import load_session

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_PARSE = 3
EXIT_TARGET = 4


def _add_io_flags(p, trace_required=True, ltl=True):
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--trace", required=trace_required, help="counterexample file")
    if ltl:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--ltl", help="LTL formula text")
        g.add_argument("--ltl-file", help="file holding the LTL formula")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_arg_parser():
    ap = argparse.ArgumentParser(
        prog="cx-explain",
        description="Explain model-checking counterexamples on the "
                    "function block diagram of the model")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="load model/trace/formula and report")
    _add_io_flags(p)
    p.add_argument("--strict", action="store_true",
                   help="treat consistency mismatches as errors (exit 2)")

    p = sub.add_parser("explain", help="explain one assignment")
    _add_io_flags(p, ltl=False)
    p.add_argument("--var", required=True,
                   help="variable name (dotted) or gate id")
    p.add_argument("--step", required=True, type=int, help="1-based step")
    p.add_argument("--block", help="complex block id bounding the scope")
    p.add_argument("--terminating-only", action="store_true",
                   help="print the terminating-assignment list only")

    p = sub.add_parser("explain-formula", help="explain the formula value")
    _add_io_flags(p)
    p.add_argument("--step", type=int, default=1,
                   help="1-based step (default: first)")

    p = sub.add_parser("export", help="print the diagram interchange document")
    _add_io_flags(p, trace_required=False, ltl=False)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_io_flags(p)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    return ap


def _load(args, need_ltl=False):
    ltl_text = getattr(args, "ltl", None)
    if getattr(args, "ltl_file", None):
        with open(args.ltl_file, encoding="utf-8") as fh:
            ltl_text = fh.read().strip()
    session = load_session(model_path=args.model,
                           trace_path=getattr(args, "trace", None),
                           ltl_text=ltl_text)
    if need_ltl and session.formula is None:
        raise ParseError("no formula: pass --ltl/--ltl-file or put an "
                         "LTLSPEC in the model")
    return session


def _emit(doc, fmt, text_renderer=None):
    if fmt == "text" and text_renderer is not None:
        print(text_renderer(doc))
    else:
        print(dumps(doc))


def _render_check(doc):
    lines = [f"variables: {len(doc['model']['variables'])} "
             f"(inputs: {', '.join(doc['model']['inputs'])})"]
    if doc["trace"]:
        loop = doc["trace"]["loopStart"]
        lines.append(f"trace: {doc['trace']['length']} steps, "
                     + (f"loop at {loop}" if loop else "no loop"))
    if doc["consistency"]:
        n = len(doc["consistency"]["mismatches"])
        lines.append("consistency: clean" if not n else
                     f"consistency: {n} mismatches")
        for m in doc["consistency"]["mismatches"][:20]:
            lines.append(f"  {m['variable']} at step {m['step']}: trace "
                         f"{m['traceValue']}, simulated {m['simulatedValue']}")
    if doc["formula"]:
        lines.append(f"formula {doc['formula']['text']}: "
                     f"{doc['formula']['value']} at step 1 (display 0)")
    return "\n".join(lines)


def run(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        if args.command == "check":
            session = _load(args)
            doc = session.check_doc(strict=args.strict)
            _emit(doc, args.format, _render_check)
            if args.strict and session.consistency:
                return EXIT_MISMATCH
            if session.consistency:
                print(f"warning: {len(session.consistency)} consistency "
                      "mismatches (use --strict to fail)", file=sys.stderr)
            return EXIT_OK

        if args.command == "explain":
            session = _load(args)
            try:
                doc = session.explain_doc(args.var, args.step, args.block)
            except (UnknownGateError, TargetOutsideTraceError) as e:
                print(f"error: {e}", file=sys.stderr)
                return EXIT_TARGET
            if args.terminating_only:
                print(format_terminating(doc))
            else:
                _emit(doc, args.format)
            return EXIT_OK

        if args.command == "explain-formula":
            session = _load(args, need_ltl=True)
            try:
                doc = session.explain_formula_doc(args.step)
            except StepOutOfRangeError as e:
                print(f"error: {e}", file=sys.stderr)
                return EXIT_TARGET
            _emit(doc, args.format)
            return EXIT_OK

        if args.command == "export":
            session = _load(args)
            _emit(session.diagram_doc(), "json")
            return EXIT_OK

        if args.command == "serve":
            from .service import serve
            session = _load(args)
            serve(session, host=args.host, port=args.port)
            return EXIT_OK
    except CxError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    raise AssertionError(f"unhandled command {args.command}")


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
