"""Regenerate frontend/fixtures from the case-study session.

The UI tests run against recorded payloads of the HTTP API plus the
CLI's terminating listing; rerun this script whenever serialization
changes:

    python3 scripts/gen_frontend_fixtures.py
"""

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from conftest import (CASE_STUDY_LTL, CASE_STUDY_MODEL,  # noqa: E402
                      CASE_STUDY_NUSMV_TRACE)

from cxexplain.explain import format_terminating          # noqa: E402
from cxexplain.jsonutil import dumps                      # noqa: E402
from cxexplain.session import load_session                # noqa: E402


def main():
    out = ROOT / "frontend" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    session = load_session(model_text=CASE_STUDY_MODEL,
                           trace_text=CASE_STUDY_NUSMV_TRACE,
                           ltl_text=CASE_STUDY_LTL)

    def write(name, doc):
        (out / name).write_text(dumps(doc) + "\n")
        print("wrote", name)

    write("diagram.json", session.diagram_doc())
    write("trace.json", session.trace_doc())
    write("extended.json", session.extended_doc())
    write("formula_tree_step0.json", session.formula_tree_doc(1))
    write("formula_tree_step2.json", session.formula_tree_doc(3))
    write("formula_cause.json", session.explain_formula_doc(1))
    explanation = session.explain_doc("mode_b.out", 4)
    write("explain_mode_b_step4.json", explanation)
    write("explain_reset_step3.json", session.explain_doc("mode_b/in/r", 3))
    (out / "terminating_mode_b_step4.txt").write_text(
        format_terminating(explanation) + "\n")
    print("wrote terminating_mode_b_step4.txt")


if __name__ == "__main__":
    main()
