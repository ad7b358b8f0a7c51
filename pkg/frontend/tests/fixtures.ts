import { readFileSync } from "node:fs";

import type {
    DiagramDoc, ExplanationDoc, ExtendedTraceDoc, FormulaCauseDoc,
    FormulaTreeDoc, TraceDoc,
} from "../src/types";

function load<T>(name: string): T {
    const url = new URL(`../fixtures/${name}`, import.meta.url);
    return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export const diagram = load<DiagramDoc>("diagram.json");
export const trace = load<TraceDoc>("trace.json");
export const extended = load<ExtendedTraceDoc>("extended.json");
export const formulaTreeStep0 = load<FormulaTreeDoc>("formula_tree_step0.json");
export const formulaTreeStep2 = load<FormulaTreeDoc>("formula_tree_step2.json");
export const formulaCause = load<FormulaCauseDoc>("formula_cause.json");
export const explainModeB4 = load<ExplanationDoc>("explain_mode_b_step4.json");
export const explainReset3 = load<ExplanationDoc>("explain_reset_step3.json");

export function fixtureText(name: string): string {
    const url = new URL(`../fixtures/${name}`, import.meta.url);
    return readFileSync(url, "utf-8");
}
