// Formula tree and counterexample table views. Node colors come from
// the service verbatim (red FALSE, green TRUE, grey arithmetic).

import type {
    FormulaCauseDoc, FormulaTreeDoc, TraceDoc, TreeNodeDoc, Value,
} from "./types";
import { formatValue } from "./diagram";

function esc(s: string): string {
    return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

/** node id -> color, as delivered by the service. */
export function collectColors(tree: FormulaTreeDoc): Map<number, string> {
    const out = new Map<number, string>();
    const walk = (n: TreeNodeDoc) => {
        out.set(n.id, n.color);
        n.children.forEach(walk);
    };
    walk(tree.root);
    return out;
}

export function renderFormulaTree(tree: FormulaTreeDoc): string {
    const render = (n: TreeNodeDoc): string => {
        const kids = n.children.length
            ? `<ul>${n.children.map(render).join("")}</ul>` : "";
        return `<li><span class="node ${n.color}" data-node="${n.id}" ` +
            `title="${esc(n.text)} = ${formatValue(n.value)}">` +
            `${esc(n.op)}</span>${kids}</li>`;
    };
    return `<ul class="formula-tree" data-display-step="${tree.displayStep}">` +
        render(tree.root) + "</ul>";
}

/** (variable, displayStep) cells the formula cause pins down. */
export function causeCells(cause: FormulaCauseDoc): Set<string> {
    return new Set(cause.assignments.map(
        (a) => `${a.variable}@${a.displayStep}`));
}

export function renderValueTable(trace: TraceDoc, currentDisplayStep: number,
                                 cause: FormulaCauseDoc | null): string {
    const cells = cause ? causeCells(cause) : new Set<string>();
    const head = ["<tr><th>variable</th>"];
    for (let j = 0; j < trace.length; j++) {
        const loop = trace.loopStart !== null && j === trace.loopStart - 1;
        const cls = [
            j === currentDisplayStep ? "current" : "",
            loop ? "loop-start" : "",
        ].filter(Boolean).join(" ");
        head.push(`<th class="${cls}" data-display-step="${j}">` +
            `${j}${loop ? " ↻" : ""}</th>`);
    }
    head.push("</tr>");
    const rows = trace.variables.map((v) => {
        const tds = [`<td class="var">${esc(v)}</td>`];
        for (let j = 0; j < trace.length; j++) {
            const value = trace.states[j]?.[v];
            const marked = cells.has(`${v}@${j}`);
            tds.push(`<td class="${marked ? "cause" : ""}" ` +
                `data-cell="${esc(v)}@${j}">` +
                `${value === undefined ? "" : formatValue(value as Value)}</td>`);
        }
        return `<tr>${tds.join("")}</tr>`;
    });
    return `<table class="value-table">${head.join("")}${rows.join("")}</table>`;
}

export function renderFormulaCauseList(cause: FormulaCauseDoc): string {
    const items = cause.assignments.map(
        (a) => `<li>${a.displayStep} ${esc(a.variable)} ` +
            `${formatValue(a.value)}</li>`);
    return `<ol class="formula-causes">${items.join("")}</ol>`;
}
