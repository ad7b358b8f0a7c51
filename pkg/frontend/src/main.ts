// Browser bootstrap: load the session, render the five panels, wire
// clicks. Pin clicks explain assignments; the button explains the
// formula at the current step.

import { ApiClient } from "./api";
import { renderDiagram } from "./diagram";
import {
    renderFormulaCauseList, renderFormulaTree, renderValueTable,
} from "./formula";
import { renderTerminatingPanel } from "./panels";
import {
    applyExplanation, applyFormulaCause, beginExplain, clearExplanation,
    initialState, selectStep, ViewState,
} from "./state";
import type {
    DiagramDoc, ExtendedTraceDoc, FormulaTreeDoc, TraceDoc,
} from "./types";

const api = new ApiClient(
    (window as unknown as { CX_BASE_URL?: string }).CX_BASE_URL ?? "");

let state: ViewState;
let diagram: DiagramDoc;
let trace: TraceDoc;
let extended: ExtendedTraceDoc;
let tree: FormulaTreeDoc | null = null;

function el(id: string): HTMLElement {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node;
}

function banner(message: string | null) {
    const b = el("banner");
    b.textContent = message ?? "";
    b.style.display = message ? "block" : "none";
}

async function refreshFormulaTree() {
    try {
        tree = await api.formulaTree(state.currentDisplayStep);
        el("formula-tree").innerHTML = renderFormulaTree(tree);
    } catch {
        tree = null;
        el("formula-tree").innerHTML =
            `<p class="empty">no formula loaded</p>`;
    }
}

function redraw() {
    el("diagram").innerHTML = renderDiagram(diagram, extended, {
        displayStep: state.currentDisplayStep,
        explanation: state.activeExplanation,
    });
    el("value-table").innerHTML = renderValueTable(
        trace, state.currentDisplayStep, state.activeFormulaCause);
    el("terminating").innerHTML =
        renderTerminatingPanel(state.activeExplanation);
    el("formula-causes").innerHTML = state.activeFormulaCause
        ? renderFormulaCauseList(state.activeFormulaCause) : "";
    renderStepBar();
    wireDiagramClicks();
    wireTableClicks();
}

function renderStepBar() {
    const bar = el("steps");
    const buttons: string[] = [];
    for (let j = 0; j < trace.length; j++) {
        const cls = j === state.currentDisplayStep ? "step current" : "step";
        const loop = trace.loopStart !== null && j === trace.loopStart - 1;
        buttons.push(`<button class="${cls}" data-step="${j}">` +
            `${j}${loop ? " ↻" : ""}</button>`);
    }
    bar.innerHTML = buttons.join("");
    bar.querySelectorAll("button").forEach((btn) => {
        btn.addEventListener("click", async () => {
            const j = Number(btn.dataset.step);
            const next = selectStep(state, j);
            if (next === state) return;   // idempotent re-selection
            state = next;
            await refreshFormulaTree();
            redraw();
        });
    });
}

function wireDiagramClicks() {
    el("diagram").querySelectorAll("[data-gate]").forEach((node) => {
        node.addEventListener("click", async () => {
            const gate = (node as HTMLElement).dataset.gate;
            if (!gate) return;
            const target = { gate, displayStep: state.currentDisplayStep };
            const begun = beginExplain(state, target);
            state = begun.state;
            try {
                const doc = await api.explain(gate, target.displayStep);
                state = applyExplanation(state, begun.token, doc);
                banner(null);
                redraw();
            } catch (err) {
                // keep the previous highlight; surface the failure
                banner(String(err));
            }
        });
    });
}

function wireTableClicks() {
    el("value-table").querySelectorAll("th[data-display-step]")
        .forEach((th) => {
            th.addEventListener("click", async () => {
                const j = Number((th as HTMLElement).dataset.displayStep);
                const next = selectStep(state, j);
                if (next === state) return;
                state = next;
                await refreshFormulaTree();
                redraw();
            });
        });
}

async function main() {
    try {
        [diagram, trace, extended] = await Promise.all(
            [api.diagram(), api.trace(), api.extendedTrace()]);
    } catch (err) {
        banner(`cannot reach the explanation service: ${err}`);
        return;
    }
    state = initialState(trace.length);
    await refreshFormulaTree();
    el("explain-formula").addEventListener("click", async () => {
        try {
            const cause = await api.explainFormula(state.currentDisplayStep);
            state = applyFormulaCause(state, cause);
            banner(null);
            redraw();
        } catch (err) {
            banner(String(err));
        }
    });
    el("clear").addEventListener("click", () => {
        state = clearExplanation(state);
        redraw();
    });
    redraw();
}

main();
