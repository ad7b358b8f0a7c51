// Schematic rendering. Pure functions from documents to SVG text, so
// everything the analyst sees is reproducible from recorded payloads.
//
// Highlighting performs no causal computation: the blue edge set is
// exactly the connection constraints named by the explanation response.

import { layoutDiagram } from "./layout";
import type {
    DiagramDoc, ExplanationDoc, ExtendedTraceDoc, Value,
} from "./types";

/** Connection ids to paint blue: the response edges that are connections. */
export function computeHighlight(explanation: ExplanationDoc,
                                 doc: DiagramDoc): Set<string> {
    const connectionIds = new Set(doc.connections.map((c) => c.id));
    const out = new Set<string>();
    for (const e of explanation.edges) {
        if (connectionIds.has(e.via)) out.add(e.via);
    }
    return out;
}

/**
 * Tooltip text per pin: every "displayStep:value" pair of the cause, in
 * step order. Pins that are causes at several steps show the history.
 */
export function pinTooltips(explanation: ExplanationDoc): Map<string, string> {
    const byGate = new Map<string, { displayStep: number; value: Value }[]>();
    for (const n of explanation.nodes) {
        if (!byGate.has(n.gate)) byGate.set(n.gate, []);
        byGate.get(n.gate)?.push({ displayStep: n.displayStep, value: n.value });
    }
    const out = new Map<string, string>();
    for (const [gate, entries] of byGate) {
        entries.sort((a, b) => a.displayStep - b.displayStep);
        out.set(gate, entries
            .map((e) => `${e.displayStep}:${formatValue(e.value)}`)
            .join(", "));
    }
    return out;
}

export function formatValue(v: Value): string {
    return typeof v === "boolean" ? String(v) : String(v);
}

function esc(s: string): string {
    return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

export interface RenderOptions {
    displayStep: number;
    explanation?: ExplanationDoc | null;
}

export function renderDiagram(doc: DiagramDoc, extended: ExtendedTraceDoc,
                              opts: RenderOptions): string {
    const layout = layoutDiagram(doc);
    const values = extended.steps[opts.displayStep] ?? {};
    const explanation = opts.explanation ?? null;
    const highlight = explanation
        ? computeHighlight(explanation, doc) : new Set<string>();
    const tooltips = explanation
        ? pinTooltips(explanation) : new Map<string, string>();
    const varOfGate = new Map(
        Object.entries(doc.variables).map(([v, g]) => [g, v]));

    const parts: string[] = [];
    parts.push(`<svg xmlns="http://www.w3.org/2000/svg" ` +
        `viewBox="0 0 ${layout.width} ${layout.height}" ` +
        `class="diagram" data-display-step="${opts.displayStep}">`);

    for (const e of layout.edges) {
        const pts = e.points.map(([x, y]) => `${x},${y}`).join(" ");
        const cls = highlight.has(e.id) ? "wire highlight" : "wire";
        parts.push(`<polyline class="${cls}" data-connection="${esc(e.id)}" ` +
            `points="${pts}" fill="none"/>`);
    }

    for (const stub of layout.inputs) {
        const v = values[stub.gateId];
        parts.push(`<g class="input-stub" data-gate="${esc(stub.gateId)}">` +
            `<rect x="${stub.x - 8}" y="${stub.y - 10}" width="68" height="20"/>` +
            `<text x="${stub.x}" y="${stub.y + 4}">${esc(stub.name)}</text>` +
            `<text class="value" x="${stub.x + 64}" y="${stub.y - 6}">` +
            `${v === undefined ? "" : formatValue(v)}</text>` +
            `<title>${esc(tooltipFor(stub.gateId))}</title></g>`);
    }

    for (const b of layout.blocks) {
        parts.push(`<g class="block" data-block="${esc(b.id)}">`);
        parts.push(`<rect x="${b.x}" y="${b.y}" width="${b.width}" ` +
            `height="${b.height}"/>`);
        parts.push(`<text class="name" x="${b.x + 6}" y="${b.y + 13}">` +
            `${esc(b.title)}</text>`);
        parts.push(`<text class="type" x="${b.x + 6}" y="${b.y + 26}">` +
            `${esc(b.typeName)}</text>`);
        for (const pin of b.inputs) {
            parts.push(pinMarkup(pin.gateId, pin.x, pin.y, pin.inverted,
                                 values[pin.gateId], "in"));
        }
        for (const pin of b.outputs) {
            parts.push(pinMarkup(pin.gateId, pin.x, pin.y, false,
                                 values[pin.gateId], "out"));
        }
        parts.push("</g>");
    }

    parts.push("</svg>");
    return parts.join("\n");

    function tooltipFor(gateId: string): string {
        const history = tooltips.get(gateId);
        if (explanation && history) return history;
        return varOfGate.get(gateId) ?? gateId;
    }

    // A circle marks an inverted input, a square a plain pin (the
    // inversion belongs to the consuming endpoint of the connection).
    function pinMarkup(gateId: string, x: number, y: number,
                       inverted: boolean, value: Value | undefined,
                       side: "in" | "out"): string {
        const shape = inverted
            ? `<circle class="pin inverted" cx="${x}" cy="${y}" r="5"/>`
            : `<rect class="pin" x="${x - 4}" y="${y - 4}" width="8" height="8"/>`;
        const tx = side === "in" ? x - 8 : x + 8;
        const anchor = side === "in" ? "end" : "start";
        const label = value === undefined ? "" : formatValue(value);
        return `<g class="pin-group" data-gate="${esc(gateId)}">` +
            `${shape}` +
            `<text class="value" text-anchor="${anchor}" x="${tx}" ` +
            `y="${y - 6}">${label}</text>` +
            `<title>${esc(tooltipFor(gateId))}</title></g>`;
    }
}
