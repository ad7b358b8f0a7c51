// Terminating-assignment panel. The text must match the CLI's
// --terminating-only output byte for byte, so both surfaces format the
// same response the same way: "displayStep varName blockName value".

import type { ExplanationDoc, TerminatingRowDoc, Value } from "./types";

function formatValue(v: Value): string {
    return String(v);
}

export function terminatingLines(doc: ExplanationDoc): string[] {
    return doc.terminating.map(
        (row: TerminatingRowDoc) =>
            `${row.displayStep} ${row.variable} ${row.block} ` +
            `${formatValue(row.value)}`);
}

export function formatTerminating(doc: ExplanationDoc): string {
    return terminatingLines(doc).join("\n");
}

export function renderTerminatingPanel(doc: ExplanationDoc | null): string {
    if (!doc) return `<pre class="terminating empty"></pre>`;
    const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;");
    return `<pre class="terminating">${esc(formatTerminating(doc))}</pre>`;
}
