// Thin typed client for the explanation service. The UI computes no
// causal information itself; everything it highlights comes from here.

import type {
    DiagramDoc, ExplanationDoc, ExtendedTraceDoc, FormulaCauseDoc,
    FormulaTreeDoc, TraceDoc,
} from "./types";

export class ApiClient {
    constructor(private baseUrl: string = "") {}

    private async get<T>(path: string): Promise<T> {
        const res = await fetch(this.baseUrl + path);
        if (!res.ok) throw new Error(`${path}: HTTP ${res.status}`);
        return res.json() as Promise<T>;
    }

    private async post<T>(path: string, body: unknown): Promise<T> {
        const res = await fetch(this.baseUrl + path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        if (!res.ok) {
            const detail = await res.text().catch(() => "");
            throw new Error(`${path}: HTTP ${res.status} ${detail}`);
        }
        return res.json() as Promise<T>;
    }

    diagram(): Promise<DiagramDoc> {
        return this.get("/api/diagram");
    }

    trace(): Promise<TraceDoc> {
        return this.get("/api/trace");
    }

    extendedTrace(): Promise<ExtendedTraceDoc> {
        return this.get("/api/trace/extended");
    }

    formulaTree(displayStep: number): Promise<FormulaTreeDoc> {
        return this.get(`/api/formula/tree?step=${displayStep}`);
    }

    explain(gateOrVar: string, displayStep: number,
            block?: string): Promise<ExplanationDoc> {
        const body: Record<string, unknown> = { var: gateOrVar, displayStep };
        if (block) body.block = block;
        return this.post("/api/explain", body);
    }

    explainFormula(displayStep: number): Promise<FormulaCauseDoc> {
        return this.post("/api/explain-formula", { displayStep });
    }
}
