// Payload shapes of the /api endpoints.

export type Value = boolean | number;

export interface ValueKind {
    kind: "boolean" | "integer";
    lo?: number;
    hi?: number;
}

export interface GateDoc {
    id: string;
    name: string;
    direction: "in" | "out";
    owner: string;
    valueKind: ValueKind;
}

export interface BasicBlockDoc {
    id: string;
    kind: "basic";
    type: string;
    parent: string | null;
    inputs: string[];
    output: string;
    constants: Record<string, Value>;
}

export interface ComplexBlockDoc {
    id: string;
    kind: "complex";
    name: string;
    typeName: string;
    parent: string | null;
    inputs: string[];
    outputs: string[];
}

export type BlockDoc = BasicBlockDoc | ComplexBlockDoc;

export interface ConnectionDoc {
    id: string;
    from: string;
    to: string;
    inverted: boolean;
    owner: string;
}

export interface DiagramDoc {
    root: string;
    blocks: BlockDoc[];
    gates: GateDoc[];
    connections: ConnectionDoc[];
    variables: Record<string, string>;
}

export interface TraceDoc {
    length: number;
    loopStart: number | null;
    states: Record<string, Value>[];
    variables: string[];
}

export interface ExtendedTraceDoc {
    upTo: number;
    steps: Record<string, Value>[];
    variables: Record<string, string>;
}

export interface AssignmentDoc {
    gate: string;
    variable: string | null;
    block: string;
    value: Value;
    step: number;
    displayStep: number;
}

export interface EdgeDoc {
    from: AssignmentDoc;
    to: AssignmentDoc;
    via: string;
}

export interface TerminatingRowDoc {
    step: number;
    displayStep: number;
    variable: string;
    block: string;
    value: Value;
}

export interface ExplanationDoc {
    target: AssignmentDoc;
    scope: { kind: "global" | "block"; block: string | null };
    nodes: AssignmentDoc[];
    edges: EdgeDoc[];
    terminating: TerminatingRowDoc[];
}

export interface TreeNodeDoc {
    id: number;
    op: string;
    text: string;
    value: Value;
    color: "red" | "green" | "grey";
    children: TreeNodeDoc[];
}

export interface FormulaTreeDoc {
    step: number;
    displayStep: number;
    root: TreeNodeDoc;
}

export interface CauseAssignmentDoc {
    variable: string;
    value: Value;
    step: number;
    displayStep: number;
}

export interface FormulaCauseDoc {
    step: number;
    displayStep: number;
    value: boolean;
    assignments: CauseAssignmentDoc[];
    tree?: FormulaTreeDoc;
}
