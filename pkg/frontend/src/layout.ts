// Deterministic layered layout of the diagram's root scope.
//
// The interchange document carries topology only; geometry is computed
// here, left-to-right by dependency depth, so the same document always
// renders the same picture (snapshot-stable).

import type { BlockDoc, ConnectionDoc, DiagramDoc, GateDoc } from "./types";

export interface PinGeom {
    gateId: string;
    name: string;
    x: number;
    y: number;
    inverted: boolean;   // the incoming connection inverts: drawn as a circle
}

export interface BlockGeom {
    id: string;
    title: string;
    typeName: string;
    x: number;
    y: number;
    width: number;
    height: number;
    inputs: PinGeom[];
    outputs: PinGeom[];
}

export interface StubGeom {
    gateId: string;
    name: string;
    x: number;
    y: number;
}

export interface EdgeGeom {
    id: string;
    from: string;
    to: string;
    inverted: boolean;
    points: [number, number][];
}

export interface Layout {
    width: number;
    height: number;
    blocks: BlockGeom[];
    inputs: StubGeom[];
    edges: EdgeGeom[];
    pinAt: Map<string, { x: number; y: number }>;
}

const BLOCK_W = 150;
const PIN_GAP = 26;
const HEADER_H = 30;
const LAYER_GAP = 230;
const ROW_GAP = 36;
const MARGIN = 40;

function rootScope(doc: DiagramDoc) {
    const blocks = doc.blocks
        .filter((b) => b.parent === doc.root)
        .sort((a, b) => a.id.localeCompare(b.id));
    const connections = doc.connections
        .filter((c) => c.owner === doc.root)
        .slice()
        .sort((a, b) => a.id.localeCompare(b.id));
    const root = doc.blocks.find(
        (b) => b.id === doc.root && b.kind === "complex");
    if (!root || root.kind !== "complex") {
        throw new Error("document has no root complex block");
    }
    return { blocks, connections, rootInputs: root.inputs };
}

function interfaceOf(b: BlockDoc): { inputs: string[]; outputs: string[] } {
    if (b.kind === "basic") return { inputs: b.inputs, outputs: [b.output] };
    return { inputs: b.inputs, outputs: b.outputs };
}

/** Longest-path layer per entity; cycles (delay feedback) contribute 0. */
function computeLayers(blocks: BlockDoc[], connections: ConnectionDoc[],
                       rootInputs: string[]): Map<string, number> {
    const ownerOfGate = new Map<string, string>();
    for (const b of blocks) {
        const iface = interfaceOf(b);
        for (const g of [...iface.inputs, ...iface.outputs]) {
            ownerOfGate.set(g, b.id);
        }
    }
    const producers = new Map<string, Set<string>>();
    for (const b of blocks) producers.set(b.id, new Set());
    for (const c of connections) {
        const consumer = ownerOfGate.get(c.to);
        const producer = ownerOfGate.get(c.from);
        if (consumer && producer && producer !== consumer) {
            producers.get(consumer)?.add(producer);
        }
    }
    const layer = new Map<string, number>();
    const visiting = new Set<string>();
    const depth = (id: string): number => {
        const known = layer.get(id);
        if (known !== undefined) return known;
        if (visiting.has(id)) return 0; // feedback loop: break here
        visiting.add(id);
        let d = 1;
        for (const p of [...(producers.get(id) ?? [])].sort()) {
            d = Math.max(d, depth(p) + 1);
        }
        visiting.delete(id);
        layer.set(id, d);
        return d;
    };
    for (const b of blocks) depth(b.id);
    void rootInputs;
    return layer;
}

export function layoutDiagram(doc: DiagramDoc): Layout {
    const { blocks, connections, rootInputs } = rootScope(doc);
    const gateById = new Map<string, GateDoc>(doc.gates.map((g) => [g.id, g]));
    const invertedInto = new Set(
        connections.filter((c) => c.inverted).map((c) => c.to));
    const layers = computeLayers(blocks, connections, rootInputs);

    const byLayer = new Map<number, BlockDoc[]>();
    for (const b of blocks) {
        const l = layers.get(b.id) ?? 1;
        if (!byLayer.has(l)) byLayer.set(l, []);
        byLayer.get(l)?.push(b);
    }

    const pinAt = new Map<string, { x: number; y: number }>();
    const inputStubs: StubGeom[] = rootInputs.map((gid, i) => {
        const g = gateById.get(gid);
        const stub = {
            gateId: gid,
            name: g ? g.name : gid,
            x: MARGIN,
            y: MARGIN + 20 + i * 50,
        };
        pinAt.set(gid, { x: stub.x + 60, y: stub.y });
        return stub;
    });

    const blockGeoms: BlockGeom[] = [];
    let maxX = MARGIN + 120;
    let maxY = inputStubs.length
        ? MARGIN + 20 + inputStubs.length * 50 : MARGIN;
    for (const l of [...byLayer.keys()].sort((a, b) => a - b)) {
        const column = byLayer.get(l) ?? [];
        let y = MARGIN;
        for (const b of column) {
            const iface = interfaceOf(b);
            const rows = Math.max(iface.inputs.length, iface.outputs.length, 1);
            const height = HEADER_H + rows * PIN_GAP;
            const x = MARGIN + 120 + l * LAYER_GAP;
            const title = b.kind === "complex" ? b.name : b.id.split("/").pop() ?? b.id;
            const typeName = b.kind === "complex" ? b.typeName : b.type;
            const mk = (gids: string[], side: "in" | "out"): PinGeom[] =>
                gids.map((gid, i) => {
                    const pin = {
                        gateId: gid,
                        name: gateById.get(gid)?.name ?? gid,
                        x: side === "in" ? x : x + BLOCK_W,
                        y: y + HEADER_H + (i + 0.5) * PIN_GAP,
                        inverted: invertedInto.has(gid),
                    };
                    pinAt.set(gid, { x: pin.x, y: pin.y });
                    return pin;
                });
            blockGeoms.push({
                id: b.id, title, typeName, x, y,
                width: BLOCK_W, height,
                inputs: mk(iface.inputs, "in"),
                outputs: mk(iface.outputs, "out"),
            });
            y += height + ROW_GAP;
            maxX = Math.max(maxX, x + BLOCK_W);
            maxY = Math.max(maxY, y);
        }
    }

    const edges: EdgeGeom[] = connections.flatMap((c) => {
        const a = pinAt.get(c.from);
        const b = pinAt.get(c.to);
        if (!a || !b) return [];
        const midX = (a.x + b.x) / 2;
        return [{
            id: c.id, from: c.from, to: c.to, inverted: c.inverted,
            points: [[a.x, a.y], [midX, a.y], [midX, b.y],
                     [b.x, b.y]] as [number, number][],
        }];
    });

    return {
        width: maxX + MARGIN,
        height: maxY + MARGIN,
        blocks: blockGeoms,
        inputs: inputStubs,
        edges,
        pinAt,
    };
}
