// View state and its transitions. At most one explanation request is
// in flight; responses carry the token they were issued with and stale
// ones are dropped.

import type { ExplanationDoc, FormulaCauseDoc } from "./types";

export interface Target {
    gate: string;
    displayStep: number;
}

export interface ViewState {
    currentDisplayStep: number;
    traceLength: number;
    selectedTarget: Target | null;
    activeExplanation: ExplanationDoc | null;
    activeFormulaCause: FormulaCauseDoc | null;
    requestToken: number;
}

export function initialState(traceLength: number): ViewState {
    return {
        currentDisplayStep: 0,
        traceLength,
        selectedTarget: null,
        activeExplanation: null,
        activeFormulaCause: null,
        requestToken: 0,
    };
}

/** Clamp into [0, length-1]; re-selecting the current step is a no-op. */
export function selectStep(state: ViewState, displayStep: number): ViewState {
    const bounded = Math.max(0, Math.min(state.traceLength - 1, displayStep));
    if (bounded === state.currentDisplayStep) return state;
    return { ...state, currentDisplayStep: bounded };
}

/** Start an explanation request; the returned token tags its response. */
export function beginExplain(state: ViewState, target: Target):
        { state: ViewState; token: number } {
    const token = state.requestToken + 1;
    return {
        state: { ...state, selectedTarget: target, requestToken: token },
        token,
    };
}

/** Apply a response unless a newer request superseded it. */
export function applyExplanation(state: ViewState, token: number,
                                 doc: ExplanationDoc): ViewState {
    if (token !== state.requestToken) return state;
    return { ...state, activeExplanation: doc };
}

export function applyFormulaCause(state: ViewState,
                                  doc: FormulaCauseDoc): ViewState {
    return { ...state, activeFormulaCause: doc };
}

export function clearExplanation(state: ViewState): ViewState {
    return {
        ...state,
        selectedTarget: null,
        activeExplanation: null,
    };
}

/** Highlights are shown exactly when an explanation is active. */
export function highlightsVisible(state: ViewState): boolean {
    return state.activeExplanation !== null;
}
