/**
 * View state: which branch is shown, playback, edit tool, and the derived
 * probability sidebar.  Pure data and pure functions; the DOM layer and the
 * renderer subscribe to this.
 */
import { Frame } from "./types.js";

export type EditTool =
  | { kind: "toggle-cell" }
  | { kind: "stamp-gadget"; name: string; orientation: number };

export interface SidebarEntry {
  index: number;
  probability: number;
  label: string; // probability formatted to three decimals, e.g. "0.500"
  cellCount: number;
}

export interface ViewState {
  sessionId: string;
  frame: Frame | null;
  selectedBranch: number;
  playing: boolean;
  stepsPerSecond: number;
  tool: EditTool;
  showParityGrid: boolean;
}

export function initialViewState(sessionId: string): ViewState {
  return {
    sessionId,
    frame: null,
    selectedBranch: 0,
    playing: false,
    stepsPerSecond: 2,
    tool: { kind: "toggle-cell" },
    showParityGrid: true,
  };
}

export function branchProbability(re: number, im: number): number {
  return re * re + im * im;
}

export function formatProbability(p: number): string {
  return p.toFixed(3);
}

/** Sidebar model: one entry per branch, probabilities from |amplitude|^2. */
export function sidebarEntries(frame: Frame): SidebarEntry[] {
  return frame.branches.map((b, index) => {
    const p = branchProbability(b.re, b.im);
    return {
      index,
      probability: p,
      label: formatProbability(p),
      cellCount: b.cells.length,
    };
  });
}

/** Displayed probabilities must sum to 1 within the displayed precision. */
export function probabilitiesLookNormalized(frame: Frame, decimals = 3): boolean {
  const total = frame.branches.reduce(
    (acc, b) => acc + branchProbability(b.re, b.im),
    0
  );
  return Math.abs(total - 1) < Math.pow(10, -decimals) / 2;
}

/** Clamp the selection so it always points at an existing branch. */
export function clampSelection(state: ViewState): ViewState {
  const count = state.frame?.branches.length ?? 0;
  if (count === 0) return { ...state, selectedBranch: 0 };
  if (state.selectedBranch >= count) {
    return { ...state, selectedBranch: count - 1 };
  }
  if (state.selectedBranch < 0) return { ...state, selectedBranch: 0 };
  return state;
}

export function withFrame(state: ViewState, frame: Frame): ViewState {
  return clampSelection({ ...state, frame });
}

export function selectBranch(state: ViewState, index: number): ViewState {
  return clampSelection({ ...state, selectedBranch: index });
}

export function intervalMs(state: ViewState): number {
  return 1000 / Math.max(0.1, state.stepsPerSecond);
}
