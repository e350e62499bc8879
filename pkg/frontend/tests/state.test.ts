import { describe, expect, it } from "vitest";
import {
  branchProbability,
  clampSelection,
  formatProbability,
  initialViewState,
  intervalMs,
  probabilitiesLookNormalized,
  selectBranch,
  sidebarEntries,
  withFrame,
} from "../src/state.js";
import { Frame } from "../src/types.js";

const SQ = Math.SQRT1_2;

const hadamardFrame: Frame = {
  t: 3,
  parity: "shifted",
  branches: [
    { re: SQ, im: 0, cells: [[1, 0, 1]] },
    { re: SQ, im: 0, cells: [[1, 1, 1]] },
  ],
};

describe("probability sidebar", () => {
  it("computes |amplitude|^2 per branch", () => {
    expect(branchProbability(SQ, 0)).toBeCloseTo(0.5, 12);
    expect(branchProbability(0.6, 0.8)).toBeCloseTo(1.0, 12);
  });

  it("formats to three decimals", () => {
    expect(formatProbability(0.5)).toBe("0.500");
    expect(formatProbability(1)).toBe("1.000");
  });

  it("shows two 0.500 branches for the scattered Hadamard demo", () => {
    const entries = sidebarEntries(hadamardFrame);
    expect(entries.map((e) => e.label)).toEqual(["0.500", "0.500"]);
    expect(entries.map((e) => e.index)).toEqual([0, 1]);
  });

  it("checks displayed probabilities sum to one", () => {
    expect(probabilitiesLookNormalized(hadamardFrame)).toBe(true);
    const broken: Frame = {
      t: 0,
      parity: "aligned",
      branches: [{ re: 0.5, im: 0, cells: [] }],
    };
    expect(probabilitiesLookNormalized(broken)).toBe(false);
  });
});

describe("branch selection invariant", () => {
  it("keeps the selected index below the branch count", () => {
    let state = withFrame(initialViewState("s"), hadamardFrame);
    state = selectBranch(state, 1);
    expect(state.selectedBranch).toBe(1);
    state = selectBranch(state, 7);
    expect(state.selectedBranch).toBe(1);
    state = selectBranch(state, -2);
    expect(state.selectedBranch).toBe(0);
  });

  it("re-clamps when a new frame has fewer branches", () => {
    let state = withFrame(initialViewState("s"), hadamardFrame);
    state = selectBranch(state, 1);
    const collapsed: Frame = {
      t: 4,
      parity: "aligned",
      branches: [{ re: 1, im: 0, cells: [[0, 0, 0]] }],
    };
    state = withFrame(state, collapsed);
    expect(state.selectedBranch).toBe(0);
  });

  it("clamp is a no-op on an empty frame", () => {
    const state = clampSelection(initialViewState("s"));
    expect(state.selectedBranch).toBe(0);
  });
});

describe("playback", () => {
  it("derives the step interval from the rate", () => {
    const state = { ...initialViewState("s"), stepsPerSecond: 4 };
    expect(intervalMs(state)).toBe(250);
  });
});
