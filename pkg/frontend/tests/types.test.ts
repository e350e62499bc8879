import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { SnapshotSchema, parseFrame, snapshotBytes } from "../src/types.js";

const fixturePath = fileURLToPath(
  new URL("../fixtures/hadamard_demo_step3.snapshot.json", import.meta.url)
);

describe("wire validation", () => {
  it("accepts a well-formed frame", () => {
    const frame = parseFrame({
      t: 1,
      parity: "shifted",
      branches: [{ re: 1, im: 0, cells: [[1, 1, 1]] }],
    });
    expect(frame.branches[0].cells[0]).toEqual([1, 1, 1]);
  });

  it("rejects malformed frames", () => {
    expect(() => parseFrame({ t: 0, parity: "diagonal", branches: [] })).toThrow();
    expect(() =>
      parseFrame({ t: 0, parity: "aligned", branches: [{ re: 1, cells: [] }] })
    ).toThrow();
    expect(() =>
      parseFrame({ t: 0.5, parity: "aligned", branches: [] })
    ).toThrow();
  });
});

describe("canonical snapshot bytes", () => {
  it("re-serializes the engine fixture byte for byte", () => {
    const raw = readFileSync(fixturePath, "utf8");
    const snapshot = SnapshotSchema.parse(JSON.parse(raw));
    expect(snapshotBytes(snapshot)).toBe(raw);
  });

  it("restores the trailing .0 on integral amplitudes", () => {
    const s = { branches: [{ re: 1, im: 0, cells: [[0, 0, 0] as [number, number, number]] }] };
    expect(snapshotBytes(s)).toBe('{"branches":[{"re":1.0,"im":0.0,"cells":[[0,0,0]]}]}');
  });

  it("pads exponents like the engine does", () => {
    const s = { branches: [{ re: 1e-7, im: 0, cells: [] }] };
    expect(snapshotBytes(s)).toContain('"re":1e-07');
  });
});
