/**
 * Wire types of the session server, with runtime validation.
 *
 * The viewer never simulates anything client-side: what it renders is the
 * validated server snapshot, verbatim.
 */
import { z } from "zod";

export const CellSchema = z.tuple([z.number().int(), z.number().int(), z.number().int()]);

export const BranchSchema = z.object({
  re: z.number(),
  im: z.number(),
  cells: z.array(CellSchema),
});

export const SnapshotSchema = z.object({
  branches: z.array(BranchSchema),
});

export const FrameSchema = SnapshotSchema.extend({
  t: z.number().int(),
  parity: z.enum(["aligned", "shifted"]),
});

export const TrackSchema = z.object({
  anchor: CellSchema,
  direction: CellSchema,
  role: z.string(),
});

export const GadgetSchema = z.object({
  name: z.string(),
  cells: z.array(CellSchema),
  inputs: z.array(
    z.object({ qid: z.number(), track0: TrackSchema, track1: TrackSchema, time: z.number() })
  ),
  outputs: z.array(
    z.object({ qid: z.number(), track0: TrackSchema, track1: TrackSchema, time: z.number() })
  ),
  latency: z.number(),
  period: z.number(),
  constants: z.record(z.unknown()),
});

export const CatalogueSchema = z.object({
  track_separation: CellSchema,
  gadgets: z.array(GadgetSchema),
});

export type Cell = z.infer<typeof CellSchema>;
export type Branch = z.infer<typeof BranchSchema>;
export type Snapshot = z.infer<typeof SnapshotSchema>;
export type Frame = z.infer<typeof FrameSchema>;
export type GadgetInfo = z.infer<typeof GadgetSchema>;
export type Catalogue = z.infer<typeof CatalogueSchema>;

export function parseFrame(data: unknown): Frame {
  return FrameSchema.parse(data);
}

/** Canonical snapshot bytes, matching the engine's compact serialization. */
export function snapshotBytes(snapshot: Snapshot): string {
  const branches = snapshot.branches
    .map((b) => `{"re":${jsonNumber(b.re)},"im":${jsonNumber(b.im)},"cells":[${b.cells
      .map((c) => `[${c[0]},${c[1]},${c[2]}]`)
      .join(",")}]}`)
    .join(",");
  return `{"branches":[${branches}]}`;
}

function jsonNumber(x: number): string {
  // JSON.stringify emits the shortest round-trip form, like the engine's
  // float serialization, with two cosmetic differences: integral floats
  // lose the ".0", and exponents are unpadded ("1e-7" vs "1e-07").
  let s = JSON.stringify(x);
  const exp = s.match(/^(-?[\d.]+)e([+-]?)(\d+)$/);
  if (exp) {
    const sign = exp[2] || "+";
    const digits = exp[3].padStart(2, "0");
    s = `${exp[1]}e${sign}${digits}`;
  } else if (Number.isInteger(x) && !s.includes(".")) {
    s = `${s}.0`;
  }
  return s;
}
