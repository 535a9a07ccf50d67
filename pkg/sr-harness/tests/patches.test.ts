import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { EmptyManifestError, loadManifest, makeConfig } from "../src/manifest.js";
import { PatchSampler, PatchTooLargeError } from "../src/patches.js";

const ROOT = path.dirname(path.dirname(fileURLToPath(import.meta.url)));
const PAIRS = path.join(ROOT, "fixtures", "pairs", "manifest.json");

function config(overrides: Record<string, unknown> = {}) {
  return makeConfig({
    manifestPath: PAIRS,
    patchSize: [4, 16, 16],
    batchSize: 2,
    iterations: 1,
    seed: 42,
    ...overrides,
  } as never);
}

describe("manifest loading", () => {
  it("filters entries by method label", () => {
    const proposed = loadManifest(PAIRS, "proposed");
    const simple = loadManifest(PAIRS, "simple");
    expect(proposed.entries.length).toBe(4);
    expect(simple.entries.length).toBe(4);
    expect(new Set(proposed.entries.map((e) => e.method))).toEqual(
      new Set(["proposed"]),
    );
  });

  it("throws EmptyManifestError for an unknown method", () => {
    expect(() => loadManifest(PAIRS, "sinogram")).toThrow(EmptyManifestError);
  });
});

describe("patch sampling", () => {
  it("honors the shape contract: batch of aligned (d,h,w) single-channel pairs", () => {
    const sampler = new PatchSampler(loadManifest(PAIRS, "proposed"), config());
    const batch = sampler.nextBatch(2);
    expect(batch.length).toBe(2);
    for (const { lr, hr } of batch) {
      expect([lr.d, lr.h, lr.w, lr.c]).toEqual([4, 16, 16, 1]);
      expect([hr.d, hr.h, hr.w, hr.c]).toEqual([4, 16, 16, 1]);
      expect(lr.data.length).toBe(4 * 16 * 16);
    }
  });

  it("is deterministic per seed", () => {
    const a = new PatchSampler(loadManifest(PAIRS, "proposed"), config());
    const b = new PatchSampler(loadManifest(PAIRS, "proposed"), config());
    const c = new PatchSampler(loadManifest(PAIRS, "proposed"), config({ seed: 43 }));
    const batchA = a.nextBatch(2);
    const batchB = b.nextBatch(2);
    const batchC = c.nextBatch(2);
    expect(Array.from(batchA[0].hr.data)).toEqual(Array.from(batchB[0].hr.data));
    expect(Array.from(batchA[0].lr.data)).toEqual(Array.from(batchB[0].lr.data));
    expect(Array.from(batchA[0].hr.data)).not.toEqual(Array.from(batchC[0].hr.data));
  });

  it("rejects patches larger than the smallest volume", () => {
    expect(
      () =>
        new PatchSampler(
          loadManifest(PAIRS, "proposed"),
          config({ patchSize: [4, 64, 64] }),
        ),
    ).toThrow(PatchTooLargeError);
  });

  it("normalizes values into [0, 1]", () => {
    const sampler = new PatchSampler(loadManifest(PAIRS, "proposed"), config());
    const { lr, hr } = sampler.samplePatch();
    for (const t of [lr, hr]) {
      for (let i = 0; i < t.data.length; i++) {
        expect(t.data[i]).toBeGreaterThanOrEqual(0);
        expect(t.data[i]).toBeLessThanOrEqual(1);
      }
    }
  });
});
