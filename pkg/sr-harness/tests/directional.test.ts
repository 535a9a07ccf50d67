/**
 * Directional check at toy scale: a model trained on weighted-sum pairs
 * should transfer to the fine-grid-reference thick volumes at least as
 * well as one trained on simple-average pairs, by majority over 3 seeds.
 */

import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { compareRuns } from "../src/compare.js";
import { makeConfig } from "../src/manifest.js";
import { train } from "../src/train.js";

const ROOT = path.dirname(path.dirname(fileURLToPath(import.meta.url)));
const PAIRS = path.join(ROOT, "fixtures", "pairs", "manifest.json");
const HELDOUT = path.join(ROOT, "fixtures", "heldout", "manifest.json");

describe("directional comparison (acceptance)", () => {
  it(
    "proposed-trained model beats simple-trained on true thick volumes (majority of 3 seeds)",
    () => {
      const seeds = [0, 1, 2];
      let proposedWins = 0;
      for (const seed of seeds) {
        const base = {
          manifestPath: PAIRS,
          heldoutManifestPath: HELDOUT,
          patchSize: [4, 12, 12] as [number, number, number],
          batchSize: 2,
          iterations: 150,
          learningRate: 1e-3,
          augmentFlips: true,
          seed,
        };
        const proposed = train(makeConfig(base), "proposed");
        const simple = train(makeConfig(base), "simple");
        const report = compareRuns(simple, proposed);
        expect(report.ranking.length).toBe(2);
        expect(report.methods.proposed.per_volume.psnr_db.n).toBe(3);
        expect(report.methods.simple.per_volume.psnr_db.n).toBe(3);
        if (
          proposed.heldout.per_volume.psnr_db.mean >=
          simple.heldout.per_volume.psnr_db.mean
        ) {
          proposedWins += 1;
        }
      }
      expect(proposedWins).toBeGreaterThanOrEqual(2);
    },
    1_800_000,
  );
});
