/**
 * Aligned LR/HR patch sampling from a pair manifest.
 *
 * HR patches are cut from the thin volume on its own grid; the matching LR
 * patch comes from the thick volume z-upsampled to the HR patch depth by
 * nearest-location slice replication, so network input and target always
 * share a shape. Sampling is fully seeded.
 */

import { PairManifest, TrainConfig, resolveEntryPath } from "./manifest.js";
import { Tensor3, tensor3 } from "./nn.js";
import { Rng } from "./rng.js";
import { Volume, nearestSliceIndices, normalizeHu, readVolume } from "./volume.js";

export class PatchTooLargeError extends Error {}

export interface PatchPair {
  lr: Tensor3;
  hr: Tensor3;
}

interface LoadedPair {
  pairId: string;
  hr: Volume;
  lr: Volume;
  /** nearest LR slice index for every HR slice */
  lrIndexForHrSlice: number[];
}

export class PatchSampler {
  readonly pairs: LoadedPair[];
  private readonly d: number;
  private readonly h: number;
  private readonly w: number;
  private readonly flips: boolean;
  private readonly rng: Rng;

  constructor(manifest: PairManifest, config: TrainConfig) {
    const [d, h, w] = config.patchSize;
    this.d = d;
    this.h = h;
    this.w = w;
    this.flips = config.augmentFlips;
    this.rng = new Rng(config.seed ^ 0xa11ce);
    this.pairs = manifest.entries.map((entry) => {
      const hr = normalizeHu(
        readVolume(resolveEntryPath(manifest, entry.thin_path)),
        entry.hu_window,
      );
      const lr = normalizeHu(
        readVolume(resolveEntryPath(manifest, entry.thick_path)),
        entry.hu_window,
      );
      return {
        pairId: entry.pair_id,
        hr,
        lr,
        lrIndexForHrSlice: nearestSliceIndices(hr.sliceLocations, lr.sliceLocations),
      };
    });
    for (const pair of this.pairs) {
      if (d > pair.hr.nz || h > pair.hr.ny || w > pair.hr.nx) {
        throw new PatchTooLargeError(
          `patch (${d},${h},${w}) does not fit volume ${pair.pairId} ` +
            `(${pair.hr.nz},${pair.hr.ny},${pair.hr.nx})`,
        );
      }
    }
  }

  samplePatch(): PatchPair {
    const pair = this.pairs[this.rng.int(this.pairs.length)];
    const { hr, lr, lrIndexForHrSlice } = pair;
    const z0 = this.rng.int(hr.nz - this.d + 1);
    const y0 = this.rng.int(hr.ny - this.h + 1);
    const x0 = this.rng.int(hr.nx - this.w + 1);
    const flip = this.flips && this.rng.next() < 0.5;
    const hrPatch = tensor3(this.d, this.h, this.w, 1);
    const lrPatch = tensor3(this.d, this.h, this.w, 1);
    for (let k = 0; k < this.d; k++) {
      this.copySlice(hr, z0 + k, y0, x0, flip, hrPatch, k);
      this.copySlice(lr, lrIndexForHrSlice[z0 + k], y0, x0, flip, lrPatch, k);
    }
    return { lr: lrPatch, hr: hrPatch };
  }

  nextBatch(batchSize: number): PatchPair[] {
    const batch: PatchPair[] = [];
    for (let i = 0; i < batchSize; i++) batch.push(this.samplePatch());
    return batch;
  }

  private copySlice(
    volume: Volume,
    z: number,
    y0: number,
    x0: number,
    flip: boolean,
    out: Tensor3,
    k: number,
  ): void {
    const { nx, ny, data } = volume;
    for (let y = 0; y < this.h; y++) {
      const rowBase = (z * ny + y0 + y) * nx + x0;
      const outBase = (k * this.h + y) * this.w;
      if (flip) {
        for (let x = 0; x < this.w; x++) {
          out.data[outBase + x] = data[rowBase + (this.w - 1 - x)];
        }
      } else {
        for (let x = 0; x < this.w; x++) {
          out.data[outBase + x] = data[rowBase + x];
        }
      }
    }
  }
}
