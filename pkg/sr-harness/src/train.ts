/**
 * Training loop: MSE on sampled patch pairs with Adam, then held-out
 * whole-volume evaluation. Given the same config and seed, two runs
 * produce identical loss curves and metrics.
 */

import { loadManifest, TrainConfig, TRAIN_DEFAULTS } from "./manifest.js";
import { resolveEntryPath } from "./manifest.js";
import { ADAM_DEFAULTS, ResidualNet, Tensor3, tensor3 } from "./nn.js";
import { PatchSampler } from "./patches.js";
import { MetricSummary, psnrFromRmse, rmse, summarize } from "./metrics.js";
import { normalizeHu, readVolume, replicateToGrid } from "./volume.js";

export const MAX_I = 1.0; // metrics are computed on the normalized [0, 1] scale

export interface HeldoutVolumeScore {
  pair_id: string;
  psnr_db: number;
  rmse: number;
}

export interface RunResult {
  format_version: number;
  run_id: string;
  method_label: string;
  config: {
    patch_size: [number, number, number];
    batch_size: number;
    iterations: number;
    learning_rate: number;
    seed: number;
    augment_flips: boolean;
    channels: number;
    layers: number;
  };
  loss_curve: number[];
  heldout: {
    volumes: HeldoutVolumeScore[];
    per_volume: { psnr_db: MetricSummary; rmse: MetricSummary };
    per_slice: { psnr_db: MetricSummary; rmse: MetricSummary };
  };
}

function volumeToTensor(data: Float64Array, nz: number, ny: number, nx: number): Tensor3 {
  const t = tensor3(nz, ny, nx, 1);
  t.data.set(data);
  return t;
}

export function train(config: TrainConfig, methodLabel: string): RunResult {
  const channels = config.channels ?? TRAIN_DEFAULTS.channels;
  const layers = config.layers ?? TRAIN_DEFAULTS.layers;
  const manifest = loadManifest(config.manifestPath, methodLabel);
  const sampler = new PatchSampler(manifest, config);
  const net = new ResidualNet(channels, layers, config.seed);
  const adam = { learningRate: config.learningRate, ...ADAM_DEFAULTS };

  const lossCurve: number[] = [];
  for (let iter = 0; iter < config.iterations; iter++) {
    const batch = sampler.nextBatch(config.batchSize);
    lossCurve.push(net.trainStep(batch, adam));
  }

  const heldoutManifest = loadManifest(
    config.heldoutManifestPath ?? config.manifestPath,
    config.heldoutManifestPath ? undefined : methodLabel,
  );
  const volumes: HeldoutVolumeScore[] = [];
  const slicePsnr: number[] = [];
  const sliceRmse: number[] = [];
  for (const entry of heldoutManifest.entries) {
    const hr = normalizeHu(
      readVolume(resolveEntryPath(heldoutManifest, entry.thin_path)),
      entry.hu_window,
    );
    const lr = normalizeHu(
      readVolume(resolveEntryPath(heldoutManifest, entry.thick_path)),
      entry.hu_window,
    );
    const replicated = replicateToGrid(lr, hr.sliceLocations);
    const input = volumeToTensor(replicated.data, hr.nz, hr.ny, hr.nx);
    const prediction = net.infer(input);
    const r = rmse(prediction.data, hr.data);
    volumes.push({
      pair_id: entry.pair_id,
      psnr_db: psnrFromRmse(r, MAX_I),
      rmse: r,
    });
    const sliceSize = hr.ny * hr.nx;
    for (let z = 0; z < hr.nz; z++) {
      const sr = rmse(
        prediction.data.subarray(z * sliceSize, (z + 1) * sliceSize),
        hr.data.subarray(z * sliceSize, (z + 1) * sliceSize),
      );
      sliceRmse.push(sr);
      slicePsnr.push(psnrFromRmse(sr, MAX_I));
    }
  }

  return {
    format_version: 1,
    run_id: `${methodLabel}-seed${config.seed}`,
    method_label: methodLabel,
    config: {
      patch_size: config.patchSize,
      batch_size: config.batchSize,
      iterations: config.iterations,
      learning_rate: config.learningRate,
      seed: config.seed,
      augment_flips: config.augmentFlips,
      channels,
      layers,
    },
    loss_curve: lossCurve,
    heldout: {
      volumes,
      per_volume: {
        psnr_db: summarize(volumes.map((v) => v.psnr_db)),
        rmse: summarize(volumes.map((v) => v.rmse)),
      },
      per_slice: {
        psnr_db: summarize(slicePsnr),
        rmse: summarize(sliceRmse),
      },
    },
  };
}

/** Mean of the first/last `window` entries; the learning-sanity signal. */
export function smoothedLoss(curve: number[], window = 20): { initial: number; final: number } {
  const k = Math.min(window, curve.length);
  const initial = curve.slice(0, k).reduce((s, v) => s + v, 0) / k;
  const final = curve.slice(-k).reduce((s, v) => s + v, 0) / k;
  return { initial, final };
}
