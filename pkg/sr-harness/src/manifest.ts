/**
 * Pair manifests bind each exported thin/thick volume pair with the
 * degradation method and normalization window that produced it. The
 * harness consumes them exactly as the exporter writes them (paths are
 * relative to the manifest file).
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { HuWindow } from "./volume.js";

export interface PairEntry {
  pair_id: string;
  thin_path: string;
  thick_path: string;
  method: string;
  method_params: Record<string, unknown>;
  thickness_mm: number;
  increment_mm: number;
  hu_window: HuWindow;
}

export interface PairManifest {
  format_version: number;
  entries: PairEntry[];
  /** directory the entry paths are relative to */
  baseDir: string;
}

export class EmptyManifestError extends Error {}

export function loadManifest(manifestPath: string, methodLabel?: string): PairManifest {
  const raw = JSON.parse(fs.readFileSync(manifestPath, "utf-8"));
  let entries: PairEntry[] = raw.entries ?? [];
  if (methodLabel !== undefined) {
    entries = entries.filter((e) => e.method === methodLabel);
  }
  if (entries.length === 0) {
    throw new EmptyManifestError(
      methodLabel
        ? `${manifestPath}: no entries with method "${methodLabel}"`
        : `${manifestPath}: no entries`,
    );
  }
  return {
    format_version: raw.format_version ?? 1,
    entries,
    baseDir: path.dirname(path.resolve(manifestPath)),
  };
}

export function resolveEntryPath(manifest: PairManifest, relative: string): string {
  return path.resolve(manifest.baseDir, relative);
}

export interface TrainConfig {
  manifestPath: string;
  /** held-out pairs for evaluation; defaults to the training manifest */
  heldoutManifestPath?: string;
  patchSize: [number, number, number]; // (d, h, w) on the HR grid
  batchSize: number;
  iterations: number;
  learningRate: number;
  seed: number;
  augmentFlips: boolean;
  /** network width/depth knobs (defaults: 8 conv layers, 32 channels) */
  channels?: number;
  layers?: number;
}

export const TRAIN_DEFAULTS = {
  batchSize: 2,
  iterations: 200,
  learningRate: 1e-4,
  seed: 0,
  augmentFlips: true,
  channels: 32,
  layers: 8,
};

export function makeConfig(
  partial: Partial<TrainConfig> & Pick<TrainConfig, "manifestPath" | "patchSize">,
): TrainConfig {
  const config = { ...TRAIN_DEFAULTS, ...partial } as TrainConfig;
  if (config.iterations < 1) throw new Error("iterations must be >= 1");
  if (config.batchSize < 1) throw new Error("batchSize must be >= 1");
  if (config.patchSize.some((v) => v < 1)) throw new Error("patch dims must be >= 1");
  return config;
}
