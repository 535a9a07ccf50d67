/**
 * Minimal process entry:
 *   node dist/run.js train <config.json>
 *   node dist/run.js compare <runA.json> <runB.json> [--out report.json]
 *
 * Train config (snake_case JSON):
 *   { "manifest_path": "...", "heldout_manifest_path": "...",
 *     "method_label": "proposed", "patch_size": [4, 16, 16],
 *     "batch_size": 2, "iterations": 200, "learning_rate": 1e-4,
 *     "seed": 0, "augment_flips": true, "out": "result.json" }
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { makeConfig } from "./manifest.js";
import { compareRuns } from "./compare.js";
import { RunResult, train } from "./train.js";

function jsonable(value: unknown): unknown {
  if (typeof value === "number") {
    if (value === Infinity) return "inf";
    if (value === -Infinity) return "-inf";
    if (Number.isNaN(value)) return "nan";
    return value;
  }
  if (Array.isArray(value)) return value.map(jsonable);
  if (value && typeof value === "object") {
    return Object.fromEntries(
      Object.entries(value as Record<string, unknown>).map(([k, v]) => [k, jsonable(v)]),
    );
  }
  return value;
}

function writeReport(payload: unknown, out: string | undefined): void {
  const text = JSON.stringify(jsonable(payload), null, 2) + "\n";
  if (out) {
    fs.writeFileSync(out, text);
    console.log(`wrote ${out}`);
  } else {
    process.stdout.write(text);
  }
}

function runTrain(configPath: string): void {
  const raw = JSON.parse(fs.readFileSync(configPath, "utf-8"));
  const base = path.dirname(path.resolve(configPath));
  const resolve = (p: string | undefined) =>
    p === undefined ? undefined : path.resolve(base, p);
  const config = makeConfig({
    manifestPath: resolve(raw.manifest_path)!,
    heldoutManifestPath: resolve(raw.heldout_manifest_path),
    patchSize: raw.patch_size,
    batchSize: raw.batch_size,
    iterations: raw.iterations,
    learningRate: raw.learning_rate,
    seed: raw.seed,
    augmentFlips: raw.augment_flips,
    channels: raw.channels,
    layers: raw.layers,
  });
  const result = train(config, raw.method_label);
  writeReport(result, resolve(raw.out));
}

function runCompare(argv: string[]): void {
  const outIdx = argv.indexOf("--out");
  const out = outIdx !== -1 ? argv[outIdx + 1] : undefined;
  const files = argv.filter((a, i) => a !== "--out" && i !== outIdx + 1);
  if (files.length !== 2) {
    throw new Error("compare needs exactly two run-result JSON files");
  }
  const a = JSON.parse(fs.readFileSync(files[0], "utf-8")) as RunResult;
  const b = JSON.parse(fs.readFileSync(files[1], "utf-8")) as RunResult;
  writeReport(compareRuns(a, b), out);
}

const [, , command, ...rest] = process.argv;
try {
  if (command === "train" && rest.length === 1) {
    runTrain(rest[0]);
  } else if (command === "compare") {
    runCompare(rest);
  } else {
    console.error("usage: run.js train <config.json> | compare <a.json> <b.json> [--out F]");
    process.exit(2);
  }
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
