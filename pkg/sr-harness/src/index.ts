export {
  AllZeroDifferencesError,
  erfc,
  mse,
  psnr,
  psnrFromRmse,
  rmse,
  summarize,
  wilcoxonSignedRank,
} from "./metrics.js";
export type { MetricSummary, WilcoxonResult } from "./metrics.js";
export {
  EmptyManifestError,
  loadManifest,
  makeConfig,
  resolveEntryPath,
  TRAIN_DEFAULTS,
} from "./manifest.js";
export type { PairEntry, PairManifest, TrainConfig } from "./manifest.js";
export { PatchSampler, PatchTooLargeError } from "./patches.js";
export type { PatchPair } from "./patches.js";
export { ADAM_DEFAULTS, ResidualNet, tensor3 } from "./nn.js";
export type { Tensor3 } from "./nn.js";
export { MAX_I, smoothedLoss, train } from "./train.js";
export type { RunResult } from "./train.js";
export { compareRuns, SIGNIFICANCE_LEVEL } from "./compare.js";
export type { ComparisonReport } from "./compare.js";
export { Rng } from "./rng.js";
export {
  nearestSliceIndices,
  normalizeHu,
  readVolume,
  replicateToGrid,
} from "./volume.js";
export type { HuWindow, Volume } from "./volume.js";
