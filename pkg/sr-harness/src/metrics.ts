/**
 * PSNR/RMSE and the paired Wilcoxon signed-rank test.
 *
 * Definitions match the evaluation pipeline that produced the training
 * pairs: MSE over all elements, RMSE its square root,
 * PSNR = 20*log10(maxI/RMSE) with +Infinity for identical inputs, summaries
 * as mean +- population standard deviation, and a two-sided signed-rank
 * test that enumerates the exact null for up to 25 nonzero differences.
 */

export const EXACT_LIMIT = 25;

export interface MetricSummary {
  mean: number;
  std: number;
  n: number;
  n_excluded: number;
}

export type WilcoxonMode = "exact" | "normal_approx";

export interface WilcoxonResult {
  wStatistic: number;
  pValue: number;
  nEffective: number;
  mode: WilcoxonMode;
}

export class AllZeroDifferencesError extends Error {}

export function mse(a: ArrayLike<number>, b: ArrayLike<number>): number {
  if (a.length !== b.length) {
    throw new Error(`shape mismatch: ${a.length} vs ${b.length} elements`);
  }
  if (a.length === 0) throw new Error("empty inputs");
  let acc = 0;
  for (let i = 0; i < a.length; i++) {
    const d = a[i] - b[i];
    acc += d * d;
  }
  return acc / a.length;
}

export function rmse(a: ArrayLike<number>, b: ArrayLike<number>): number {
  return Math.sqrt(mse(a, b));
}

export function psnrFromRmse(r: number, maxI: number): number {
  if (maxI <= 0) throw new Error(`maxI must be > 0, got ${maxI}`);
  if (r === 0) return Infinity;
  return 20 * Math.log10(maxI / r);
}

export function psnr(a: ArrayLike<number>, b: ArrayLike<number>, maxI: number): number {
  return psnrFromRmse(rmse(a, b), maxI);
}

export function summarize(samples: number[]): MetricSummary {
  const finite = samples.filter((v) => Number.isFinite(v));
  if (finite.length === 0) {
    return { mean: Infinity, std: 0, n: 0, n_excluded: samples.length };
  }
  const mean = finite.reduce((s, v) => s + v, 0) / finite.length;
  const variance =
    finite.reduce((s, v) => s + (v - mean) * (v - mean), 0) / finite.length;
  return {
    mean,
    std: Math.sqrt(variance),
    n: finite.length,
    n_excluded: samples.length - finite.length,
  };
}

function midranks(values: number[]): number[] {
  const order = values
    .map((v, i) => [v, i] as [number, number])
    .sort((a, b) => a[0] - b[0]);
  const ranks = new Array<number>(values.length);
  let i = 0;
  while (i < order.length) {
    let j = i;
    while (j + 1 < order.length && order[j + 1][0] === order[i][0]) j++;
    const rank = 0.5 * (i + j) + 1;
    for (let k = i; k <= j; k++) ranks[order[k][1]] = rank;
    i = j + 1;
  }
  return ranks;
}

function exactTwoSidedP(ranks: number[], w: number): number {
  // double the (possibly half-integer) mid-ranks and count sign assignments
  const doubled = ranks.map((r) => Math.round(2 * r));
  const total = doubled.reduce((s, v) => s + v, 0);
  let counts = new Float64Array(total + 1);
  counts[0] = 1;
  for (const r of doubled) {
    const next = Float64Array.from(counts);
    for (let s = r; s <= total; s++) next[s] += counts[s - r];
    counts = next;
  }
  const w2 = Math.floor(2 * w + 1e-9);
  let cdf = 0;
  for (let s = 0; s <= Math.min(w2, total); s++) cdf += counts[s];
  const p = (2 * cdf) / Math.pow(2, ranks.length);
  return Math.min(1, p);
}

/** Complementary error function (Abramowitz & Stegun 7.1.26 via Horner). */
export function erfc(x: number): number {
  const z = Math.abs(x);
  const t = 1 / (1 + 0.5 * z);
  const ans =
    t *
    Math.exp(
      -z * z -
        1.26551223 +
        t *
          (1.00002368 +
            t *
              (0.37409196 +
                t *
                  (0.09678418 +
                    t *
                      (-0.18628806 +
                        t *
                          (0.27886807 +
                            t *
                              (-1.13520398 +
                                t *
                                  (1.48851587 +
                                    t * (-0.82215223 + t * 0.17087277)))))))),
    );
  return x >= 0 ? ans : 2 - ans;
}

function normalTwoSidedP(ranks: number[], w: number, n: number): number {
  const meanW = (n * (n + 1)) / 4;
  let variance = (n * (n + 1) * (2 * n + 1)) / 24;
  const tieCounts = new Map<number, number>();
  for (const r of ranks) tieCounts.set(r, (tieCounts.get(r) ?? 0) + 1);
  for (const t of tieCounts.values()) variance -= (t * t * t - t) / 48;
  if (variance <= 0) return 1;
  const z = (w - meanW + 0.5) / Math.sqrt(variance);
  return Math.min(1, erfc(-z / Math.SQRT2));
}

export function wilcoxonSignedRank(x: number[], y: number[]): WilcoxonResult {
  if (x.length !== y.length) throw new Error("paired samples must have equal length");
  if (x.length < 1) throw new Error("need at least one pair");
  const diffs = x.map((v, i) => v - y[i]).filter((d) => d !== 0);
  const n = diffs.length;
  if (n === 0) throw new AllZeroDifferencesError("all paired differences are zero");
  const ranks = midranks(diffs.map(Math.abs));
  let wPlus = 0;
  let totalRank = 0;
  for (let i = 0; i < n; i++) {
    totalRank += ranks[i];
    if (diffs[i] > 0) wPlus += ranks[i];
  }
  const w = Math.min(wPlus, totalRank - wPlus);
  if (n <= EXACT_LIMIT) {
    return { wStatistic: w, pValue: exactTwoSidedP(ranks, w), nEffective: n, mode: "exact" };
  }
  return {
    wStatistic: w,
    pValue: normalTwoSidedP(ranks, w, n),
    nEffective: n,
    mode: "normal_approx",
  };
}
