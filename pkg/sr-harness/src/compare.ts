/**
 * Rank two training runs by held-out PSNR and test the paired per-volume
 * difference, emitting the same report schema the volume-comparison
 * pipeline writes (methods / significance / ranking).
 */

import {
  AllZeroDifferencesError,
  MetricSummary,
  summarize,
  wilcoxonSignedRank,
} from "./metrics.js";
import { MAX_I, RunResult } from "./train.js";

export const SIGNIFICANCE_LEVEL = 0.05;
export const TOOL_VERSION = "0.1.0";

type WilcoxonPayload = {
  w_statistic: number | "n/a";
  p_value: number | "n/a";
  n_effective: number;
  mode: string;
  significant: boolean;
};

export interface ComparisonReport {
  format_version: number;
  metadata: Record<string, unknown>;
  methods: Record<
    string,
    {
      per_slice: { psnr_db: MetricSummary; rmse: MetricSummary };
      per_volume: { psnr_db: MetricSummary; rmse: MetricSummary };
    }
  >;
  significance: Record<string, Record<string, unknown>>;
  ranking: string[];
}

function wilcoxonPayload(x: number[], y: number[]): WilcoxonPayload {
  const finitePairs = x
    .map((v, i) => [v, y[i]] as [number, number])
    .filter(([a, b]) => Number.isFinite(a) && Number.isFinite(b));
  if (finitePairs.length === 0) {
    return { w_statistic: "n/a", p_value: "n/a", n_effective: 0, mode: "n/a", significant: false };
  }
  try {
    const r = wilcoxonSignedRank(
      finitePairs.map(([a]) => a),
      finitePairs.map(([, b]) => b),
    );
    return {
      w_statistic: r.wStatistic,
      p_value: r.pValue,
      n_effective: r.nEffective,
      mode: r.mode,
      significant: r.pValue < SIGNIFICANCE_LEVEL,
    };
  } catch (err) {
    if (err instanceof AllZeroDifferencesError) {
      return { w_statistic: "n/a", p_value: "n/a", n_effective: 0, mode: "n/a", significant: false };
    }
    throw err;
  }
}

export function compareRuns(a: RunResult, b: RunResult): ComparisonReport {
  const idsA = a.heldout.volumes.map((v) => v.pair_id);
  const idsB = b.heldout.volumes.map((v) => v.pair_id);
  if (idsA.length !== idsB.length || idsA.some((id, i) => id !== idsB[i])) {
    throw new Error(
      `mismatched heldout sets: [${idsA.join(", ")}] vs [${idsB.join(", ")}]`,
    );
  }

  const labelA = a.method_label === b.method_label ? `${a.method_label}_a` : a.method_label;
  const labelB = a.method_label === b.method_label ? `${b.method_label}_b` : b.method_label;
  const runs: Array<[string, RunResult]> = [
    [labelA, a],
    [labelB, b],
  ];

  const methods: ComparisonReport["methods"] = {};
  for (const [label, run] of runs) {
    methods[label] = {
      per_slice: run.heldout.per_slice,
      per_volume: {
        psnr_db: summarize(run.heldout.volumes.map((v) => v.psnr_db)),
        rmse: summarize(run.heldout.volumes.map((v) => v.rmse)),
      },
    };
  }

  const ranking = [labelA, labelB].sort(
    (la, lb) => methods[lb].per_volume.psnr_db.mean - methods[la].per_volume.psnr_db.mean,
  );

  const [winner, loser] = ranking;
  const loserRun = loser === labelA ? a : b;
  const winnerRun = winner === labelA ? a : b;
  const significance = {
    [`${loser}_vs_${winner}`]: {
      baseline: loser,
      reference: winner,
      granularity: "per_volume",
      psnr_db: wilcoxonPayload(
        loserRun.heldout.volumes.map((v) => v.psnr_db),
        winnerRun.heldout.volumes.map((v) => v.psnr_db),
      ),
      rmse: wilcoxonPayload(
        loserRun.heldout.volumes.map((v) => v.rmse),
        winnerRun.heldout.volumes.map((v) => v.rmse),
      ),
    },
  };

  return {
    format_version: 1,
    metadata: {
      tool: "sr-harness",
      tool_version: TOOL_VERSION,
      max_i: MAX_I,
      std_definition: "population",
      wilcoxon_zero_method: "wilcox",
      summary_granularity: "per_volume",
      significance_granularity: "per_volume",
      n_pairs: idsA.length,
      runs: { [labelA]: a.run_id, [labelB]: b.run_id },
    },
    methods,
    significance,
    ranking,
  };
}
