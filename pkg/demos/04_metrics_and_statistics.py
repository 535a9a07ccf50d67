"""Metric definitions and the paired significance test, by example.

PSNR and RMSE share one MSE core, so their identities are easy to show
numerically; the Wilcoxon signed-rank test switches from exact sign-flip
enumeration to a corrected normal approximation as n grows.
"""

import math

import numpy as np

from thickslice import mse, psnr, rmse, summarize, wilcoxon_signed_rank

rng = np.random.default_rng(1)
a = rng.normal(size=(64, 64))
b = a + rng.normal(scale=0.05, size=(64, 64))

m, r = mse(a, b), rmse(a, b)
print(f"mse  = {m:.6f}")
print(f"rmse = {r:.6f}  (sqrt of mse: {math.sqrt(m):.6f})")
print(f"psnr = {psnr(a, b, max_i=1.0):.3f} dB "
      f"(identity: {20 * math.log10(1.0 / r):.3f})")
print(f"identical inputs -> psnr = {psnr(a, a, max_i=1.0)}")

scores = [20.1, 21.7, 19.9, 22.3, 24.2]
s = summarize(scores, "psnr_db")
print(f"\nsummary of {scores}: {s.mean:.2f} ± {s.std:.2f} (n={s.n}, population std)")

# Small n: the p-value is an exact count of sign assignments. Six positive
# differences with distinct magnitudes is the textbook 2/2^6 case.
x = [2.0, 3.0, 5.0, 8.0, 9.0, 11.0]
y = [1.0, 1.5, 2.0, 4.0, 4.5, 5.0]
res = wilcoxon_signed_rank(x, y)
print(f"\nn=6, all differences positive: W={res.w_statistic}, "
      f"p={res.p_value} ({res.mode.value})")

# Large n: normal approximation with tie and continuity corrections.
big_x = rng.normal(size=200)
big_y = big_x - 0.08 + rng.normal(scale=0.2, size=200)
res = wilcoxon_signed_rank(big_x, big_y)
print(f"n=200 shifted pairs: W={res.w_statistic:.1f}, "
      f"p={res.p_value:.2e} ({res.mode.value})")
