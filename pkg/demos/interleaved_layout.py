"""The interleaved buffer layout for jammer windows shorter than encoder windows.

When w_s = alpha * w_x with alpha <= 1, the buffer phases mix a heavy
type-1 law (admissible only on the ratio-enlarged input set) with a cheap
type-2 law so that every encoder window still averages out inside the
input set, while every jammer-length sub-window of key material stays
informative.
"""

import numpy as np

from winavc import interleave_allocation
from winavc.codec import make_phase_plan_thm2, type1_window_fractions

w_x, alpha, lam_frac = 16, 0.5, 0.25

print(f"w_x={w_x}, alpha={alpha}, lambda={lam_frac} "
      f"(l = {round(lam_frac * alpha * w_x)})\n")
print("buffer windows ramp the type-1 block in, one l-step per window:")
for i in range(5):
    s1, _ = interleave_allocation(w_x, alpha, lam_frac, i, "II")
    row = ["1" if j in set(s1.tolist()) else "." for j in range(w_x)]
    print(f"  window {i}: {''.join(row)}")
s1, _ = interleave_allocation(w_x, alpha, lam_frac, 0, "III")
row = ["1" if j in set(s1.tolist()) else "." for j in range(w_x)]
print(f"  key phase: {''.join(row)}  (block rule)")

plan = make_phase_plan_thm2(64, w_x, alpha, lam_frac, round(alpha * w_x))
fr = type1_window_fractions(plan)
print(f"\nsliding type-1 fraction over the whole buffer+key region:")
print(f"  min {fr.min():.4f}  max {fr.max():.4f}  "
      f"(claimed range [{alpha}, {alpha * (1 + lam_frac)}])")

hist, edges = np.histogram(fr, bins=6, range=(alpha, alpha * (1 + lam_frac)))
for h, lo, hi in zip(hist, edges, edges[1:]):
    print(f"  [{lo:.3f}, {hi:.3f}): {'#' * int(1 + 40 * h / fr.size)} {h}")
