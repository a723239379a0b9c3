"""
Pick the constraint degree and list budget for a latency target.

For each constraint degree, find the smallest list budget whose predicted
miss probability clears the target, then price the worst-case decode with
the reference time factors.  Small degrees pay in search length, large ones
in trellis initialization; the sweet spot sits in between.
"""

import numpy as np

from lcosd import (
    TimeModel,
    decode_time,
    min_list_size,
    sample_cardinalities,
    sigma_from_ebn0,
)

N, K = 128, 64
DB = 2.0
TARGET = 6.0e-3  # roughly the optimal-decoder frame error rate here

sigma = sigma_from_ebn0(DB, K / N)
model = TimeModel.reference()

print(f"[{N},{K}] at {DB} dB, target miss probability {TARGET:.1e}")
print("delta   minimum list   worst-case time")
rows = []
for i, delta in enumerate(range(4, 12)):
    cards = sample_cardinalities(N, K, delta, sigma, 20_000, seed=50 + i)
    l_star = min_list_size(N, K, delta, sigma, TARGET, 20_000, seed=50 + i, cards=cards)
    t_max = decode_time(N, K, delta, l_star, model)
    rows.append((delta, l_star, t_max))
    print(f"{delta:5d}   {l_star:12d}   {1e3 * t_max:10.2f} ms")

best = min(rows, key=lambda r: r[2])
print(f"\nbest worst-case latency: delta = {best[0]} "
      f"(list {best[1]}, {1e3 * best[2]:.2f} ms)")
