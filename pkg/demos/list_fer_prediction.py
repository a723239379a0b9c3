"""
Predict the list-miss probability without decoding, then verify by counting.

The prediction samples reliability vectors, estimates the lighter-pattern
count per sample, and averages the binomial rank model - no decoder in the
loop.  The verification actually runs the constrained search per frame and
counts how often the transmitted word misses the list.  Both sides shrink
here (a [48, 24] code and short runs) so the script finishes in seconds;
the acceptance suite does the full-size version.
"""

from lcosd import (
    conditional_rank,
    list_fer,
    random_code,
    run_list_rank_point,
    sigma_from_ebn0,
)

N, K, DELTA = 48, 24, 6
L_MAX = 64
code = random_code(N, K, seed=9)

print(f"[{N},{K}] random code, constraint degree {DELTA}, list size {L_MAX}")
print("Eb/N0   predicted    simulated    cond.rank (pred/sim)")
for i, db in enumerate([1.0, 2.0, 3.0]):
    sigma = sigma_from_ebn0(db, K / N)
    curve = list_fer(N, K, DELTA, sigma, [L_MAX], samples=20_000, seed=100 + i)
    record = run_list_rank_point(
        code, db, delta=DELTA, rank_cap=L_MAX, frames=20_000, master_seed=200 + i
    )
    print(
        f"{db:4.1f}   {curve.entries[L_MAX].eps:9.2e}   {record.miss_rate(L_MAX):9.2e}"
        f"    {conditional_rank(curve, L_MAX):5.2f} / "
        f"{record.conditional_mean_rank(L_MAX):5.2f}"
    )
