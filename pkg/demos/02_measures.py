"""
A tour of the channel measures
==============================

Diamond distance, max-relative entropy, smoothed robustness over diamond and
liberal balls, and the hypothesis-testing monotone, on a random channel.
"""
from dynent import (choi_input, diamond_distance, dmax, eh_fixed_input, eh_maximize, liberal_smoothed_log_robustness,
                    log_robustness, random_channel, random_separable_channel, smoothed_log_robustness)

dims = (2, 2, 2, 2)
n = random_channel(dims, seed=1)
free = random_separable_channel(dims, seed=2, terms=2)

print("half diamond distance to a free channel:", diamond_distance(n, free))
print("dmax(N || free):", dmax(n, free))

# log-robustness is the smallest dmax to any (PPT) free channel
print("log-robustness:", log_robustness(n))
for eps in (0.01, 0.05, 0.1):
    diamond = smoothed_log_robustness(n, eps).value
    liberal = liberal_smoothed_log_robustness(n, choi_input(dims), eps).value
    print(f"eps={eps}: smoothed {diamond:.5f}, liberal ball {liberal:.5f}")

# the hypothesis-testing monotone, at the Choi input and after a heuristic search over inputs
for eps in (0.0, 0.1):
    rep = eh_fixed_input(n, choi_input(dims), eps)
    print(f"E_H at eps={eps}, Choi input: {rep.value:.5f}  ({rep.bound_kind})")
best = eh_maximize(n, 0.1, restarts=2, seed=0)
print("E_H at eps=0.1, searched:", best.value, "from start", best.details["start"])
