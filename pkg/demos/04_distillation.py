"""
Distilling swaps from a noisy swap
==================================

Tests the channel with the optimal hypothesis test, prepares a K-swap on
success and a garbage channel otherwise.  The table also shows the lower bound
computed with the parity rule for K, next to a bound that always holds: floor(E)
for even floor(E) and floor(E) - 1 for odd floor(E).
"""
from dynent import distill_bound_harness, mixture, random_separable_channel, swap_channel

dims = (2, 2, 2, 2)
rep = distill_bound_harness(swap_channel(2), 0)
print("swap, eps=0: E_H", round(rep.details["e_h"], 6), "realized", rep.realized,
      "diamond error", rep.details["diamond_error"])

print(f"{'p':>5} {'E_H':>7} {'K':>2} {'realized':>8} {'stated':>7} {'proven':>7}")
for i, p in enumerate((0.95, 0.9, 0.85, 0.8)):
    n = mixture([swap_channel(2), random_separable_channel(dims, i, 2)], [p, 1 - p])
    r = distill_bound_harness(n, 0.1, restarts=1)
    d = r.details
    print(f"{p:5.2f} {d['e_h']:7.4f} {d['k']:2d} {r.realized:8.1f} {d['stated_lower']:7.4f} "
          f"{d['rigorous_lower']:7.4f}")
