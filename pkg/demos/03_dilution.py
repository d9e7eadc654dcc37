"""
Simulating a channel from a swap
================================

The robustness decomposition N = (1 + r) F - r M, with F and M free, is turned
into a superchannel that measures whether its input looks like a K-swap and
prepares N on success and M otherwise.
"""
import math

from dynent import (cost_bound_harness, dilution_superchannel, random_channel, seppsc_certify, standard_robustness,
                    swap_channel)

n = random_channel((2, 2, 2, 2), seed=5)
rep = standard_robustness(n)
r = rep.value
k = math.ceil(math.sqrt(1 + r) - 1e-6)
print(f"standard robustness r = {r:.5f}, so K = {k}")

theta = dilution_superchannel(n, rep.artifacts["mix"], r, k)
err = abs(theta.apply(swap_channel(k)).choi - n.choi).max()
print("exact simulation error:", err)

# separable inputs never pass the test often enough to produce entanglement
cert = seppsc_certify(theta, samples=10, delta=0.0, seed=0)
print("sampled separability check:", cert.verdict, cert.max_output_robustness)

# the same pipeline with the bounds attached
for eps in (0.0, 0.01):
    b = cost_bound_harness(n, eps)
    print(f"eps={eps}: lower {b.lower:.4f} <= realized {b.realized} <= upper {b.upper:.4f}  ok={b.ok}")
