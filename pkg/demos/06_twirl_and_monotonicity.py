"""
Twirling and monotonicity
=========================

The twisted twirl projects any channel onto a four-dimensional family that
contains the swap.  Free superchannels never increase the measures, while a
superchannel that tolerates a little entanglement raises log-robustness by at
most log2(1 + delta).
"""
from dynent import monotonicity_suite, random_channel, twirl_suite, twisted_twirl
from dynent.twirl import twirl_coefficients

for k in (2, 3):
    out = twirl_suite(k, samples=10, seed=0)
    print(f"K={k}: image rank {out['image_rank']}, swap fixed to {out['swap_deviation']:.1e}")

n = random_channel((2, 2, 2, 2), seed=3)
print("weights of a twirled random channel:", twirl_coefficients(twisted_twirl(n)).round(4))

res = monotonicity_suite(channels=3, superchannels=4, seed=0)
for key in ("max_increase_generalized", "max_increase_standard", "max_increase_eh", "max_excess_growth"):
    print(f"{key:28s} {res[key]: .3e}")
