"""
Catalytic simulation with a returned swap
=========================================

A catalyst swap of dimension l is borrowed and returned.  The superchannel may
raise robustness of free inputs by at most delta, which requires l^2 >= 1 + 1/delta.
"""
from dynent import catalytic_dilution, swap_channel

theta, rep = catalytic_dilution(swap_channel(2), l=2, delta=1.0, epsilon=0, probes=10)
d = rep.details
print("catalyst l=2, delta=1")
print("  swap dimension used K =", d["k"], " realized cost", rep.realized)
print("  bounds", round(rep.lower, 5), "..", round(rep.upper, 5))
print("  robustness of the miss channel", d["miss_robustness"], "<= 1/(l^2 - 1) =", d["miss_bound"])
for name, ok in rep.checks.items():
    print(f"  {name:32s} {ok}")
