"""
The swap channel as a unit of dynamic entanglement
==================================================

Builds the K-swap, checks that it turns two local maximally entangled pairs
into two shared ones, and computes its robustness three ways.
"""
import numpy as np

from dynent import (generalized_robustness, maximally_entangled, nielsen_unitary_robustness, standard_robustness,
                    swap_channel, swap_gate)
from dynent.channels import apply, is_ppt
from dynent.linalg import DensityOperator, permute_subsystems

k = 2
f = swap_channel(k)
print("Choi shape", f.choi.shape, "rank", np.linalg.matrix_rank(f.choi, tol=1e-10))

# Alice holds Phi on (A2, A1), Bob holds Phi on (B2, B1); A2 and B2 go through the swap.
phi = maximally_entangled(k).matrix
state = DensityOperator(permute_subsystems(np.kron(phi, phi), (k,) * 4, [0, 2, 1, 3]), (k,) * 4)
out = apply(f, state).matrix
shared = permute_subsystems(np.kron(phi, phi), (k,) * 4, [0, 2, 3, 1])
print("after the swap both pairs straddle the cut:", np.allclose(out, shared))

# the Choi matrix is not PPT, so the swap is not a separable channel
print("min PT eigenvalue of the Choi:", is_ppt(f).min_pt_eigenvalue)

# robustness from the two SDPs and from the operator Schmidt coefficients
print("standard robustness   ", standard_robustness(f).value)
print("generalized robustness", generalized_robustness(f).value)
print("closed form           ", nielsen_unitary_robustness(swap_gate(k), (k, k)).value)
print("expected K^2 - 1      ", k * k - 1)
