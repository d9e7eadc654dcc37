"""
Writing an SDP with the built-in solver
=======================================

The largest overlap of a PPT two-qutrit state with the maximally entangled
state, solved as a small program over Hermitian blocks.
"""
import numpy as np

from dynent import maximally_entangled
from dynent.sdp import Program

k = 3
phi = maximally_entangled(k).matrix
prog = Program("real")
sigma = prog.variable("sigma", k * k)
prog.psd(sigma)
prog.psd(sigma.ptranspose((k, k), [1]))
prog.equal(sigma.trace(), 1.0)
prog.maximize(sigma.inner(phi))
sol = prog.solve(tol=1e-9)
print("status", sol.status, "value", sol.value, "expected", 1 / k)
print("primal/dual objectives", sol.value, sol.dual_value)
print("residuals", sol.residuals())
print("min eigenvalue of the optimal state", np.linalg.eigvalsh(sol[sigma]).min())
