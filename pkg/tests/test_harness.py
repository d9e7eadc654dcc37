import json

import numpy as np
import pytest

from dynent.channels import mixture, random_channel, random_separable_channel, swap_channel
from dynent.harness import (catalytic_dilution, cost_bound_harness, distill_bound_harness, golden_units,
                            growth_superchannel, monotonicity_suite, parity_k)
from dynent.measures import generalized_robustness, log_robustness

DIMS = (2, 2, 2, 2)
FREE = random_separable_channel(DIMS, 3, 2)


def test_cost_bounds_swap():
    rep = cost_bound_harness(swap_channel(2), 0)
    assert rep.ok
    assert (round(rep.lower, 5), rep.realized, round(rep.upper, 5)) == (2.0, 2, 4.0)
    assert rep.details["simulation_residual"] <= 1e-9
    json.dumps(rep.to_dict())


def test_cost_bounds_free():
    rep = cost_bound_harness(FREE, 0)
    assert rep.ok and (abs(rep.lower), rep.realized, round(rep.upper, 5)) == (0.0, 0, 2.0)


def test_cost_bounds_random_smoothed():
    rep = cost_bound_harness(random_channel(DIMS, 5), 0.01)
    assert rep.ok and rep.within_bounds
    assert rep.lower - 1e-5 <= rep.realized <= rep.upper + 1e-5


def test_parity_rule():
    assert [parity_k(e) for e in (0.3, 1.2, 2.0, 2.9999999, 3.5, 4.1, 5.0)] == [1, 1, 2, 2, 2, 4, 4]


def test_distill_swap():
    rep = distill_bound_harness(swap_channel(2), 0)
    assert rep.ok
    assert abs(rep.details["e_h"] - 2) < 1e-6 and rep.realized == 2
    assert rep.details["diamond_error"] <= 1e-6


def test_distill_free():
    rep = distill_bound_harness(FREE, 0)
    assert rep.ok and rep.realized == 0
    assert abs(rep.lower) < 1e-9 and abs(rep.upper) < 1e-6


def test_distill_noisy_swap_rigorous_bound():
    n = mixture([swap_channel(2), random_separable_channel(DIMS, 0, 2)], [0.95, 0.05])
    rep = distill_bound_harness(n, 0.1, restarts=1)
    assert rep.checks["rigorous_lower_bound_holds"] and rep.checks["diamond_within_epsilon"]
    assert rep.realized >= rep.details["rigorous_lower"] - 1e-5


def test_catalysis_swap():
    theta, rep = catalytic_dilution(swap_channel(2), 2, 1.0, 0, probes=10)
    assert rep.ok
    assert rep.details["k"] == 2 and abs(rep.details["t"] - 16) < 1e-5
    assert rep.details["miss_robustness"] <= 1 / 3 + 1e-6
    assert abs(rep.lower - 1) < 1e-5 and abs(rep.upper - 4) < 1e-5 and rep.realized == 2


def test_catalysis_free_channel():
    _, rep = catalytic_dilution(FREE, 2, 1.0, 0)
    assert rep.ok and rep.realized <= 2


def test_catalysis_premise():
    with pytest.raises(ValueError):
        catalytic_dilution(swap_channel(2), 2, 0.2, 0)


def test_golden_units_k2():
    out = golden_units(2)
    assert out["failures"] == []
    row = out["rows"][0]
    assert abs(row["standard_robustness"] - 3) < 1e-5 and abs(row["isotropic_threshold"] - 0.5) < 1e-6


def test_growth_superchannel_bound():
    theta, delta = growth_superchannel(0.1)
    assert abs(delta - 0.3) < 1e-6
    for s in range(5):
        n = random_channel(DIMS, 50 + s)
        assert log_robustness(theta.apply(n)) <= log_robustness(n) + np.log2(1 + delta) + 1e-5
    # the worst free input reaches the bound
    worst = theta.apply(random_separable_channel(DIMS, 1))
    assert generalized_robustness(worst).value <= delta + 1e-6


def test_monotonicity_small():
    out = monotonicity_suite(channels=2, superchannels=3, seed=1)
    assert out["failures"] == []
    assert out["max_increase_generalized"] <= 1e-5 and out["max_increase_standard"] <= 1e-5
    assert out["max_increase_eh"] <= 1e-5
