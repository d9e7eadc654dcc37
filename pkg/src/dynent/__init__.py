"""Dynamic entanglement of bipartite quantum channels: robustness, hypothesis testing and superchannels."""
__version__ = "0.1.0"

from .channels import (BipartiteChannel, apply, depolarizing_channel, from_kraus, identity_channel, is_ppt,
                       isotropic_state, maximally_entangled, mixture, operator_schmidt, product_channel,
                       random_channel, random_separable_channel, swap_channel, swap_gate, tensor,
                       unitary_channel)
from .harness import (catalytic_dilution, cost_bound_harness, distill_bound_harness, golden_units,
                      monotonicity_suite, twirl_suite)
from .linalg import DensityOperator
from .measures import *  # noqa: F401,F403
from .measures import __all__ as _measures_all
from .superchannels import (MeasureAndPrepare, PrePost, SeppscCertificate, apply_superchannel,
                            dilution_superchannel, distillation_superchannel, garbage_channel,
                            random_free_superchannel, seppsc_certify, superchannel_from_json)
from .twirl import CatalystChannel, twisted_twirl

__all__ = [
    "BipartiteChannel", "CatalystChannel", "DensityOperator", "MeasureAndPrepare", "PrePost",
    "SeppscCertificate", "apply", "apply_superchannel", "catalytic_dilution", "cost_bound_harness",
    "depolarizing_channel", "dilution_superchannel", "distill_bound_harness", "distillation_superchannel",
    "from_kraus", "garbage_channel", "golden_units", "identity_channel", "is_ppt", "isotropic_state",
    "maximally_entangled", "mixture", "monotonicity_suite", "operator_schmidt", "product_channel",
    "random_channel", "random_free_superchannel", "random_separable_channel", "seppsc_certify",
    "superchannel_from_json", "swap_channel", "swap_gate", "tensor", "twirl_suite", "twisted_twirl",
    "unitary_channel", *_measures_all,
]
