"""Scalar measures of dynamic entanglement."""
from .checks import (diamond_choi_sandwich_check, fidelity_diamond_transfer_check, inequality_suite,
                     isotropic_threshold, mes_overlap_ppt, mes_overlap_sampled)
from .distance import diamond_distance, diamond_report, dmax
from .hypothesis import (choi_input, eh_fixed_input, eh_maximize, eh_swapped_minimax,
                         hypothesis_testing_divergence, hypothesis_testing_report)
from .nielsen import nielsen_unitary_robustness
from .report import BOUND_KINDS, MeasureReport
from .robustness import (generalized_robustness, liberal_smoothed_log_robustness, log_robustness,
                         smoothed_log_robustness, standard_robustness)

__all__ = [
    "BOUND_KINDS", "MeasureReport", "choi_input", "diamond_choi_sandwich_check", "diamond_distance",
    "diamond_report", "dmax", "eh_fixed_input", "eh_maximize", "eh_swapped_minimax",
    "fidelity_diamond_transfer_check", "generalized_robustness", "hypothesis_testing_divergence",
    "hypothesis_testing_report", "inequality_suite", "isotropic_threshold",
    "liberal_smoothed_log_robustness", "log_robustness", "mes_overlap_ppt", "mes_overlap_sampled",
    "nielsen_unitary_robustness", "smoothed_log_robustness", "standard_robustness",
]
