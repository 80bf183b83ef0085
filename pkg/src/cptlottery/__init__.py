"""Profit-maximizing lottery design for buyers who evaluate tickets by
cumulative prospect theory."""

from .cpt import (
    CptParams,
    DecisionWeights,
    Prospect,
    decision_weights,
    expected_utility,
    expected_utility_grouped,
    value,
    value_array,
    value_inverse,
    weight,
    weight_array,
)
from .engine import (
    STATUS_FINITE,
    STATUS_UNBOUNDED,
    STATUS_ZERO,
    DesignResult,
    GainProfile,
    GainTable,
    PrizeTable,
    design_optimal,
    expand_design,
    max_buyer_utility,
    mid_optimum,
    mid_optimum_eps,
    naive_design,
    precompute_gain_table,
)
from .fixed_price import (
    BoundedLossSolution,
    InfeasibleError,
    ScalarProfile,
    design_fixed_price,
    design_fixed_price_fast,
    solve_loss_bounded,
    solve_scalar_profile,
    y_min,
)
from .gain import (
    GainSolution,
    KktReport,
    flexional_index,
    gain_value_coeff,
    solve_gain,
    transitional_index,
    verify_kkt_gain,
)
from .loss import LossSolution, best_ell, loss_value_coeff, solve_loss
from .oracle import (
    OracleConfig,
    OracleDesign,
    oracle_design,
    oracle_fixed,
    oracle_gain,
    oracle_loss,
)
from .presets import PRESETS, Preset

__version__ = "0.1.0"

__all__ = [
    "CptParams",
    "DecisionWeights",
    "Prospect",
    "decision_weights",
    "expected_utility",
    "expected_utility_grouped",
    "value",
    "value_array",
    "value_inverse",
    "weight",
    "weight_array",
    "STATUS_FINITE",
    "STATUS_UNBOUNDED",
    "STATUS_ZERO",
    "DesignResult",
    "GainProfile",
    "GainTable",
    "PrizeTable",
    "design_optimal",
    "expand_design",
    "max_buyer_utility",
    "mid_optimum",
    "mid_optimum_eps",
    "naive_design",
    "precompute_gain_table",
    "BoundedLossSolution",
    "InfeasibleError",
    "ScalarProfile",
    "design_fixed_price",
    "design_fixed_price_fast",
    "solve_loss_bounded",
    "solve_scalar_profile",
    "y_min",
    "GainSolution",
    "KktReport",
    "flexional_index",
    "gain_value_coeff",
    "solve_gain",
    "transitional_index",
    "verify_kkt_gain",
    "LossSolution",
    "best_ell",
    "loss_value_coeff",
    "solve_loss",
    "OracleConfig",
    "OracleDesign",
    "oracle_design",
    "oracle_fixed",
    "oracle_gain",
    "oracle_loss",
    "PRESETS",
    "Preset",
]
