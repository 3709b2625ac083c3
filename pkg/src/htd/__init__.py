"""Heavy-tailed distribution classes, membership certificates and
diversification dominance checks for infinite-mean losses."""

__version__ = "0.1.0"

from .compound import (
    CompoundDistribution,
    CompoundSpec,
    check_compound_dominance,
    compound_binomial,
    compound_poisson,
    compound_sample,
    compound_survival,
    small_p_expansion_check,
)
from .distributions import (
    Distribution,
    make_cauchy_std,
    make_example,
    make_frechet,
    make_logcauchy,
    make_lomax,
    make_pareto,
    make_piecewise_eta,
    make_point_mass,
    make_uniform,
)
from .dominance import (
    DominanceVerdict,
    TriggerModel,
    check_h_monotone,
    check_power_product_inequality,
    check_sd,
    check_sd_cp,
    check_sd_star,
    check_sd_triggered,
    check_sd_truncated,
    check_tail_type,
    h_function,
    survival_weighted_sum,
    triggered_survival,
    var_additivity_probe,
    var_quantile,
    weighted_sum_quantile,
)
from .dsl import build, canonical, format_expr, parse
from .errors import HTDError, ParseError
from .majorization import Relation, WeightVector, is_majorized_by, majorizes, schur_probe, t_transform_chain
from .membership import (
    CheckReport,
    GridSpec,
    Verdict,
    check_concave_lambda,
    check_convex_transform_order,
    check_g,
    check_h,
    check_hr_order,
    check_hstar,
    check_v,
    classify,
    is_super_cauchy,
    is_super_frechet,
    is_super_pareto,
)
from .montecarlo import MC, MCEstimate
from .reproduce import reproduce, reproduce_all
from .transforms import (
    ConvexMap,
    condition_exceed,
    convex_map,
    excess,
    excess_random,
    max_of,
    mixture,
    pow_cdf,
    pow_survival,
    sum_iid_closed,
    truncate_upper,
)
