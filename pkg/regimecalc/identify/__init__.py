"""
This module decides whether a causal query is identified from observable quantities,
evaluates the identifying formula exactly and compares it with the truth of the full model.
"""

from regimecalc.identify.query import (
    GRAPHICAL_NECESSARY,
    CausalQuery,
    CheckResult,
    Condition,
    EffectKind,
    IdentificationResult,
    Roles,
    SequentialStep,
    Verdict,
    Witness,
)
from regimecalc.identify.errors import IdentificationError, InvalidRoleError, NotDefined, NotIdentified
from regimecalc.identify.criteria import (
    check_back_door,
    check_l2_non_descendant,
    check_mediator_regime,
    check_nde_defined,
    check_nde_observational,
    check_nde_roles,
    check_observable_roles,
    check_response_mediator_stability,
    check_response_treatment_stability,
    check_roles_non_descendant,
    check_sequential,
    check_sequential_roles,
    check_simple_stability,
    check_weak_condition,
    check_zx_backdoor,
    first_failure,
)
from regimecalc.identify.search import (
    DEFAULT_MAX_ADJUST_SIZE,
    search_back_door,
    search_l,
    search_nde_roles,
    search_s,
    search_sequential_blocks,
    search_w,
)
from regimecalc.identify.formulas import (
    DEFAULT_TOLERANCE,
    ace,
    ace_random,
    cde,
    check_no_interaction,
    direct_effect,
    evaluate_g_formula,
    g_formula,
    g_formula_expression,
    sde,
    sequential_effect,
)
from regimecalc.identify.mediation import (
    identify_nde_observational,
    natural_effect_distribution,
    natural_effect_expression,
    natural_roles,
    nde,
    nie,
)
from regimecalc.identify.engine import identify_query
from regimecalc.identify.oracle import (
    OracleEffect,
    OracleReport,
    compare_with_oracle,
    estimate_randomized_studies,
    experimental_identify,
    natural_effect_oracle,
    oracle_effect,
    randomized_study_tables,
)
