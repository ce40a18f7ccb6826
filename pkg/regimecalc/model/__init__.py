"""
This module defines the discrete probability machinery: tables, CPTs, models,
the truncated-factorization oracle, sampling and CPT fitting.
"""

from regimecalc.model.table import (
    NORMALIZATION_TOLERANCE,
    POSITIVITY_THRESHOLD,
    PositivityViolation,
    Table,
    contract,
)
from regimecalc.model.model import (
    Cpt,
    LatentVariableError,
    Model,
    ObservationalView,
    Variable,
    conditional,
    expectation,
    intervention_distribution,
    joint_prob,
    marginal,
    oracle_intervene,
)
from regimecalc.model.sampling import (
    LATENT_ATTR,
    empirical_distribution,
    fit_cpts,
    fit_observational_view,
    sample,
)
