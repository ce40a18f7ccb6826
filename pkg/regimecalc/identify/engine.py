"""
Engine
------
Entry point of the identification layer: dispatch a :py:class:`~regimecalc.identify.query.CausalQuery`
to the routine of its kind, working from the observable distribution only.
"""

import logging

from regimecalc.identify.criteria import check_observable_roles
from regimecalc.identify.errors import IdentificationError, NotIdentified
from regimecalc.identify.formulas import (
    ace,
    ace_random,
    cde,
    g_formula_expression,
    resolve_blocks,
    sde,
    sequential_effect,
)
from regimecalc.identify.mediation import identify_nde_observational
from regimecalc.identify.query import CausalQuery, EffectKind, IdentificationResult, Roles, Verdict
from regimecalc.identify.search import DEFAULT_MAX_ADJUST_SIZE
from regimecalc.model.model import ObservationalView
from regimecalc.regimes.types import ConditionalRegime, RandomRegime

logger = logging.getLogger(__name__)


def _role(query: CausalQuery, members):
    if members is None and not query.auto_search:
        return ()
    return members


def _regime_ace(view: ObservationalView, query: CausalQuery, roles: Roles, max_size: int) -> IdentificationResult:
    regime = query.treatment_regime
    c = _role(query, roles.c)
    try:
        blocks, _ = resolve_blocks(view, [query.treatment], [regime], [c], query.response, max_size)
    except IdentificationError as error:
        return IdentificationResult.failure(error, roles)
    distribution = ace_random(view, query.treatment, query.response, regime, blocks[0], max_size)
    return IdentificationResult(
        identified=True,
        verdict=Verdict.IDENTIFIED,
        value=distribution.expectation(view.variable(query.response).numeric),
        distribution=distribution,
        formula=g_formula_expression([query.treatment], [regime], blocks, query.response),
        roles=Roles(c=blocks[0]),
    )


def identify_query(
    view: ObservationalView, query: CausalQuery, max_size: int = DEFAULT_MAX_ADJUST_SIZE
) -> IdentificationResult:
    """
    Identify and evaluate ``query`` on ``view``.

    Role sets given with a latent member make the query not identified; unset roles are searched for when
    :py:attr:`~regimecalc.identify.query.CausalQuery.auto_search` is on and taken as empty otherwise.

    :raises PositivityViolation: If a needed conditional is undefined.
    :raises InvalidRoleError: If given roles break a structural requirement.
    """
    roles = query.roles
    observable = check_observable_roles(view.dag, roles)
    if not observable:
        logger.warning(f"Query roles are not observable: {observable.witness.reason}")
        error = NotIdentified(f"Role member(s) {list(observable.witness.nodes)} are latent.", observable.witness)
        return IdentificationResult.failure(error, roles)
    kind = query.kind
    logger.debug(f"Identifying a {kind.value} query for {query.response!r}")
    if kind == EffectKind.ACE:
        if isinstance(query.treatment_regime, (ConditionalRegime, RandomRegime)):
            return _regime_ace(view, query, roles, max_size)
        return ace(view, query.treatment, query.response, query.x, query.x_star, _role(query, roles.c), max_size)
    if kind in (EffectKind.CDE, EffectKind.SDE):
        l1, l2 = _role(query, roles.l1), _role(query, roles.l2)
        args = (view, query.treatment, query.mediator, query.response, query.x, query.x_star)
        if kind == EffectKind.CDE:
            return cde(*args, query.mediator_value, l1, l2, max_size)
        return sde(*args, query.mediator_regime, l1, l2, max_size)
    if kind in (EffectKind.NDE, EffectKind.NIE):
        return identify_nde_observational(view, query, max_size)
    return sequential_effect(view, query, max_size)
