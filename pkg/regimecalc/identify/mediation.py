"""
Mediation
---------
Natural direct and indirect effects.

Both rest on ``F(x, x') = p(y; σ_X = x, σ_Z = d_{W,x'})``: the response distribution when the treatment is set
to ``x`` and the mediator is drawn from its distribution within strata of ``W`` under treatment ``x'``::

    NDE(x, x*) = E F(x, x*) - E F(x*, x*)
    NIE(x, x*) = E F(x, x) - E F(x, x*)

From observational data ``F`` is evaluated as::

    Σ p(y | l1, l2, z, x) q(z | w) p(l2 | x, l1) p(l1),   q(z | w) = Σ_s p(z | w, s, x') p(s | w)

provided the roles ``W, S, L1, L2`` pass :py:func:`~regimecalc.identify.criteria.check_nde_observational`.
"""

import logging
from typing import Optional, Tuple

from regimecalc.identify.criteria import check_nde_observational, check_observable_roles, first_failure
from regimecalc.identify.errors import IdentificationError, NotDefined, NotIdentified
from regimecalc.identify.query import CausalQuery, Condition, EffectKind, IdentificationResult, Roles, Verdict
from regimecalc.identify.search import DEFAULT_MAX_ADJUST_SIZE, search_nde_roles
from regimecalc.model.model import ObservationalView
from regimecalc.model.table import Table, contract
from regimecalc.regimes.natural import observational_mediator_table
from regimecalc.regimes.types import NaturalRegimeSpec

logger = logging.getLogger(__name__)


def _split(roles: Roles) -> Tuple[Tuple[str, ...], Tuple[str, ...], Tuple[str, ...], Tuple[str, ...]]:
    """``(W, S, pre, post)``: pre-treatment covariates ``L1 ∪ W`` and the rest of ``L2``."""
    w, s = roles.w or (), roles.s or ()
    pre = tuple(dict.fromkeys([*(roles.l1 or ()), *w]))
    post = tuple(name for name in dict.fromkeys(roles.l2 or ()) if name not in pre)
    return w, tuple(name for name in s if name not in w), pre, post


def natural_effect_expression(roles: Roles) -> Tuple[str, ...]:
    """
    Factors of the observational formula, written with role letters.

    Factors and conditioning letters of empty role sets are elided: with ``S = ()`` there is no
    ``p(s|w)`` factor and ``s`` does not appear in ``p(z|...)``. A ``W`` covered by ``L1`` is written as ``l1``.
    """
    w, s, pre, post = _split(roles)
    pre_letters = (["l1"] if roles.l1 else []) + (["w"] if set(w) - set(roles.l1 or ()) else [])
    post_letters = ["l2"] if post else []
    given = ",".join([*pre_letters, *post_letters, "z", "x"])
    factors = [f"p(y|{given})", f"p(z|{','.join([*(['w'] if w else []), *(['s'] if s else []), 'x*'])})"]
    if post:
        factors.append(f"p(l2|{','.join(['x', *pre_letters])})")
    if s:
        factors.append("p(s|w)" if w else "p(s)")
    if pre_letters:
        factors.append(f"p({','.join(pre_letters)})")
    return tuple(factors)


def natural_effect_distribution(
    view: ObservationalView,
    treatment: str,
    mediator: str,
    response: str,
    x: int,
    baseline: int,
    roles: Roles,
) -> Table:
    """
    ``F(x, baseline)`` from observational quantities, without checking any condition.

    :raises PositivityViolation: If a needed conditional is undefined.
    """
    w, s, pre, post = _split(roles)
    spec = NaturalRegimeSpec(w=w, baseline=baseline).bind(mediator, treatment)
    factors = [
        view.factor([response], [*pre, *post, mediator, treatment]).reduce({treatment: x}),
        observational_mediator_table(view, spec, s),
    ]
    if post:
        factors.append(view.factor(post, [treatment, *pre]).reduce({treatment: x}))
    if pre:
        factors.append(view.marginal(pre))
    return contract(factors, [response])


def natural_roles(
    view: ObservationalView, query: CausalQuery, max_size: int = DEFAULT_MAX_ADJUST_SIZE
) -> Roles:
    """
    Complete and verify the roles of a natural-effect query.

    :raises NotDefined: If the natural regime is not well posed for ``W``.
    :raises NotIdentified: If a given role member is latent or one of the role conditions fails.
    """
    dag = view.dag
    roles = query.roles
    if query.mediator_regime is not None and query.mediator_regime.w and roles.w is None:
        roles = roles.model_copy(update={"w": query.mediator_regime.w})
    observable = check_observable_roles(dag, roles)
    if not observable:
        raise NotIdentified(f"Role member(s) {list(observable.witness.nodes)} are latent.", observable.witness)
    if query.auto_search:
        roles = search_nde_roles(dag, query.treatment, query.mediator, query.response, roles, max_size)
    else:
        roles = Roles(**{field: members or () for field, members in roles.model_dump().items()})
    failed = first_failure(check_nde_observational(dag, query.treatment, query.mediator, query.response, roles))
    if failed is not None:
        if failed.condition == Condition.NDE_DEFINED:
            raise NotDefined(
                f"The natural regime on {query.mediator!r} is not well posed for W={list(roles.w)}.", failed.witness
            )
        raise NotIdentified(f"Condition {failed.condition.value} fails for roles {roles.as_dict()}.", failed.witness)
    return roles


def _role_notes(roles: Roles) -> Tuple[str, ...]:
    return tuple(f"{letter}: {members}" for letter, members in roles.as_dict().items())


def identify_nde_observational(
    view: ObservationalView, query: CausalQuery, max_size: int = DEFAULT_MAX_ADJUST_SIZE
) -> IdentificationResult:
    """
    Natural direct (or, for NIE queries, indirect) effect from observational data.
    The distribution is ``F(x, x*)`` in both cases.
    """
    roles: Optional[Roles] = None
    try:
        roles = natural_roles(view, query, max_size)
    except IdentificationError as error:
        return IdentificationResult.failure(error, roles)
    treatment, mediator, response = query.treatment, query.mediator, query.response
    numeric = view.variable(response).numeric

    def mean(x: int, baseline: int) -> Tuple[float, Table]:
        distribution = natural_effect_distribution(view, treatment, mediator, response, x, baseline, roles)
        return distribution.expectation(numeric), distribution

    direct, distribution = mean(query.x, query.x_star)
    if query.kind == EffectKind.NIE:
        value = mean(query.x, query.x)[0] - direct
    else:
        value = direct - mean(query.x_star, query.x_star)[0]
    logger.info(f"{query.kind.value} of {treatment!r} on {response!r} via {mediator!r}: {value!r}")
    return IdentificationResult(
        identified=True,
        verdict=Verdict.IDENTIFIED,
        value=value,
        distribution=distribution,
        formula=natural_effect_expression(roles),
        notes=_role_notes(roles),
        roles=roles,
    )


def nde(view: ObservationalView, query: CausalQuery, max_size: int = DEFAULT_MAX_ADJUST_SIZE) -> IdentificationResult:
    """Natural direct effect ``E F(x, x*) - E F(x*, x*)``."""
    return identify_nde_observational(view, query.model_copy(update={"kind": EffectKind.NDE}), max_size)


def nie(view: ObservationalView, query: CausalQuery, max_size: int = DEFAULT_MAX_ADJUST_SIZE) -> IdentificationResult:
    """Natural indirect effect ``E F(x, x) - E F(x, x*)``."""
    return identify_nde_observational(view, query.model_copy(update={"kind": EffectKind.NIE}), max_size)
