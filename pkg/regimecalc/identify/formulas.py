"""
Formulas
--------
Exact evaluation of the g-formula and the effects built on it.

For targets ``X_1..X_K`` with regimes ``s_1..s_K`` and covariate blocks ``L_1..L_K``
(``L_k`` observed after ``X_{k-1}`` and before ``X_k``)::

    p(y; s̄) = Σ p(y | x̄, l̄) ∏_k p(l_k | l̄_{k-1}, x̄_{k-1}) p_{s_k}(x_k | x̄_{k-1}, l̄_k)

where ``p_{s_k}`` is the regime's distribution for ``X_k`` and every other factor is observational.
Only an :py:class:`~regimecalc.model.model.ObservationalView` is ever consulted.
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from regimecalc.graph.dag import descendants_of_set
from regimecalc.identify.criteria import (
    check_back_door,
    check_mediator_regime,
    check_sequential,
    check_sequential_roles,
)
from regimecalc.identify.errors import IdentificationError, InvalidRoleError, NotIdentified
from regimecalc.identify.query import CausalQuery, CheckResult, IdentificationResult, Roles, Verdict
from regimecalc.identify.search import DEFAULT_MAX_ADJUST_SIZE, search_back_door, search_sequential_blocks
from regimecalc.model.model import ObservationalView
from regimecalc.model.table import Table, contract
from regimecalc.regimes.types import (
    AtomicRegime,
    ConditionalRegime,
    IdleRegime,
    MediatorRegime,
    RandomRegime,
    regime_cpt,
)

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
"""Tolerance of numeric comparisons (oracle deviations, interaction checks)."""

Blocks = Sequence[Sequence[str]]


def _flat(blocks: Blocks) -> List[str]:
    return [name for block in blocks for name in block]


def factor_name(target: Sequence[str], given: Sequence[str] = (), prefix: str = "p") -> str:
    """``p(t1,t2|g1,g2)`` with lower-cased variable names."""
    target = ",".join(name.lower() for name in target)
    if not given:
        return f"{prefix}({target})"
    return f"{prefix}({target}|{','.join(name.lower() for name in given)})"


def g_formula_expression(
    targets: Sequence[str], regimes: Sequence[MediatorRegime], blocks: Blocks, response: str
) -> Tuple[str, ...]:
    """
    Factors of the g-formula: the response factor first, then per step the covariate factor
    followed by the regime factor. Atomic regimes contribute no factor.
    """
    factors = [factor_name([response], [*targets, *_flat(blocks)])]
    for k, (target, regime) in enumerate(zip(targets, regimes)):
        if blocks[k]:
            factors.append(factor_name(blocks[k], [*targets[:k], *_flat(blocks[:k])]))
        if isinstance(regime, IdleRegime):
            factors.append(factor_name([target], [*targets[:k], *_flat(blocks[: k + 1])]))
        elif isinstance(regime, ConditionalRegime):
            decision = f"a({','.join(name.lower() for name in regime.cond_set)})" if regime.cond_set else "a"
            factors.append(f"1[{target.lower()}={decision}]")
        elif isinstance(regime, RandomRegime):
            factors.append(factor_name([target], regime.cond_set, prefix="p~"))
    return tuple(factors)


def evaluate_g_formula(
    view: ObservationalView,
    targets: Sequence[str],
    regimes: Sequence[MediatorRegime],
    blocks: Blocks,
    response: str,
) -> Table:
    """
    Sum the g-formula without checking any identification condition.

    :raises PositivityViolation: If a needed observational conditional is undefined.
    :raises LatentVariableError: If a latent variable is involved.
    """
    covariates = _flat(blocks)
    view.check_observable([*targets, *covariates, response])
    factors = [view.factor([response], [*targets, *covariates])]
    for k, (target, regime) in enumerate(zip(targets, regimes)):
        past = [*targets[:k], *_flat(blocks[:k])]
        if blocks[k]:
            factors.append(view.factor(blocks[k], past))
        if isinstance(regime, IdleRegime):
            factors.append(view.factor([target], [*past, *blocks[k]]))
        else:
            factors.append(regime_cpt(regime, view.variable(target), None, view.cards).as_table())
    return contract(factors, [response])


def _expect(view: ObservationalView, distribution: Table, response: str) -> float:
    return distribution.expectation(view.variable(response).numeric)


def resolve_blocks(
    view: ObservationalView,
    targets: Sequence[str],
    regimes: Sequence[MediatorRegime],
    blocks: Sequence[Optional[Sequence[str]]],
    response: str,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> Tuple[Tuple[Tuple[str, ...], ...], CheckResult]:
    """
    Search the unset blocks and confirm the plan is identified.

    :raises NotIdentified: With the witness of the failed stability condition.
    :raises InvalidRoleError: If given blocks or regimes violate the temporal order.
    """
    dag = view.dag
    if any(block is None for block in blocks):
        resolved = search_sequential_blocks(dag, targets, regimes, response, blocks, max_size)
    else:
        resolved = tuple(tuple(block) for block in blocks)
        check_sequential_roles(dag, targets, resolved, response, regimes)
    result = check_sequential(dag, targets, resolved, response, regimes)
    if not result:
        raise NotIdentified(
            f"The effect of {list(targets)} on {response!r} is not identified with blocks "
            f"{[list(block) for block in resolved]}.",
            result.witness,
        )
    return resolved, result


def g_formula(
    view: ObservationalView,
    targets: Sequence[str],
    regimes: Sequence[MediatorRegime],
    blocks: Blocks,
    response: str,
) -> Table:
    """
    ``p(y; s̄)`` through the g-formula, once simple stability or the weak condition holds.

    :raises NotIdentified: If neither condition holds.
    :raises PositivityViolation: If a needed conditioning event has zero probability.
    """
    resolved, _ = resolve_blocks(view, targets, regimes, blocks, response)
    return evaluate_g_formula(view, targets, regimes, resolved, response)


def _notes(check: CheckResult) -> Tuple[str, ...]:
    return (check.label,) if check.label else ()


def ace(
    view: ObservationalView,
    treatment: str,
    response: str,
    x: int,
    x_star: int,
    c: Optional[Sequence[str]] = None,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> IdentificationResult:
    """
    Average causal effect ``E(Y; σ_X = x) - E(Y; σ_X = x*)`` by back-door adjustment
    ``Σ_c p(y|c,x) p(c)``; ``C`` is searched for when not given.
    """
    try:
        if c is None:
            c = search_back_door(view.dag, treatment, response, max_size)
        else:
            result = check_back_door(view.dag, treatment, response, c)
            if not result:
                raise NotIdentified(f"C={list(c)} does not satisfy the back-door criterion.", result.witness)
    except IdentificationError as error:
        return IdentificationResult.failure(error, Roles(c=None if c is None else tuple(c)))
    c = tuple(c)
    distributions = [
        evaluate_g_formula(view, [treatment], [AtomicRegime(value=value)], [c], response) for value in (x, x_star)
    ]
    return IdentificationResult(
        identified=True,
        verdict=Verdict.IDENTIFIED,
        value=_expect(view, distributions[0], response) - _expect(view, distributions[1], response),
        distribution=distributions[0],
        formula=g_formula_expression([treatment], [AtomicRegime(value=x)], [c], response),
        roles=Roles(c=c),
    )


def ace_random(
    view: ObservationalView,
    treatment: str,
    response: str,
    regime: Union[ConditionalRegime, RandomRegime],
    c: Optional[Sequence[str]] = None,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> Table:
    """
    ``p(y; σ_X = d_C) = Σ_{x,c} p(y|c,x) p̃(x|c) p(c)`` for a random (or conditional) regime
    conditioning on part of ``C``.

    :raises NotIdentified: If ``C`` fails the back-door criterion or none is found.
    :raises InvalidRoleError: If the regime conditions on variables outside ``C``.
    """
    blocks, _ = resolve_blocks(view, [treatment], [regime], [c], response, max_size)
    return evaluate_g_formula(view, [treatment], [regime], blocks, response)


def _blocks_of(query: CausalQuery) -> List[Optional[Tuple[str, ...]]]:
    blocks = [step.block for step in query.steps]
    if not query.auto_search:
        blocks = [() if block is None else block for block in blocks]
    return blocks


def sequential_effect(
    view: ObservationalView, query: CausalQuery, max_size: int = DEFAULT_MAX_ADJUST_SIZE
) -> IdentificationResult:
    """``p(y; s_1, ..., s_K)`` of a SEQ query; the value is the expectation of the response under the plan."""
    targets = [step.target for step in query.steps]
    regimes = [step.regime for step in query.steps]
    try:
        blocks, check = resolve_blocks(view, targets, regimes, _blocks_of(query), query.response, max_size)
    except IdentificationError as error:
        return IdentificationResult.failure(error)
    distribution = evaluate_g_formula(view, targets, regimes, blocks, query.response)
    notes = _notes(check) + tuple(f"L_{k + 1}: {list(block)}" for k, block in enumerate(blocks))
    return IdentificationResult(
        identified=True,
        verdict=Verdict.IDENTIFIED,
        value=_expect(view, distribution, query.response),
        distribution=distribution,
        formula=g_formula_expression(targets, regimes, blocks, query.response),
        notes=notes,
    )


def direct_effect(
    view: ObservationalView,
    treatment: str,
    mediator: str,
    response: str,
    x: int,
    x_star: int,
    regime: MediatorRegime,
    l1: Optional[Sequence[str]] = None,
    l2: Optional[Sequence[str]] = None,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> IdentificationResult:
    """
    Direct effect ``E(Y; σ_X = x, σ_Z = s) - E(Y; σ_X = x*, σ_Z = s)`` for a mediator regime ``s``,
    through the two-step g-formula with blocks ``L1`` (before the treatment) and ``L2`` (before the mediator).
    The regime must keep the mediator independent of the treatment indicator.
    """
    roles = Roles(l1=None if l1 is None else tuple(l1), l2=None if l2 is None else tuple(l2))
    targets = [treatment, mediator]
    try:
        shielded = check_mediator_regime(view.dag, treatment, mediator, regime)
        if not shielded:
            raise NotIdentified(
                f"Under the given regime {mediator!r} still depends on the treatment {treatment!r}.",
                shielded.witness,
            )
        blocks, check = resolve_blocks(
            view, targets, [AtomicRegime(value=x), regime], [roles.l1, roles.l2], response, max_size
        )
    except IdentificationError as error:
        return IdentificationResult.failure(error, roles)
    distributions = [
        evaluate_g_formula(view, targets, [AtomicRegime(value=value), regime], blocks, response)
        for value in (x, x_star)
    ]
    return IdentificationResult(
        identified=True,
        verdict=Verdict.IDENTIFIED,
        value=_expect(view, distributions[0], response) - _expect(view, distributions[1], response),
        distribution=distributions[0],
        formula=g_formula_expression(targets, [AtomicRegime(value=x), regime], blocks, response),
        notes=_notes(check),
        roles=Roles(l1=blocks[0], l2=blocks[1]),
    )


def cde(
    view: ObservationalView,
    treatment: str,
    mediator: str,
    response: str,
    x: int,
    x_star: int,
    z: int,
    l1: Optional[Sequence[str]] = None,
    l2: Optional[Sequence[str]] = None,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> IdentificationResult:
    """Controlled direct effect with the mediator set to ``z``."""
    return direct_effect(view, treatment, mediator, response, x, x_star, AtomicRegime(value=z), l1, l2, max_size)


def sde(
    view: ObservationalView,
    treatment: str,
    mediator: str,
    response: str,
    x: int,
    x_star: int,
    regime: RandomRegime,
    l1: Optional[Sequence[str]] = None,
    l2: Optional[Sequence[str]] = None,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> IdentificationResult:
    """
    Standardized direct effect: the mediator is drawn from ``p̃(z | w)``.

    :raises InvalidRoleError: If ``W`` contains the treatment or one of its descendants.
    """
    forbidden = sorted(set(regime.cond_set) & descendants_of_set(view.dag, [treatment], include_self=True))
    if forbidden:
        raise InvalidRoleError(f"W cannot contain the treatment or its descendants; offending: {forbidden}.")
    return direct_effect(view, treatment, mediator, response, x, x_star, regime, l1, l2, max_size)


def check_no_interaction(
    view: ObservationalView,
    treatment: str,
    mediator: str,
    response: str,
    tol: float = DEFAULT_TOLERANCE,
    l1: Optional[Sequence[str]] = None,
    l2: Optional[Sequence[str]] = None,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> Tuple[bool, float]:
    """
    Whether the controlled direct effect is the same at every mediator value:
    the largest ``|CDE_z(x, x*) - CDE_z'(x, x*)|`` over all values, compared against ``tol``.

    :raises NotIdentified: If the controlled direct effects are not identified.
    """
    targets = [treatment, mediator]
    placeholder_plan = [AtomicRegime(value=0), AtomicRegime(value=0)]
    blocks, _ = resolve_blocks(view, targets, placeholder_plan, [l1, l2], response, max_size)
    cards = view.cards
    means = np.array(
        [
            [
                _expect(
                    view,
                    evaluate_g_formula(
                        view, targets, [AtomicRegime(value=x), AtomicRegime(value=z)], blocks, response
                    ),
                    response,
                )
                for z in range(cards[mediator])
            ]
            for x in range(cards[treatment])
        ]
    )
    contrasts = means[:, None, :] - means[None, :, :]
    deviation = float(np.max(contrasts.max(axis=-1) - contrasts.min(axis=-1)))
    logger.debug(f"Largest spread of the controlled direct effect over {mediator!r}: {deviation:.3g}")
    return deviation <= tol, deviation
