"""
Oracle
------
Ground truth for identified quantities, computed by truncated factorization of the full model
(latent variables included), and the harness comparing it with the identification engine.

Also recombines the results of two randomized studies into the natural-effect ingredient
``p(y; σ_X = x, σ_Z = d_{W,x*})``, either exactly or from simulated trials.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from regimecalc.identify.criteria import check_nde_defined
from regimecalc.identify.engine import identify_query
from regimecalc.identify.errors import NotDefined
from regimecalc.identify.formulas import DEFAULT_TOLERANCE
from regimecalc.identify.query import CausalQuery, EffectKind, IdentificationResult, Roles
from regimecalc.identify.search import DEFAULT_MAX_ADJUST_SIZE, candidates, subsets
from regimecalc.model.model import Model, intervention_distribution, oracle_intervene
from regimecalc.model.sampling import empirical_distribution, sample
from regimecalc.model.table import Table, contract
from regimecalc.regimes.natural import OracleSource, natural_regime
from regimecalc.regimes.types import AtomicRegime, MediatorRegime, NaturalRegimeSpec, RandomRegime

logger = logging.getLogger(__name__)


class OracleEffect(BaseModel, frozen=True):
    """True value of a query."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: float
    """Effect contrast, or the expected response for SEQ queries and non-atomic treatment regimes."""
    distribution: Table
    """Response distribution under the query's (first) plan."""
    w: Optional[Tuple[str, ...]] = None
    """Strata of the natural regime, for NDE and NIE queries."""


class OracleReport(BaseModel, frozen=True):
    """Deviations between the identified and the true values of a query."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    skipped: bool
    """Whether the query was not identified, so nothing was compared."""
    identified: IdentificationResult
    oracle: Optional[OracleEffect] = None
    distribution_deviation: Optional[float] = None
    effect_deviation: Optional[float] = None
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def within_tolerance(self) -> bool:
        if self.skipped:
            return True
        return self.distribution_deviation <= self.tolerance and self.effect_deviation <= self.tolerance

    def to_output(self) -> dict:
        return {
            "skipped": self.skipped,
            "identified": self.identified.to_output(),
            "oracle_value": None if self.oracle is None else self.oracle.value,
            "oracle_distribution": None if self.oracle is None else self.oracle.distribution.entries(),
            "distribution_deviation": self.distribution_deviation,
            "effect_deviation": self.effect_deviation,
            "within_tolerance": self.within_tolerance,
        }


def oracle_w(m: Model, query: CausalQuery, roles: Optional[Roles] = None) -> Tuple[str, ...]:
    """
    Strata of the natural regime: from ``roles``, the query or, failing both, the smallest set of
    (possibly latent) variables for which the regime is well posed.

    :raises NotDefined: If no such set exists.
    """
    for source in (roles, query.roles):
        if source is not None and source.w is not None:
            return tuple(source.w)
    if query.mediator_regime is not None and query.mediator_regime.w:
        return tuple(query.mediator_regime.w)
    treatment, mediator, response = query.treatment, query.mediator, query.response
    exclude = [treatment, mediator, response]
    for w in subsets(candidates(m.dag, exclude, observable=False), len(m.dag.names)):
        if check_nde_defined(m.dag, treatment, mediator, response, w):
            return w
    raise NotDefined(
        f"No W makes the natural regime on {mediator!r} well posed.",
        check_nde_defined(m.dag, treatment, mediator, response, ()).witness,
    )


def natural_effect_oracle(
    m: Model, treatment: str, mediator: str, response: str, x: int, baseline: int, w: Sequence[str]
) -> Table:
    """True ``p(y; σ_X = x, σ_Z = d_{W,baseline})``."""
    spec = NaturalRegimeSpec(w=tuple(w), baseline=baseline).bind(mediator, treatment)
    regime = natural_regime(spec, OracleSource(model=m))
    return intervention_distribution(m, {treatment: AtomicRegime(value=x), mediator: regime}, [response])


def _contrast(m: Model, response: str, plans: Sequence[Dict[str, MediatorRegime]]) -> Tuple[float, Table]:
    distributions = [intervention_distribution(m, plan, [response]) for plan in plans]
    numeric = m.variable(response).numeric
    means = [distribution.expectation(numeric) for distribution in distributions]
    value = means[0] - means[1] if len(means) == 2 else means[0]
    return value, distributions[0]


def oracle_effect(m: Model, query: CausalQuery, roles: Optional[Roles] = None) -> OracleEffect:
    """
    True value of any query kind.

    :param roles: Roles used by the engine; only ``W`` matters, for NDE and NIE queries.
    :raises NotDefined: For natural effects without a well-posed ``W``.
    """
    kind, treatment, response = query.kind, query.treatment, query.response
    if kind == EffectKind.SEQ:
        value, distribution = _contrast(m, response, [{step.target: step.regime for step in query.steps}])
        return OracleEffect(value=value, distribution=distribution)
    if kind == EffectKind.ACE:
        if query.treatment_regime is not None and not isinstance(query.treatment_regime, AtomicRegime):
            value, distribution = _contrast(m, response, [{treatment: query.treatment_regime}])
        else:
            plans = [{treatment: AtomicRegime(value=value)} for value in (query.x, query.x_star)]
            value, distribution = _contrast(m, response, plans)
        return OracleEffect(value=value, distribution=distribution)
    if kind in (EffectKind.CDE, EffectKind.SDE):
        regime = AtomicRegime(value=query.mediator_value) if kind == EffectKind.CDE else query.mediator_regime
        plans = [{treatment: AtomicRegime(value=value), query.mediator: regime} for value in (query.x, query.x_star)]
        value, distribution = _contrast(m, response, plans)
        return OracleEffect(value=value, distribution=distribution)

    w = oracle_w(m, query, roles)
    numeric = m.variable(response).numeric

    def mean(x: int, baseline: int) -> Tuple[float, Table]:
        distribution = natural_effect_oracle(m, treatment, query.mediator, response, x, baseline, w)
        return distribution.expectation(numeric), distribution

    direct, distribution = mean(query.x, query.x_star)
    if kind == EffectKind.NIE:
        value = mean(query.x, query.x)[0] - direct
    else:
        value = direct - mean(query.x_star, query.x_star)[0]
    return OracleEffect(value=value, distribution=distribution, w=w)


def compare_with_oracle(
    m: Model,
    query: CausalQuery,
    tol: float = DEFAULT_TOLERANCE,
    max_size: int = DEFAULT_MAX_ADJUST_SIZE,
) -> OracleReport:
    """
    Identify ``query`` from the observable distribution of ``m`` and compare the result with the truth.
    Queries that are not identified are reported as skipped.
    """
    identified = identify_query(m.observational_view(), query, max_size)
    if not identified.identified:
        return OracleReport(skipped=True, identified=identified, tolerance=tol)
    truth = oracle_effect(m, query, identified.roles)
    report = OracleReport(
        skipped=False,
        identified=identified,
        oracle=truth,
        distribution_deviation=identified.distribution.max_abs_difference(truth.distribution),
        effect_deviation=abs(identified.value - truth.value),
        tolerance=tol,
    )
    if not report.within_tolerance:
        logger.warning(
            f"Identified {query.kind.value} deviates from the oracle: distribution by "
            f"{report.distribution_deviation:.3g}, effect by {report.effect_deviation:.3g}"
        )
    return report


def _stack_over(tables: Sequence[Table], name: str, position: int) -> Table:
    scope = list(tables[0].scope)
    scope.insert(position, name)
    return Table(scope=tuple(scope), values=np.stack([table.values for table in tables], axis=position))


def randomized_study_tables(
    m: Model, treatment: str, mediator: str, response: str, w: Sequence[str], x: int, x_star: int
) -> Tuple[Table, Table, Table]:
    """
    Exact results of the two randomized studies:

    - ``p(y | w; σ_X = x, σ_Z = z)`` for every ``z``, over ``W + (Z, Y)``;
    - ``p(z | w; σ_X = x*)`` over ``W + (Z,)``;
    - ``p(w)``.
    """
    w = tuple(w)
    per_mediator = [
        oracle_intervene(m, {treatment: AtomicRegime(value=x), mediator: AtomicRegime(value=z)}).joint.conditional(
            [response], w
        )
        for z in range(m.cards[mediator])
    ]
    py_wz = _stack_over(per_mediator, mediator, len(w))
    pz_w = oracle_intervene(m, {treatment: AtomicRegime(value=x_star)}).joint.conditional([mediator], w)
    return py_wz, pz_w, m.joint.marginalize(w)


def _uniform(card: int) -> RandomRegime:
    return RandomRegime(table=((1.0 / card,) * card,))


def estimate_randomized_studies(
    m: Model,
    treatment: str,
    mediator: str,
    response: str,
    w: Sequence[str],
    x: int,
    x_star: int,
    n: int,
    seed: int,
) -> Tuple[Table, Table, Table]:
    """
    Simulate the two randomized studies with ``n`` participants each and estimate their tables:
    one randomizes treatment and mediator and records ``W`` and the response,
    the other randomizes the treatment and records ``W`` and the mediator.
    """
    w = tuple(w)
    cards = m.cards
    both = oracle_intervene(m, {treatment: _uniform(cards[treatment]), mediator: _uniform(cards[mediator])})
    first = empirical_distribution(sample(both, n, seed), [*w, mediator, treatment, response], cards)
    py_wz = first.conditional([response], [*w, mediator, treatment]).reduce({treatment: x})
    only_treatment = oracle_intervene(m, {treatment: _uniform(cards[treatment])})
    second = empirical_distribution(sample(only_treatment, n, seed + 1), [*w, treatment, mediator], cards)
    pz_w = second.conditional([mediator], [*w, treatment]).reduce({treatment: x_star})
    logger.debug(f"Simulated two randomized studies of {n} participants each")
    return py_wz, pz_w, second.marginalize(w)


def experimental_identify(py_wz: Table, pz_w: Table, pw: Table) -> Table:
    """
    ``Σ_{z,w} p(y | w; σ_X = x, σ_Z = z) p(z | w; σ_X = x*) p(w)``.

    :raises ValueError: If the scopes or cardinalities of the three tables do not fit together.
    """
    w = pw.scope
    if len(pz_w.scope) != len(w) + 1 or len(py_wz.scope) != len(w) + 2:
        raise ValueError(f"Tables over {py_wz.scope}, {pz_w.scope} and {w} do not fit together.")
    mediator, response = pz_w.scope[-1], py_wz.scope[-1]
    if py_wz.scope != (*w, mediator, response) or pz_w.scope != (*w, mediator):
        raise ValueError(
            f"Expected tables over {(*w, mediator, response)} and {(*w, mediator)}, "
            f"got {py_wz.scope} and {pz_w.scope}."
        )
    return contract([py_wz, pz_w, pw], [response])
