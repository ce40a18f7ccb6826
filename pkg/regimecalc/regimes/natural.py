"""
Natural regime
--------------
Materialization of the natural regime ``d_{W,x*}``: the mediator is drawn from
``p(z | w; sigma_X = x*)``, its distribution within strata of ``W`` when the treatment is set to the baseline.

Two sources are supported:

- :py:class:`OracleSource` computes the distribution by intervening in the full model (latent ``W`` allowed);
- :py:class:`ObservationalSource` computes it as ``Σ_s p(z|w,s,x*) p(s|w)`` from observable quantities,
  which is valid when ``S`` blocks every back-door path from the treatment to the mediator within strata of ``W``.
"""

import logging
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel

from regimecalc.graph.dag import Dag, descendants_of_set
from regimecalc.model.model import Model, ObservationalView, oracle_intervene
from regimecalc.model.table import POSITIVITY_THRESHOLD, Table, contract
from regimecalc.regimes.types import AtomicRegime, NaturalRegimeSpec, RandomRegime, RegimeError

logger = logging.getLogger(__name__)


class OracleSource(BaseModel, frozen=True):
    """Ground truth: the full model, latent variables included."""

    model: Model


class ObservationalSource(BaseModel, frozen=True):
    """The observable distribution plus a back-door set ``S`` for the treatment-mediator effect."""

    view: ObservationalView
    s: Tuple[str, ...] = ()
    """Covariates adjusted for within strata of ``W``."""


def check_natural_spec(g: Dag, spec: NaturalRegimeSpec) -> NaturalRegimeSpec:
    """
    Validate a bound spec against ``g``: ``W`` must avoid the treatment, the mediator and their descendants.

    :raises RegimeError: If the natural regime is unbound or ``W`` is invalid.
    """
    if spec.target is None or spec.treatment is None or spec.baseline is None:
        raise RegimeError("Natural regime needs a target, a treatment and a baseline value.")
    g.check_nodes([spec.target, spec.treatment, *spec.w])
    forbidden = descendants_of_set(g, [spec.treatment, spec.target], include_self=True)
    clash = sorted(set(spec.w) & forbidden)
    if clash:
        raise RegimeError(
            f"W cannot contain the treatment, the mediator or their descendants; offending: {clash}."
        )
    return spec


def _to_regime(spec: NaturalRegimeSpec, table: Table) -> RandomRegime:
    """Turn a table over ``W + (Z,)`` into a random regime; impossible strata get uniform rows."""
    values = np.array(table.values, dtype=float)
    rows = values.reshape(-1, values.shape[-1])
    undefined = np.isnan(rows).any(axis=-1)
    if undefined.any():
        logger.debug(f"{int(undefined.sum())} impossible stratum(s) of {list(spec.w)} get uniform mediator rows")
        rows[undefined] = 1.0 / rows.shape[-1]
    return RandomRegime(cond_set=spec.w, table=tuple(tuple(float(p) for p in row) for row in rows))


def oracle_mediator_table(m: Model, spec: NaturalRegimeSpec) -> Table:
    """``p(z | w; sigma_X = x*)`` over ``W + (Z,)`` from the full model; ``NaN`` rows where ``p(w) = 0``."""
    spec = check_natural_spec(m.dag, spec)
    intervened = oracle_intervene(m, {spec.treatment: AtomicRegime(value=spec.baseline)})
    return intervened.joint.conditional([spec.target], spec.w)


def observational_mediator_table(view: ObservationalView, spec: NaturalRegimeSpec, s: Tuple[str, ...]) -> Table:
    """
    ``Σ_s p(z|w,s,x*) p(s|w)`` over ``W + (Z,)``, ``NaN`` rows where ``p(w) = 0``.

    :raises PositivityViolation: If ``p(w, s, x*) = 0`` for a stratum with ``p(w, s) > 0``.
    """
    spec = check_natural_spec(view.dag, spec)
    s = tuple(name for name in s if name not in spec.w)
    view.check_observable([*spec.w, *s, spec.treatment, spec.target])
    mediator = view.factor([spec.target], [*spec.w, *s, spec.treatment]).reduce({spec.treatment: spec.baseline})
    strata = view.marginal([*spec.w, *s])
    numerator = contract([mediator, strata], [*spec.w, spec.target])
    weight = view.marginal(list(spec.w)).values if spec.w else np.asarray(1.0)
    weight = weight[..., None]
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(weight < POSITIVITY_THRESHOLD, np.nan, numerator.values / weight)
    return Table(scope=(*spec.w, spec.target), values=values)


def natural_regime(spec: NaturalRegimeSpec, source: Union[OracleSource, ObservationalSource]) -> RandomRegime:
    """
    Materialize ``d_{W,x*}`` as a :py:class:`~regimecalc.regimes.types.RandomRegime` over ``W``.

    :raises NotIdentified: If an observational source's ``S`` does not block the treatment-mediator back door.
    :raises PositivityViolation: If a needed conditioning event has zero probability.
    """
    if isinstance(source, OracleSource):
        return _to_regime(spec, oracle_mediator_table(source.model, spec))

    from regimecalc.identify.criteria import check_zx_backdoor
    from regimecalc.identify.errors import NotIdentified

    spec = check_natural_spec(source.view.dag, spec)
    result = check_zx_backdoor(source.view.dag, spec.treatment, spec.target, spec.w, source.s)
    if not result.passed:
        raise NotIdentified(
            f"S={list(source.s)} does not identify the mediator distribution within strata of W={list(spec.w)}.",
            result.witness,
        )
    return _to_regime(spec, observational_mediator_table(source.view, spec, source.s))
