"""
Model
-----
The full data-generating system: a :py:class:`~regimecalc.graph.dag.Dag` over chance variables
plus one :py:class:`Cpt` per variable.

A :py:class:`Model` knows everything, latent variables included, and is what the intervention oracle
(:py:func:`oracle_intervene`) works on. The identification layer never receives a model;
it receives the :py:class:`ObservationalView` returned by :py:meth:`Model.observational_view`,
which only carries the joint distribution of the observable variables.
"""

from __future__ import annotations

import logging
from functools import cached_property
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import AliasChoices, BaseModel, ConfigDict, Field, field_validator, model_validator

from regimecalc.graph.dag import Dag, DagNode
from regimecalc.model.table import NORMALIZATION_TOLERANCE, POSITIVITY_THRESHOLD, PositivityViolation, Table, contract

if TYPE_CHECKING:
    from regimecalc.regimes.types import Regime

logger = logging.getLogger(__name__)


class LatentVariableError(ValueError):
    """Raised when an operation needs data or CPTs of a variable that is not observed."""


class Variable(BaseModel, frozen=True, extra="forbid"):
    """
    A discrete variable with values coded ``0..card-1``.
    """

    name: str
    """Node name of the variable."""
    card: int = Field(validation_alias=AliasChoices("card", "cardinality"))
    """Number of values."""
    latent: bool = False
    """Whether the variable is unobserved."""
    values: Optional[Tuple[float, ...]] = None
    """
    Numeric value of every code, used by expectations.
    If not set, code ``k`` has numeric value ``k``.
    """
    labels: Optional[Tuple[str, ...]] = None
    """Human-readable label of every code."""

    @field_validator("card")
    @classmethod
    def validate_card(cls, card: int) -> int:
        if card < 2:
            raise ValueError(f"Cardinality must be at least 2, got {card}.")
        return card

    @model_validator(mode="after")
    def check_codes(self):
        if self.values is not None and len(self.values) != self.card:
            raise ValueError(f"Variable {self.name!r} needs {self.card} numeric values, got {len(self.values)}.")
        if self.labels is not None:
            if len(self.labels) != self.card:
                raise ValueError(f"Variable {self.name!r} needs {self.card} labels, got {len(self.labels)}.")
            if len(set(self.labels)) != len(self.labels):
                raise ValueError(f"Labels of {self.name!r} must be distinct.")
        return self

    @property
    def numeric(self) -> np.ndarray:
        """Numeric value of every code."""
        return np.arange(self.card, dtype=float) if self.values is None else np.asarray(self.values, dtype=float)


class Cpt(BaseModel, frozen=True):
    """
    Conditional probability table ``p(target | parents)``.

    :py:attr:`table` has one axis per parent (in :py:attr:`parents` order) followed by the target axis.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    target: str
    """Variable this table is the distribution of."""
    parents: Tuple[str, ...] = ()
    """Ordered conditioning variables."""
    table: np.ndarray
    """Probabilities; every slice along the last axis sums to 1."""

    @field_validator("table", mode="before")
    @classmethod
    def validate_table(cls, table):
        array = np.array(table, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_rows(self):
        if self.target in self.parents:
            raise ValueError(f"Cpt of {self.target!r} cannot list it as a parent.")
        if len(set(self.parents)) != len(self.parents):
            raise ValueError(f"Repeated parent in {self.parents}.")
        if self.table.ndim != len(self.parents) + 1:
            raise ValueError(
                f"Cpt of {self.target!r} must have {len(self.parents) + 1} axes, got {self.table.ndim}."
            )
        if np.isnan(self.table).any() or np.any(self.table < 0):
            raise ValueError(f"Cpt of {self.target!r} has negative or undefined entries.")
        deviation = np.max(np.abs(self.table.sum(axis=-1) - 1.0))
        if deviation > NORMALIZATION_TOLERANCE:
            raise ValueError(f"Rows of the Cpt of {self.target!r} do not sum to 1 (deviation {deviation:.3g}).")
        return self

    @classmethod
    def from_rows(cls, target: str, parents: Sequence[str], rows, cards: Mapping[str, int]) -> Cpt:
        """
        Build a Cpt from a list of rows (one per parent assignment, last parent varying fastest).
        A parentless Cpt may be given as a single flat row.
        """
        parents = tuple(parents)
        shape = tuple(cards[name] for name in parents) + (cards[target],)
        array = np.asarray(rows, dtype=float)
        if array.size != int(np.prod(shape)):
            raise ValueError(f"Cpt of {target!r} needs {int(np.prod(shape))} entries, got {array.size}.")
        return cls(target=target, parents=parents, table=array.reshape(shape))

    def rows(self) -> List[List[float]]:
        """Rows of the table, one per parent assignment, last parent varying fastest."""
        return [[float(value) for value in row] for row in self.table.reshape(-1, self.table.shape[-1])]

    def as_table(self) -> Table:
        return Table(scope=(*self.parents, self.target), values=self.table)

    @property
    def cards(self) -> Dict[str, int]:
        return dict(zip((*self.parents, self.target), self.table.shape))


class Model(BaseModel, frozen=True):
    """
    A discrete Bayesian network: a graph over chance variables and one CPT per variable,
    whose parent list equals the variable's graph parents.
    """

    dag: Dag
    """Graph over the chance variables; latent flags mirror :py:attr:`variables`."""
    variables: Tuple[Variable, ...]
    """Variables in graph order."""
    cpts: Dict[str, Cpt]
    """CPT of every variable, keyed by variable name."""

    @model_validator(mode="after")
    def check_consistency(self):
        if self.dag.regime_nodes:
            raise ValueError(f"Model graphs hold chance variables only, got {self.dag.regime_nodes}.")
        names = [variable.name for variable in self.variables]
        if names != self.dag.names:
            raise ValueError(f"Variables {names} do not match graph nodes {self.dag.names}.")
        for variable in self.variables:
            if variable.latent != self.dag.is_latent(variable.name):
                raise ValueError(f"Latent flag of {variable.name!r} differs between variable and graph.")
        if set(self.cpts) != set(names):
            raise ValueError(
                f"Every variable needs exactly one Cpt; missing {sorted(set(names) - set(self.cpts))}, "
                f"unexpected {sorted(set(self.cpts) - set(names))}."
            )
        cards = {variable.name: variable.card for variable in self.variables}
        for name, cpt in self.cpts.items():
            if cpt.target != name:
                raise ValueError(f"Cpt stored under {name!r} is the Cpt of {cpt.target!r}.")
            if sorted(cpt.parents) != self.dag.parents(name):
                raise ValueError(f"Cpt parents {list(cpt.parents)} of {name!r} differ from graph parents.")
            for variable, card in cpt.cards.items():
                if cards[variable] != card:
                    raise ValueError(f"Cpt of {name!r} has {card} values for {variable!r}, expected {cards[variable]}.")
        return self

    @classmethod
    def build(
        cls, variables: Iterable[Variable], edges: Iterable[Tuple[str, str]], cpts: Iterable[Cpt]
    ) -> Model:
        """Build a model, deriving the graph from ``variables`` and ``edges``."""
        variables = tuple(variables)
        dag = Dag(
            nodes=tuple(DagNode(name=variable.name, latent=variable.latent) for variable in variables),
            edges=tuple(tuple(edge) for edge in edges),
        )
        return cls(dag=dag, variables=variables, cpts={cpt.target: cpt for cpt in cpts})

    @cached_property
    def cards(self) -> Dict[str, int]:
        return {variable.name: variable.card for variable in self.variables}

    def variable(self, name: str) -> Variable:
        for variable in self.variables:
            if variable.name == name:
                return variable
        self.dag.node(name)
        raise KeyError(name)

    @cached_property
    def joint(self) -> Table:
        """Joint distribution of all variables, in graph order."""
        return Table(
            scope=tuple(self.dag.names),
            values=contract([cpt.as_table() for cpt in self.cpts.values()], self.dag.names).values,
            normalized=True,
        )

    def observational_view(self) -> ObservationalView:
        """Return what an analyst observing the system can see: the graph and the observable joint."""
        observable = self.dag.observable_nodes
        return ObservationalView(
            dag=self.dag,
            variables=tuple(variable for variable in self.variables if not variable.latent),
            joint=self.joint.marginalize(observable),
        )


class ObservationalView(BaseModel, frozen=True):
    """
    Observable part of a :py:class:`Model`: the graph with its latent flags
    and the joint distribution of the observable variables only.
    """

    dag: Dag
    """Full graph, latent variables flagged."""
    variables: Tuple[Variable, ...]
    """Observable variables."""
    joint: Table
    """Joint distribution over :py:attr:`variables`."""

    @model_validator(mode="after")
    def check_scope(self):
        names = [variable.name for variable in self.variables]
        if list(self.joint.scope) != names or names != self.dag.observable_nodes:
            raise ValueError(f"Observable joint over {self.joint.scope} does not match variables {names}.")
        return self

    @cached_property
    def cards(self) -> Dict[str, int]:
        return {variable.name: variable.card for variable in self.variables}

    def variable(self, name: str) -> Variable:
        for variable in self.variables:
            if variable.name == name:
                return variable
        if name in self.dag:
            raise LatentVariableError(f"{name!r} is latent and cannot be observed.")
        self.dag.node(name)
        raise KeyError(name)

    def check_observable(self, names: Iterable[str]) -> None:
        """
        :raises LatentVariableError: If any of ``names`` is latent.
        """
        self.dag.check_nodes(names)
        latent = sorted(name for name in names if self.dag.is_latent(name))
        if latent:
            raise LatentVariableError(f"Latent variable(s) {latent} cannot be used observationally.")

    def marginal(self, names: Sequence[str]) -> Table:
        self.check_observable(names)
        return self.joint.marginalize(names)

    def factor(self, target: Sequence[str], given: Sequence[str] = ()) -> Table:
        """
        The observational conditional ``p(target | given)`` as a table over ``given + target``,
        ``NaN`` where the conditioning event has zero probability.
        """
        self.check_observable([*target, *given])
        return self.joint.conditional(target, given)


def joint_prob(m: Model, assignment: Mapping[str, int]) -> float:
    """
    Probability of a full assignment: the product of the CPT entries.

    :raises ValueError: If a variable is missing or a value is out of range.
    """
    missing = sorted(set(m.dag.names) - set(assignment))
    if missing:
        raise ValueError(f"Assignment misses {missing}.")
    probability = 1.0
    for variable in m.variables:
        value = int(assignment[variable.name])
        if not 0 <= value < variable.card:
            raise ValueError(f"Value {value} out of range for {variable.name!r}.")
        cpt = m.cpts[variable.name]
        probability *= float(cpt.table[tuple(int(assignment[name]) for name in cpt.parents) + (value,)])
    return probability


def marginal(m: Model, names: Sequence[str]) -> Table:
    """Exact marginal over ``names`` (latent variables summed out)."""
    m.dag.check_nodes(names)
    return m.joint.marginalize(names)


def conditional(m: Model, target: Sequence[str], given: Mapping[str, int]) -> Table:
    """
    ``p(target | given)`` as a normalized table over ``target``.

    :raises PositivityViolation: If ``p(given)`` is below :py:data:`~regimecalc.model.table.POSITIVITY_THRESHOLD`.
    """
    target = [name for name in target if name not in given]
    m.dag.check_nodes([*target, *given])
    sliced = m.joint.marginalize([*given, *target]).reduce(given)
    if sliced.total() < POSITIVITY_THRESHOLD:
        raise PositivityViolation(f"p({dict(given)}) is zero; cannot condition on it.", tuple(given), given)
    return sliced.normalize()


def expectation(t: Table, numeric: Optional[Sequence[float]] = None) -> float:
    """``Σ_y y·t(y)`` for a normalized table over a single variable."""
    return t.expectation(numeric)


def oracle_intervene(m: Model, plan: Mapping[str, Regime]) -> Model:
    """
    Truncated factorization: replace the CPT of every target of ``plan`` by its regime CPT
    and rewire the target's parents accordingly. Untouched CPTs are shared.

    :raises RegimeError: If a regime is inconsistent with its target or conditions on unavailable variables.
    """
    from regimecalc.regimes.types import RegimeError, regime_cpt

    cpts = dict(m.cpts)
    edges = list(m.dag.edges)
    for target, regime in plan.items():
        if target not in m.dag:
            raise RegimeError(f"Regime target {target!r} is not a variable of the model.")
        cpt = regime_cpt(regime, m.variable(target), m.cpts[target], m.cards)
        if cpt is m.cpts[target]:
            continue
        unknown = sorted(set(cpt.parents) - set(m.dag.names))
        if unknown:
            raise RegimeError(f"Regime on {target!r} conditions on unknown variable(s) {unknown}.")
        cpts[target] = cpt
        edges = [edge for edge in edges if edge[1] != target] + [(parent, target) for parent in cpt.parents]
    try:
        dag = Dag(nodes=m.dag.nodes, edges=tuple(edges))
    except ValueError as error:
        raise RegimeError(f"Intervention plan creates an invalid graph: {error}") from error
    logger.debug(f"Intervened on {sorted(plan)}")
    return Model(dag=dag, variables=m.variables, cpts=cpts)


def intervention_distribution(m: Model, plan: Mapping[str, Regime], response: Sequence[str]) -> Table:
    """Oracle ``p(response; plan)``."""
    return marginal(oracle_intervene(m, plan), response)

