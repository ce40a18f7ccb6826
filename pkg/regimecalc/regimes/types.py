"""
Regime types
------------
The strategies a regime indicator ``sigma_X`` can take:

- :py:class:`IdleRegime` -- no intervention, ``X`` arises from its observational mechanism;
- :py:class:`AtomicRegime` -- ``X`` is set to a fixed value;
- :py:class:`ConditionalRegime` -- ``X`` is set by a known function of other variables;
- :py:class:`RandomRegime` -- ``X`` is drawn from a known distribution given other variables.

:py:class:`NaturalRegimeSpec` describes the derived regime in which a mediator is drawn from its
own distribution under a baseline treatment; it is materialized into a :py:class:`RandomRegime`
by :py:func:`~regimecalc.regimes.natural.natural_regime`.

Every regime is a ``pydantic`` model; the :py:data:`Regime` union is discriminated by the ``type`` key,
which makes the JSON fragments of query files parse directly.
"""

from __future__ import annotations

import itertools
import logging
from enum import Enum, unique
from typing import Callable, Dict, Literal, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import AliasChoices, BaseModel, Field, field_validator, model_validator
from typing_extensions import Annotated

from regimecalc.model.model import Cpt, Variable
from regimecalc.model.table import NORMALIZATION_TOLERANCE

logger = logging.getLogger(__name__)


class RegimeError(ValueError):
    """Raised when a regime is inconsistent with its target or with the graph."""


@unique
class RegimeType(str, Enum):
    IDLE = "idle"
    ATOMIC = "atomic"
    CONDITIONAL = "conditional"
    RANDOM = "random"
    NATURAL = "natural"


class IdleRegime(BaseModel, frozen=True, extra="forbid"):
    """No intervention: the observational mechanism stays in place."""

    type: Literal["idle"] = "idle"

    @property
    def cond_set(self) -> Optional[Tuple[str, ...]]:
        """``None``: the target keeps its observational parents."""
        return None


class AtomicRegime(BaseModel, frozen=True, extra="forbid"):
    """Set the target to :py:attr:`value` regardless of everything else."""

    type: Literal["atomic"] = "atomic"
    value: int
    """Value code the target is set to."""

    @field_validator("value")
    @classmethod
    def validate_value(cls, value: int) -> int:
        if value < 0:
            raise ValueError(f"Atomic value must be a nonnegative code, got {value}.")
        return value

    @property
    def cond_set(self) -> Tuple[str, ...]:
        return ()


class ConditionalRegime(BaseModel, frozen=True, extra="forbid", populate_by_name=True):
    """
    Set the target to ``a(cond_set)`` for a known decision function ``a``.
    """

    type: Literal["conditional"] = "conditional"
    cond_set: Tuple[str, ...] = Field(
        default=(), validation_alias=AliasChoices("cond_set", "given"), serialization_alias="given"
    )
    """Ordered variables the decision depends on."""
    decision: Tuple[Tuple[int, ...], ...] = Field(
        validation_alias=AliasChoices("decision", "map"), serialization_alias="map"
    )
    """
    Rows ``(c_1, ..., c_k, x)``: the target value ``x`` chosen when the conditioning variables
    take values ``c_1..c_k``. Must cover every assignment of :py:attr:`cond_set`.
    """

    @model_validator(mode="after")
    def check_rows(self):
        if len(set(self.cond_set)) != len(self.cond_set):
            raise ValueError(f"Repeated variable in conditioning set {self.cond_set}.")
        keys = set()
        for row in self.decision:
            if len(row) != len(self.cond_set) + 1:
                raise ValueError(f"Decision row {row} must have {len(self.cond_set) + 1} entries.")
            if any(value < 0 for value in row):
                raise ValueError(f"Decision row {row} has a negative code.")
            if row[:-1] in keys:
                raise ValueError(f"Decision is given twice for {row[:-1]}.")
            keys.add(row[:-1])
        return self

    @classmethod
    def from_function(
        cls, cond_set: Tuple[str, ...], cards: Mapping[str, int], function: Callable[..., int]
    ) -> ConditionalRegime:
        """Tabulate ``function`` (called with one code per conditioning variable) over every assignment."""
        rows = []
        for assignment in itertools.product(*(range(cards[name]) for name in cond_set)):
            rows.append((*assignment, int(function(*assignment))))
        return cls(cond_set=tuple(cond_set), decision=tuple(rows))

    def decide(self, assignment: Tuple[int, ...]) -> int:
        for row in self.decision:
            if tuple(row[:-1]) == tuple(assignment):
                return row[-1]
        raise RegimeError(f"No decision for {dict(zip(self.cond_set, assignment))}.")


class RandomRegime(BaseModel, frozen=True, extra="forbid", populate_by_name=True):
    """
    Draw the target from the known distribution ``p~(target | cond_set)``.
    """

    type: Literal["random"] = "random"
    cond_set: Tuple[str, ...] = Field(
        default=(), validation_alias=AliasChoices("cond_set", "given"), serialization_alias="given"
    )
    """Ordered variables the distribution depends on."""
    table: Tuple[Tuple[float, ...], ...]
    """
    One row per assignment of :py:attr:`cond_set` (last variable varying fastest),
    each row a distribution over the target values. An unconditional regime may be given as a flat list.
    """

    @field_validator("table", mode="before")
    @classmethod
    def validate_table(cls, table):
        table = [list(row) if isinstance(row, (list, tuple, np.ndarray)) else row for row in table]
        if table and not isinstance(table[0], list):
            table = [table]
        return table

    @model_validator(mode="after")
    def check_rows(self):
        if len(set(self.cond_set)) != len(self.cond_set):
            raise ValueError(f"Repeated variable in conditioning set {self.cond_set}.")
        if not self.table or len({len(row) for row in self.table}) != 1:
            raise ValueError("Random regime rows must be nonempty and of equal length.")
        for row in self.table:
            if any(value < 0 for value in row) or abs(sum(row) - 1.0) > NORMALIZATION_TOLERANCE:
                raise ValueError(f"Random regime row {row} is not a distribution.")
        return self

    @classmethod
    def from_cpt(cls, cpt: Cpt) -> RandomRegime:
        return cls(cond_set=cpt.parents, table=tuple(tuple(row) for row in cpt.rows()))


class NaturalRegimeSpec(BaseModel, frozen=True, extra="forbid", populate_by_name=True):
    """
    The natural regime ``d_{W,x*}`` of a mediator: draw it from ``p(target | W; sigma_treatment = x*)``.

    :py:attr:`target` and :py:attr:`treatment` may be left unset in query files;
    the query binds them to its mediator and treatment.
    """

    type: Literal["natural"] = "natural"
    target: Optional[str] = None
    """Mediator the regime is applied to."""
    treatment: Optional[str] = None
    """Treatment whose baseline value defines the regime."""
    w: Tuple[str, ...] = Field(
        default=(), validation_alias=AliasChoices("W", "w", "cond_set"), serialization_alias="W"
    )
    """Conditioning set ``W`` of the mediator distribution."""
    baseline: Optional[int] = Field(default=None, validation_alias=AliasChoices("baseline", "x_star"))
    """Baseline treatment value ``x*``."""

    def bind(self, target: str, treatment: str, baseline: Optional[int] = None) -> NaturalRegimeSpec:
        """Fill in unset fields."""
        return self.model_copy(
            update={
                "target": self.target or target,
                "treatment": self.treatment or treatment,
                "baseline": self.baseline if self.baseline is not None else baseline,
            }
        )

    @property
    def cond_set(self) -> Tuple[str, ...]:
        return self.w


Regime = Annotated[
    Union[IdleRegime, AtomicRegime, ConditionalRegime, RandomRegime],
    Field(discriminator="type"),
]
"""A concrete regime; each defines a CPT for its target."""

MediatorRegime = Annotated[
    Union[IdleRegime, AtomicRegime, ConditionalRegime, RandomRegime, NaturalRegimeSpec],
    Field(discriminator="type"),
]
"""A regime as it may appear in a query file, including the natural regime."""


def regime_cpt(
    r: MediatorRegime, target: Variable, observational: Optional[Cpt], cards: Mapping[str, int]
) -> Cpt:
    """
    The CPT a regime defines for ``target``:

    - idle: ``observational``, unchanged;
    - atomic ``x*``: parentless point mass ``δ(x, x*)``;
    - conditional ``a``: ``δ(x, a(cond_set))`` over the conditioning set;
    - random: the supplied distribution.

    :raises RegimeError: If the regime does not fit the target or its conditioning variables.
    """
    if isinstance(r, IdleRegime):
        if observational is None:
            raise RegimeError(f"Idle regime on {target.name!r} needs the observational Cpt.")
        return observational
    if isinstance(r, AtomicRegime):
        if r.value >= target.card:
            raise RegimeError(f"Atomic value {r.value} out of range for {target.name!r} (cardinality {target.card}).")
        table = np.zeros(target.card)
        table[r.value] = 1.0
        return Cpt(target=target.name, table=table)
    if isinstance(r, NaturalRegimeSpec):
        raise RegimeError(f"Natural regime on {target.name!r} must be materialized before use.")

    if target.name in r.cond_set:
        raise RegimeError(f"Regime on {target.name!r} cannot condition on its own target.")
    unknown = [name for name in r.cond_set if name not in cards]
    if unknown:
        raise RegimeError(f"Regime on {target.name!r} conditions on unknown variable(s) {unknown}.")
    sizes: Dict[str, int] = {**cards, target.name: target.card}

    if isinstance(r, ConditionalRegime):
        table = np.zeros(tuple(sizes[name] for name in r.cond_set) + (target.card,))
        covered = np.zeros(table.shape[:-1], dtype=bool)
        for row in r.decision:
            key, value = tuple(row[:-1]), row[-1]
            if any(code >= sizes[name] for code, name in zip(key, r.cond_set)) or value >= target.card:
                raise RegimeError(f"Decision row {row} of the regime on {target.name!r} is out of range.")
            table[key + (value,)] = 1.0
            covered[key] = True
        if not covered.all():
            missing = tuple(int(code) for code in np.argwhere(~covered)[0])
            raise RegimeError(
                f"Decision for {target.name!r} is not total: no value for {dict(zip(r.cond_set, missing))}."
            )
        return Cpt(target=target.name, parents=r.cond_set, table=table)

    try:
        return Cpt.from_rows(target.name, r.cond_set, r.table, sizes)
    except ValueError as error:
        raise RegimeError(f"Random regime does not fit {target.name!r}: {error}") from error
