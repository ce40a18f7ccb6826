"""
Query
-----
Requests and answers of the identification layer.

A :py:class:`CausalQuery` names the effect, the variables playing treatment, mediator and response,
the treatment values and (optionally) the covariate roles; role sets left unset are searched for.
An :py:class:`IdentificationResult` carries either the identified distribution, effect value and
symbolic formula, or a :py:class:`Witness` of the condition that failed.
"""

from __future__ import annotations

import logging
from enum import Enum, unique
from typing import List, Optional, Tuple

from pydantic import (
    AliasChoices,
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    model_validator,
)

from regimecalc.graph.dag import Dag
from regimecalc.graph.separation import is_open_path
from regimecalc.model.table import Table
from regimecalc.regimes.types import (
    AtomicRegime,
    ConditionalRegime,
    MediatorRegime,
    NaturalRegimeSpec,
    RandomRegime,
    Regime,
)

logger = logging.getLogger(__name__)


@unique
class EffectKind(str, Enum):
    """
    Kind of a :py:class:`CausalQuery`:

    - ACE: average causal effect of the treatment (or its distribution under a random regime);
    - CDE: direct effect with the mediator set to a fixed value;
    - SDE: direct effect with the mediator drawn from a known distribution;
    - NDE / NIE: natural direct and indirect effects;
    - SEQ: distribution of the response under a sequence of interventions.
    """

    ACE = "ace"
    CDE = "cde"
    SDE = "sde"
    NDE = "nde"
    NIE = "nie"
    SEQ = "seq"


@unique
class Condition(str, Enum):
    """Names of the graphical conditions the engine checks."""

    BACK_DOOR = "back_door"
    """Adjustment set contains no descendant of the treatment and blocks every back-door path."""
    SIMPLE_STABILITY = "simple_stability"
    """Covariates and response independent of all regime indicators given the observed past."""
    WEAK_STABILITY = "weak_stability"
    """Response independent of each regime indicator given the past, later interventions applied."""
    MEDIATOR_REGIME = "mediator_regime"
    """Mediator independent of the treatment indicator under the mediator regime."""
    NDE_DEFINED = "nde_defined"
    """``W`` avoids the descendants of treatment and mediator and blocks mediator-response back doors."""
    ROLES_NON_DESCENDANT = "roles_non_descendant"
    """``W``, ``S`` and ``L1`` are non-descendants of treatment and mediator."""
    L2_NON_DESCENDANT = "l2_non_descendant"
    """``L2`` is not a descendant of the mediator."""
    RESPONSE_TREATMENT_STABILITY = "response_treatment_stability"
    """Response independent of the treatment indicator given ``X, W, L1`` under the natural mediator regime."""
    RESPONSE_MEDIATOR_STABILITY = "response_mediator_stability"
    """Response independent of the mediator indicator given ``X, Z, L1, L2``."""
    MEDIATOR_BACK_DOOR = "mediator_back_door"
    """Mediator independent of the treatment indicator given ``X, W, S``."""
    OBSERVABLE_ROLES = "observable_roles"
    """Every member of a role set given by the caller is observed."""


@unique
class Verdict(str, Enum):
    IDENTIFIED = "identified"
    NOT_IDENTIFIED = "not_identified"
    NOT_DEFINED = "not_defined"


GRAPHICAL_NECESSARY = "graphical-necessary"
"""
Label of results that rest on the weak stability condition, of which only the graphical part is checked.
"""


class Roles(BaseModel, frozen=True, extra="forbid", populate_by_name=True):
    """
    Covariate role sets of a query. ``None`` means "search for a suitable set".
    """

    c: Optional[Tuple[str, ...]] = Field(default=None, validation_alias=AliasChoices("C", "c"), serialization_alias="C")
    """Back-door adjustment set."""
    w: Optional[Tuple[str, ...]] = Field(default=None, validation_alias=AliasChoices("W", "w"), serialization_alias="W")
    """Strata of the mediator regime."""
    s: Optional[Tuple[str, ...]] = Field(default=None, validation_alias=AliasChoices("S", "s"), serialization_alias="S")
    """Back-door set for the treatment-mediator effect."""
    l1: Optional[Tuple[str, ...]] = Field(
        default=None, validation_alias=AliasChoices("L1", "l1"), serialization_alias="L1"
    )
    """Covariates observed before the treatment."""
    l2: Optional[Tuple[str, ...]] = Field(
        default=None, validation_alias=AliasChoices("L2", "l2"), serialization_alias="L2"
    )
    """Covariates observed between treatment and mediator."""

    def as_dict(self) -> dict:
        return {key: list(value) for key, value in self.model_dump(by_alias=True).items() if value is not None}


class SequentialStep(BaseModel, frozen=True, extra="forbid"):
    """One intervention of a sequential plan."""

    target: str
    """Variable intervened in."""
    regime: Regime
    """Regime applied to :py:attr:`target`."""
    block: Optional[Tuple[str, ...]] = None
    """
    Covariates observed after the previous intervention and before this one.
    ``None`` lets the engine search for the blocks.
    """


class CausalQuery(BaseModel, frozen=True, extra="forbid", populate_by_name=True):
    """
    An effect request.
    """

    kind: EffectKind
    """Which effect is requested."""
    treatment: Optional[str] = None
    """Treatment ``X``; required unless :py:attr:`kind` is SEQ."""
    response: str
    """Response ``Y``."""
    mediator: Optional[str] = None
    """Mediator ``Z``; required for CDE, SDE, NDE and NIE."""
    x: Optional[int] = None
    """Treatment value."""
    x_star: Optional[int] = Field(default=None, validation_alias=AliasChoices("x_star", "baseline"))
    """Baseline treatment value."""
    z: Optional[int] = None
    """Value the mediator is set to for a CDE (alternatively an atomic :py:attr:`mediator_regime`)."""
    treatment_regime: Optional[Regime] = None
    """Regime of the treatment for an ACE; by default atomic at :py:attr:`x` and :py:attr:`x_star`."""
    mediator_regime: Optional[MediatorRegime] = None
    """Regime of the mediator: atomic (CDE), random (SDE) or natural (NDE/NIE)."""
    roles: Roles = Field(default_factory=Roles)
    """Covariate role sets."""
    steps: Tuple[SequentialStep, ...] = ()
    """Interventions of a SEQ query, in temporal order."""
    auto_search: bool = True
    """Whether role sets left unset may be searched for; if ``False`` they are taken as empty."""

    @model_validator(mode="after")
    def check_kind_fields(self):
        kind = self.kind
        if kind == EffectKind.SEQ:
            if not self.steps:
                raise ValueError("A sequential query needs at least one step.")
            targets = [step.target for step in self.steps]
            if len(set(targets)) != len(targets):
                raise ValueError(f"Repeated step target in {targets}.")
            if self.response in targets:
                raise ValueError("The response cannot be an intervention target.")
            return self
        if self.treatment is None:
            raise ValueError(f"A {kind.value} query needs a treatment.")
        if self.treatment == self.response:
            raise ValueError("Treatment and response must differ.")
        if kind in (EffectKind.CDE, EffectKind.SDE, EffectKind.NDE, EffectKind.NIE):
            if self.mediator is None:
                raise ValueError(f"A {kind.value} query needs a mediator.")
            if self.mediator in (self.treatment, self.response):
                raise ValueError("The mediator must differ from treatment and response.")
        regime_ace = kind == EffectKind.ACE and isinstance(
            self.treatment_regime, (ConditionalRegime, RandomRegime)
        )
        if not regime_ace and (self.x is None or self.x_star is None):
            raise ValueError(f"A {kind.value} query needs treatment values x and x_star.")
        if kind == EffectKind.CDE and self.z is None and not isinstance(self.mediator_regime, AtomicRegime):
            raise ValueError("A cde query needs a mediator value z or an atomic mediator regime.")
        if kind == EffectKind.SDE and not isinstance(self.mediator_regime, RandomRegime):
            raise ValueError("An sde query needs a random mediator regime.")
        if kind in (EffectKind.NDE, EffectKind.NIE) and self.mediator_regime is not None:
            if not isinstance(self.mediator_regime, NaturalRegimeSpec):
                raise ValueError(f"A {kind.value} query only accepts a natural mediator regime.")
        if kind in (EffectKind.NDE, EffectKind.NIE):
            w, l1, l2 = self.roles.w, self.roles.l1, self.roles.l2
            if w is not None and l1 is not None and l2 is not None and not set(w) <= set(l1) | set(l2):
                raise ValueError(f"W={list(w)} must be a subset of L1 and L2.")
        return self

    @property
    def mediator_value(self) -> Optional[int]:
        if isinstance(self.mediator_regime, AtomicRegime):
            return self.mediator_regime.value
        return self.z

    def natural_spec(self, baseline: int) -> NaturalRegimeSpec:
        """The natural mediator regime of this query at ``baseline``; ``W`` is taken from the roles."""
        spec = self.mediator_regime if isinstance(self.mediator_regime, NaturalRegimeSpec) else NaturalRegimeSpec()
        w = self.roles.w if self.roles.w is not None else spec.w
        return spec.model_copy(update={"w": tuple(w), "baseline": baseline}).bind(self.mediator, self.treatment)


class Witness(BaseModel, frozen=True):
    """
    Evidence of a failed condition: an open path in the diagram the condition was checked on.
    """

    condition: Condition
    """Name of the failed condition."""
    path: Optional[Tuple[str, ...]] = None
    """Open path, if the condition failed by d-connection."""
    given: Tuple[str, ...] = ()
    """Conditioning set the path is open given."""
    reason: Optional[str] = None
    """Human-readable explanation."""
    nodes: Optional[Tuple[str, ...]] = None
    """Offending nodes, for conditions that are not decided by d-separation."""
    diagram: Optional[Dag] = Field(default=None, exclude=True)
    """The diagram the path lives in."""

    def recheck(self) -> bool:
        """Re-verify that :py:attr:`path` is open given :py:attr:`given` in :py:attr:`diagram`."""
        if self.path is None or self.diagram is None:
            return False
        return is_open_path(self.diagram, list(self.path), self.given)


class CheckResult(BaseModel, frozen=True):
    """Outcome of one graphical condition."""

    passed: bool
    condition: Condition
    witness: Optional[Witness] = None
    """Present iff the condition failed."""
    label: Optional[str] = None
    """Qualifier of a passing result, e.g. :py:data:`GRAPHICAL_NECESSARY`."""

    def __bool__(self) -> bool:
        return self.passed


class IdentificationResult(BaseModel, frozen=True):
    """Verdict of an identification request."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    identified: bool
    verdict: Verdict
    value: Optional[float] = None
    """Effect value (a contrast, or an expectation for SEQ queries and random treatment regimes)."""
    distribution: Optional[Table] = None
    """Identified distribution of the response."""
    formula: Tuple[str, ...] = ()
    """Factors of the identifying expression."""
    witness: Optional[Witness] = None
    """Failure witness."""
    notes: Tuple[str, ...] = ()
    """Labels and bindings of role letters."""
    roles: Optional[Roles] = None
    """Roles used."""

    @model_validator(mode="after")
    def check_fields(self):
        if self.identified:
            if self.value is None or self.distribution is None or not self.formula:
                raise ValueError("An identified result needs a value, a distribution and a formula.")
            if self.verdict != Verdict.IDENTIFIED:
                raise ValueError("Identified results must have the identified verdict.")
        else:
            if self.witness is None:
                raise ValueError("A failed identification needs a witness.")
            if self.verdict == Verdict.IDENTIFIED:
                raise ValueError("Failed identification cannot have the identified verdict.")
        return self

    @field_serializer("distribution")
    def serialize_distribution(self, distribution: Optional[Table]) -> Optional[List[float]]:
        return None if distribution is None else distribution.entries()

    @classmethod
    def failure(cls, error, roles: Optional[Roles] = None) -> IdentificationResult:
        """Result for a :py:class:`~regimecalc.identify.errors.IdentificationError`."""
        from regimecalc.identify.errors import NotDefined

        verdict = Verdict.NOT_DEFINED if isinstance(error, NotDefined) else Verdict.NOT_IDENTIFIED
        return cls(identified=False, verdict=verdict, witness=error.witness, notes=(str(error),), roles=roles)

    def to_output(self) -> dict:
        """The output document of a result."""
        return {
            "identified": self.identified,
            "verdict": self.verdict.value,
            "value": self.value,
            "distribution": None if self.distribution is None else self.distribution.entries(),
            "formula": list(self.formula),
            "witness": None if self.witness is None else self.witness.model_dump(mode="json", exclude_none=True),
            "roles": None if self.roles is None else self.roles.as_dict(),
            "notes": list(self.notes),
        }
