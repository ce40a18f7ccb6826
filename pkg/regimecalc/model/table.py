"""
Table
-----
Dense nonnegative tables over discrete variables.

A :py:class:`Table` stores one ``numpy`` axis per variable of its scope, in scope order;
flattened, entries are row-major with the last variable varying fastest.
Conditional tables mark cells whose conditioning event has (numerically) zero
probability with ``NaN``; :py:func:`contract` raises :py:exc:`PositivityViolation`
if such a cell would receive positive weight in a sum.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

logger = logging.getLogger(__name__)

POSITIVITY_THRESHOLD = 1e-12
"""Conditioning events with probability below this value are treated as impossible."""
NORMALIZATION_TOLERANCE = 1e-9
"""Maximum deviation from 1 allowed for normalized tables and CPT rows."""


class PositivityViolation(ValueError):
    """
    Raised when a quantity requires conditioning on an event of zero observational probability.
    """

    def __init__(self, message: str, scope: Sequence[str] = (), assignment: Optional[Mapping[str, int]] = None):
        super().__init__(message)
        self.scope = tuple(scope)
        self.assignment = dict(assignment or {})


class Table(BaseModel, frozen=True):
    """
    A table of nonnegative reals indexed by the joint assignments of :py:attr:`scope`.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    scope: Tuple[str, ...]
    """Ordered variable names; one axis of :py:attr:`values` per name."""
    values: np.ndarray
    """Entries; ``values.shape`` gives the cardinalities. ``NaN`` marks an undefined conditional cell."""
    normalized: bool = False
    """Whether the table is a distribution over its scope (entries sum to 1)."""

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, values):
        array = np.array(values, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_shape(self):
        if self.values.ndim != len(self.scope):
            raise ValueError(f"Table over {self.scope} must have {len(self.scope)} axes, got {self.values.ndim}.")
        if len(set(self.scope)) != len(self.scope):
            raise ValueError(f"Repeated variable in scope {self.scope}.")
        if np.any(self.values[~np.isnan(self.values)] < 0):
            raise ValueError("Table entries must be nonnegative.")
        if self.normalized and abs(float(np.nansum(self.values)) - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"Normalized table sums to {float(np.nansum(self.values))!r}.")
        return self

    @property
    def cards(self) -> Dict[str, int]:
        return dict(zip(self.scope, self.values.shape))

    def entries(self) -> List[float]:
        """Flattened entries, last scope variable varying fastest."""
        return [float(value) for value in self.values.ravel()]

    def value(self, assignment: Mapping[str, int]) -> float:
        return float(self.values[tuple(assignment[name] for name in self.scope)])

    def axis(self, name: str) -> int:
        try:
            return self.scope.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not in the scope {self.scope}.") from None

    def reorder(self, scope: Sequence[str]) -> Table:
        scope = tuple(scope)
        if set(scope) != set(self.scope) or len(scope) != len(self.scope):
            raise ValueError(f"Cannot reorder {self.scope} as {scope}.")
        return Table(
            scope=scope,
            values=np.transpose(self.values, [self.axis(name) for name in scope]),
            normalized=self.normalized,
        )

    def marginalize(self, keep: Sequence[str]) -> Table:
        """Sum out every variable not in ``keep``; the result follows the order of ``keep``."""
        keep = tuple(keep)
        for name in keep:
            self.axis(name)
        summed = tuple(i for i, name in enumerate(self.scope) if name not in keep)
        values = self.values.sum(axis=summed) if summed else self.values
        remaining = tuple(name for name in self.scope if name in keep)
        return Table(scope=remaining, values=values, normalized=self.normalized).reorder(keep)

    def reduce(self, evidence: Mapping[str, int]) -> Table:
        """Fix the variables of ``evidence`` to the given values and drop them from the scope."""
        index = []
        for name, card in zip(self.scope, self.values.shape):
            if name in evidence:
                value = int(evidence[name])
                if not 0 <= value < card:
                    raise ValueError(f"Value {value} out of range for {name!r} (cardinality {card}).")
                index.append(value)
            else:
                index.append(slice(None))
        return Table(
            scope=tuple(name for name in self.scope if name not in evidence),
            values=self.values[tuple(index)],
        )

    def total(self) -> float:
        return float(np.nansum(self.values))

    def normalize(self) -> Table:
        """
        :raises PositivityViolation: If the table has (numerically) zero mass.
        """
        total = self.total()
        if total < POSITIVITY_THRESHOLD:
            raise PositivityViolation(f"Cannot normalize a table over {self.scope} with zero mass.", self.scope)
        return Table(scope=self.scope, values=self.values / total, normalized=True)

    def conditional(self, target: Sequence[str], given: Sequence[str]) -> Table:
        """
        Return ``p(target | given)`` as a table over ``given + target`` (in that order).

        Cells of conditioning assignments with probability below :py:data:`POSITIVITY_THRESHOLD` are ``NaN``.
        Variables appearing in both lists are treated as conditioning variables only.
        """
        given = tuple(given)
        target = tuple(name for name in target if name not in given)
        joint = self.marginalize(given + target)
        if not given:
            return joint.normalize() if target else joint
        denominator = joint.values.sum(axis=tuple(range(len(given), len(given) + len(target))), keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            values = np.where(denominator < POSITIVITY_THRESHOLD, np.nan, joint.values / denominator)
        return Table(scope=given + target, values=values)

    def expectation(self, numeric: Optional[Sequence[float]] = None) -> float:
        """
        Expectation of the single scope variable, using ``numeric`` as the value of each code
        (codes ``0..k-1`` by default).

        :raises ValueError: If the scope is not a single variable or the entries do not sum to 1.
        """
        if len(self.scope) != 1:
            raise ValueError(f"Expectation needs a table over one variable, got {self.scope}.")
        if abs(self.total() - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"Expectation needs a normalized table, got total mass {self.total()!r}.")
        numeric = np.arange(self.values.shape[0]) if numeric is None else np.asarray(numeric, dtype=float)
        if numeric.shape != self.values.shape:
            raise ValueError(f"Expected {self.values.shape[0]} numeric values, got {numeric.shape[0]}.")
        return float(np.dot(numeric, self.values))

    def max_abs_difference(self, other: Table) -> float:
        other = other.reorder(self.scope)
        if other.values.shape != self.values.shape:
            raise ValueError(f"Shape mismatch {self.values.shape} != {other.values.shape}.")
        return float(np.max(np.abs(self.values - other.values))) if self.values.size else 0.0


def contract(factors: Sequence[Table], keep: Sequence[str], cards: Optional[Mapping[str, int]] = None) -> Table:
    """
    Multiply ``factors`` and sum out every variable not in ``keep``.

    Factors sharing a variable are joined on it. Variables of ``keep`` absent from every factor
    must be given in ``cards`` and make the result constant along their axis.

    :raises PositivityViolation: If an undefined (``NaN``) cell of a factor meets positive weight
        from the remaining factors.
    """
    keep = tuple(keep)
    names: List[str] = []
    sizes: Dict[str, int] = dict(cards or {})
    for factor in factors:
        for name, size in zip(factor.scope, factor.values.shape):
            if name in sizes and sizes[name] != size:
                raise ValueError(f"Cardinality mismatch for {name!r}: {sizes[name]} != {size}.")
            sizes[name] = size
            if name not in names:
                names.append(name)
    for name in keep:
        if name not in sizes:
            raise ValueError(f"Unknown cardinality of {name!r}.")
        if name not in names:
            names.append(name)
    letters = {name: i for i, name in enumerate(names)}

    def einsum(arrays: Sequence[np.ndarray], scopes: Sequence[Tuple[str, ...]], out: Sequence[str]) -> np.ndarray:
        operands = []
        for array, scope in zip(arrays, scopes):
            operands += [array, [letters[name] for name in scope]]
        missing = [name for name in out if not any(name in scope for scope in scopes)]
        result = np.einsum(*operands, [letters[name] for name in out if name not in missing])
        for name in missing:
            position = list(out).index(name)
            result = np.expand_dims(result, position)
            result = np.repeat(result, sizes[name], axis=position)
        return result

    scopes = [factor.scope for factor in factors]
    filled = [np.nan_to_num(factor.values, nan=0.0) for factor in factors]
    for i, factor in enumerate(factors):
        undefined = np.isnan(factor.values)
        if not undefined.any():
            continue
        weights = [np.nan_to_num(other.values, nan=1.0) for j, other in enumerate(factors) if j != i]
        other_scopes = [scope for j, scope in enumerate(scopes) if j != i]
        weight = float(einsum([undefined.astype(float), *weights], [factor.scope, *other_scopes], ()))
        if weight > POSITIVITY_THRESHOLD:
            cell = np.argwhere(undefined)[0]
            assignment = dict(zip(factor.scope, (int(value) for value in cell)))
            raise PositivityViolation(
                f"Factor over {factor.scope} is undefined at {assignment} but is needed "
                f"(weight {weight:.3g}); positivity fails.",
                factor.scope,
                assignment,
            )
    if not factors:
        return Table(scope=keep, values=np.ones(tuple(sizes[name] for name in keep)))
    return Table(scope=keep, values=einsum(filled, scopes, keep))
