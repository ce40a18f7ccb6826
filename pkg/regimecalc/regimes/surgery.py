"""
Surgery
-------
Construction of the check graphs: a graph is augmented with one regime indicator per target
and the arrows into each target are rewired to what its regime lets it depend on.

- :py:func:`surgery` applies one regime per target (the per-regime diagram);
- :py:func:`influence_diagram` gives every target the union of the parent sets
  it has under all the regimes considered, idle included.
"""

import logging
from typing import Iterable, List, Mapping, Sequence, Tuple, Union

from regimecalc.graph.dag import Dag, DagNode, NodeKind, descendants, sigma
from regimecalc.regimes.types import MediatorRegime, RegimeError

logger = logging.getLogger(__name__)


def _observational_parents(g: Dag, target: str) -> List[str]:
    regime = set(g.regime_nodes)
    return [parent for parent in g.parents(target) if parent not in regime]


def regime_parents(g: Dag, target: str, regime: MediatorRegime) -> List[str]:
    """
    Parents ``target`` has under ``regime``: the observational ones for an idle regime,
    none for an atomic one, the conditioning set otherwise.

    :raises RegimeError: If the conditioning set contains the target, unknown nodes,
        regime indicators or descendants of the target.
    """
    if regime.cond_set is None:
        return _observational_parents(g, target)
    cond_set = list(regime.cond_set)
    if target in cond_set:
        raise RegimeError(f"Regime on {target!r} cannot condition on its own target.")
    unknown = [name for name in cond_set if name not in g]
    if unknown:
        raise RegimeError(f"Regime on {target!r} conditions on unknown node(s) {unknown}.")
    if any(g.node(name).kind == NodeKind.REGIME for name in cond_set):
        raise RegimeError(f"Regime on {target!r} cannot condition on regime indicators.")
    later = sorted(set(cond_set) & descendants(g, target))
    if later:
        raise RegimeError(f"Regime on {target!r} conditions on its descendant(s) {later}.")
    return cond_set


def _check_target(g: Dag, target: str) -> None:
    node = g.node(target)
    if node.kind != NodeKind.CHANCE:
        raise RegimeError(f"Regime target {target!r} is not a chance variable.")
    if sigma(target) in g:
        raise RegimeError(f"Graph already has a regime indicator for {target!r}.")


def _rewire(g: Dag, parent_sets: Mapping[str, Sequence[str]]) -> Dag:
    """Replace the parents of each key by the given set and add one indicator per key, in target-name order."""
    edges: List[Tuple[str, str]] = [edge for edge in g.edges if edge[1] not in parent_sets]
    for target in sorted(parent_sets):
        edges += [(parent, target) for parent in parent_sets[target]]
    targets = sorted(parent_sets)
    indicators = tuple(DagNode(name=sigma(target), kind=NodeKind.REGIME) for target in targets)
    return Dag(nodes=(*g.nodes, *indicators), edges=(*edges, *((sigma(target), target) for target in targets)))


def surgery(g: Dag, plan: Mapping[str, MediatorRegime]) -> Dag:
    """
    Return ``g`` surgered according to ``plan``:

    - atomic: all arrows into the target are removed;
    - conditional, random, natural: the target's parents become the conditioning set;
    - idle: the target is unchanged.

    Every target additionally gets a regime indicator ``sigma_<target>`` pointing into it.
    Indicators are appended in target-name order.

    :raises RegimeError: If a target is not a chance node or a conditioning set is invalid.
    :raises UnknownNodeError: If a target is not in ``g``.
    """
    parent_sets = {}
    for target, regime in plan.items():
        _check_target(g, target)
        parent_sets[target] = regime_parents(g, target, regime)
    try:
        return _rewire(g, parent_sets)
    except ValueError as error:
        raise RegimeError(f"Surgery creates an invalid graph: {error}") from error


def influence_diagram(
    g: Dag, plan: Mapping[str, Union[MediatorRegime, Iterable[MediatorRegime]]], include_idle: bool = True
) -> Dag:
    """
    The diagram in which each target's parent set is the union of its parent sets
    under all regimes considered for it, and every target has a regime indicator.

    :param plan: One regime or an iterable of regimes per target.
    :param include_idle: Whether the observational (idle) regime is always among those considered.
    """
    parent_sets = {}
    for target, regimes in plan.items():
        _check_target(g, target)
        if not isinstance(regimes, (list, tuple, set, frozenset)):
            regimes = [regimes]
        union = _observational_parents(g, target) if include_idle else []
        for regime in regimes:
            union += [parent for parent in regime_parents(g, target, regime) if parent not in union]
        parent_sets[target] = union
    try:
        return _rewire(g, parent_sets)
    except ValueError as error:
        raise RegimeError(f"Influence diagram is not acyclic: {error}") from error
