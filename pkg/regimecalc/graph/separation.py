"""
Separation
----------
d-separation on a :py:class:`~regimecalc.graph.dag.Dag`.

Two independent algorithms are provided and are required to agree:

- :py:func:`d_separated_moral` -- separation in the moralized ancestral graph;
- :py:func:`d_separated_bayes_ball` -- reachability along active trails ("Bayes-ball").

:py:func:`find_open_path` additionally returns an active path as a failure witness,
and :py:func:`is_open_path` re-verifies such a path.
Regime indicators take part as ordinary parentless nodes.
"""

from __future__ import annotations

import logging
from collections import deque
from enum import Enum, unique
from typing import Collection, Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx

from regimecalc.graph.dag import Dag, GraphError, ancestors_of_set

logger = logging.getLogger(__name__)


@unique
class SeparationMethod(str, Enum):
    """Algorithm used by :py:func:`d_separated`."""

    MORAL = "moral"
    BAYES_BALL = "bayes_ball"


def _prepare(g: Dag, a: Iterable[str], b: Iterable[str], c: Iterable[str]) -> Tuple[Set[str], Set[str], Set[str]]:
    a, b, c = set(a), set(b), set(c)
    g.check_nodes(a | b | c)
    overlap = (a & b) | (a & c) | (b & c)
    if overlap:
        raise GraphError(f"Node sets must be pairwise disjoint, overlap: {sorted(overlap)}.")
    return a, b, c


def d_separated_moral(g: Dag, a: Collection[str], b: Collection[str], c: Collection[str]) -> bool:
    """
    Decide ``a ⊥⊥ b | c`` by separation in the moral graph of the ancestral set of ``a ∪ b ∪ c``.
    """
    a, b, c = _prepare(g, a, b, c)
    if not a or not b:
        return True
    relevant = ancestors_of_set(g, a | b | c, include_self=True)
    moral = nx.moral_graph(g.nx_graph.subgraph(relevant))
    moral.remove_nodes_from(c)
    for component in nx.connected_components(moral):
        if component & a and component & b:
            return False
    return True


# trail directions: UP means the trail arrived from a child (or starts here),
# DOWN means it arrived from a parent
_UP = "up"
_DOWN = "down"


def _active_trail_search(
    g: Dag, a: Set[str], b: Set[str], c: Set[str]
) -> Optional[List[str]]:
    """Breadth-first search over (node, direction) states; returns the first active trail reaching ``b``."""
    graph = g.nx_graph
    observed_ancestry = ancestors_of_set(g, c, include_self=True)

    previous: Dict[Tuple[str, str], Optional[Tuple[str, str]]] = {}
    queue = deque()
    for start in sorted(a):
        state = (start, _UP)
        previous[state] = None
        queue.append(state)

    while queue:
        state = queue.popleft()
        node, direction = state
        if node in b:
            trail = []
            cursor: Optional[Tuple[str, str]] = state
            while cursor is not None:
                trail.append(cursor[0])
                cursor = previous[cursor]
            return trail[::-1]

        successors = []
        if direction == _UP and node not in c:
            successors += [(parent, _UP) for parent in sorted(graph.predecessors(node))]
            successors += [(child, _DOWN) for child in sorted(graph.successors(node))]
        elif direction == _DOWN:
            if node not in c:
                successors += [(child, _DOWN) for child in sorted(graph.successors(node))]
            if node in observed_ancestry:
                successors += [(parent, _UP) for parent in sorted(graph.predecessors(node))]

        for successor in successors:
            if successor not in previous:
                previous[successor] = state
                queue.append(successor)
    return None


def d_separated_bayes_ball(g: Dag, a: Collection[str], b: Collection[str], c: Collection[str]) -> bool:
    """
    Decide ``a ⊥⊥ b | c`` by searching for an active trail from ``a`` to ``b``.
    """
    a, b, c = _prepare(g, a, b, c)
    if not a or not b:
        return True
    return _active_trail_search(g, a, b, c) is None


def d_separated(
    g: Dag,
    a: Collection[str],
    b: Collection[str],
    c: Collection[str] = (),
    method: SeparationMethod = SeparationMethod.MORAL,
) -> bool:
    """
    Return whether every path between ``a`` and ``b`` is blocked given ``c``.

    :param method: Which of the two algorithms to use; both give the same answer.
    :raises GraphError: If the sets overlap.
    :raises UnknownNodeError: If a node is not in ``g``.
    """
    if SeparationMethod(method) == SeparationMethod.MORAL:
        return d_separated_moral(g, a, b, c)
    return d_separated_bayes_ball(g, a, b, c)


def is_open_path(g: Dag, path: List[str], c: Collection[str]) -> bool:
    """
    Check that ``path`` is a walk in ``g`` (direction ignored) that is active given ``c``:
    endpoints are not in ``c``, every non-collider is outside ``c``
    and every collider is in ``c`` or has a descendant in ``c``.
    """
    c = set(c)
    if not path or path[0] in c or path[-1] in c:
        return False
    graph = g.nx_graph
    for u, v in zip(path, path[1:]):
        if not (graph.has_edge(u, v) or graph.has_edge(v, u)):
            return False
    observed_ancestry = ancestors_of_set(g, c, include_self=True)
    for left, middle, right in zip(path, path[1:], path[2:]):
        collider = graph.has_edge(left, middle) and graph.has_edge(right, middle)
        if collider and middle not in observed_ancestry:
            return False
        if not collider and middle in c:
            return False
    return True


def _shorten(g: Dag, path: List[str], c: Set[str]) -> List[str]:
    """Cut loops out of an active walk as long as the result stays active."""
    changed = True
    while changed:
        changed = False
        for i, node in enumerate(path):
            last = len(path) - 1 - path[::-1].index(node)
            if last > i:
                candidate = path[: i + 1] + path[last + 1 :]  # noqa: E203
                if is_open_path(g, candidate, c):
                    path = candidate
                    changed = True
                    break
    return path


def find_open_path(g: Dag, a: Collection[str], b: Collection[str], c: Collection[str] = ()) -> Optional[List[str]]:
    """
    Return an active path from a node of ``a`` to a node of ``b`` given ``c``,
    or ``None`` if ``a`` and ``b`` are d-separated.

    The path is simple whenever loop removal keeps it active, which is the usual case.
    """
    a, b, c = _prepare(g, a, b, c)
    if not a or not b:
        return None
    trail = _active_trail_search(g, a, b, c)
    if trail is None:
        return None
    path = _shorten(g, trail, c)
    logger.debug(f"Open path {path} between {sorted(a)} and {sorted(b)} given {sorted(c)}")
    return path
