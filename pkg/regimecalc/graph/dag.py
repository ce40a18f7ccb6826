"""
DAG
---
This module defines :py:class:`Dag`, the immutable directed acyclic graph every
identification criterion is posed on, together with the structural queries
(topological order, ancestors, descendants) the criteria reduce to.

Nodes are either chance variables or regime indicators (decision nodes).
Regime indicators are parentless and point into exactly one node: the variable they intervene in.
"""

from __future__ import annotations

import logging
from enum import Enum, unique
from functools import cached_property
from typing import Iterable, List, Optional, Set, Tuple

import networkx as nx
from pydantic import BaseModel, Field, field_validator, model_validator

logger = logging.getLogger(__name__)

SIGMA_PREFIX = "sigma_"
"""Name prefix of regime-indicator nodes: the indicator of ``X`` is called ``sigma_X``."""


class GraphError(ValueError):
    """Raised when a graph or a graph query is malformed."""


class UnknownNodeError(GraphError, KeyError):
    """Raised when a query references a node that does not exist in the graph."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


@unique
class NodeKind(str, Enum):
    """
    Kind of a :py:class:`DagNode`:

    - CHANCE: an ordinary random variable,
    - REGIME: a regime indicator; it has no distribution and is drawn as a box.
    """

    CHANCE = "chance"
    REGIME = "regime"


def sigma(target: str) -> str:
    """Name of the regime indicator that intervenes in ``target``."""
    return f"{SIGMA_PREFIX}{target}"


class DagNode(BaseModel, frozen=True):
    """A single node of a :py:class:`Dag`."""

    name: str
    """Label of the node, unique within the graph."""
    kind: NodeKind = NodeKind.CHANCE
    """Whether the node is a chance variable or a regime indicator."""
    latent: bool = False
    """Whether the variable is unobserved. Regime indicators are never latent."""

    @field_validator("name")
    @classmethod
    def validate_name(cls, name: str) -> str:
        if name == "":
            raise ValueError("Node name cannot be blank.")
        return name

    @model_validator(mode="after")
    def check_regime_not_latent(self):
        if self.kind == NodeKind.REGIME and self.latent:
            raise ValueError(f"Regime indicator {self.name!r} cannot be latent.")
        return self


class Dag(BaseModel, frozen=True):
    """
    Labeled directed acyclic graph.

    Instances are immutable: every "mutating" method returns a new, re-validated graph.
    Node order is the order of insertion and is preserved by all derived graphs.
    """

    nodes: Tuple[DagNode, ...] = ()
    """Nodes of the graph in insertion order."""
    edges: Tuple[Tuple[str, str], ...] = Field(default=())
    """Ordered ``(parent, child)`` pairs."""

    @model_validator(mode="before")
    @classmethod
    def validate_from_names(cls, data):
        """
        Allow plain strings in place of :py:class:`DagNode` and lists in place of edge tuples.
        """
        if isinstance(data, dict):
            nodes = data.get("nodes", ())
            data = {
                **data,
                "nodes": tuple(DagNode(name=node) if isinstance(node, str) else node for node in nodes),
                "edges": tuple(tuple(edge) for edge in data.get("edges", ())),
            }
        return data

    @model_validator(mode="after")
    def check_structure(self):
        """
        Validate the graph:

        - node names are unique;
        - edges reference existing nodes, contain no self-loops and no duplicates;
        - the edge relation is acyclic;
        - regime indicators have no parents and exactly one child.
        """
        names = [node.name for node in self.nodes]
        if len(set(names)) != len(names):
            duplicates = sorted({name for name in names if names.count(name) > 1})
            raise ValueError(f"Duplicate node names: {duplicates}.")
        known = set(names)
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("Duplicate edges.")
        for parent, child in self.edges:
            if parent not in known or child not in known:
                raise ValueError(f"Edge {(parent, child)!r} references an unknown node.")
            if parent == child:
                raise ValueError(f"Self-loop on {parent!r}.")
        if not nx.is_directed_acyclic_graph(self.nx_graph):
            cycle = nx.find_cycle(self.nx_graph)
            raise ValueError(f"Graph contains a cycle: {cycle}.")
        for node in self.nodes:
            if node.kind == NodeKind.REGIME:
                if self.nx_graph.in_degree(node.name) != 0:
                    raise ValueError(f"Regime indicator {node.name!r} cannot have parents.")
                if self.nx_graph.out_degree(node.name) != 1:
                    raise ValueError(f"Regime indicator {node.name!r} must have exactly one child.")
        return self

    @cached_property
    def nx_graph(self) -> nx.DiGraph:
        """
        ``networkx`` view of this graph. Must not be mutated.
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(node.name for node in self.nodes)
        graph.add_edges_from(self.edges)
        return graph

    @cached_property
    def node_index(self) -> dict:
        return {node.name: node for node in self.nodes}

    @property
    def names(self) -> List[str]:
        """Node names in insertion order."""
        return [node.name for node in self.nodes]

    def __contains__(self, name: object) -> bool:
        return name in self.node_index

    def node(self, name: str) -> DagNode:
        """
        :raises UnknownNodeError: If there is no node called ``name``.
        """
        try:
            return self.node_index[name]
        except KeyError:
            raise UnknownNodeError(f"Unknown node {name!r}.") from None

    def check_nodes(self, names: Iterable[str]) -> None:
        """
        :raises UnknownNodeError: If any of ``names`` is not in the graph.
        """
        missing = sorted(set(names) - set(self.node_index))
        if missing:
            raise UnknownNodeError(f"Unknown node(s): {missing}.")

    def parents(self, name: str) -> List[str]:
        """Parents of ``name`` in node-name order."""
        self.node(name)
        return sorted(self.nx_graph.predecessors(name))

    def children(self, name: str) -> List[str]:
        """Children of ``name`` in node-name order."""
        self.node(name)
        return sorted(self.nx_graph.successors(name))

    def is_latent(self, name: str) -> bool:
        return self.node(name).latent

    @property
    def chance_nodes(self) -> List[str]:
        return [node.name for node in self.nodes if node.kind == NodeKind.CHANCE]

    @property
    def regime_nodes(self) -> List[str]:
        return [node.name for node in self.nodes if node.kind == NodeKind.REGIME]

    @property
    def observable_nodes(self) -> List[str]:
        """Chance nodes that are not latent, in insertion order."""
        return [node.name for node in self.nodes if node.kind == NodeKind.CHANCE and not node.latent]

    @property
    def latent_nodes(self) -> List[str]:
        return [node.name for node in self.nodes if node.latent]

    def add_node(
        self, name: str, kind: NodeKind = NodeKind.CHANCE, latent: bool = False, children: Iterable[str] = ()
    ) -> Dag:
        """
        Return a copy with one more node. ``children`` are wired in the same step,
        which regime indicators need to pass validation.
        """
        node = DagNode(name=name, kind=kind, latent=latent)
        return Dag(nodes=(*self.nodes, node), edges=(*self.edges, *((name, child) for child in children)))

    def add_edges(self, edges: Iterable[Tuple[str, str]]) -> Dag:
        new_edges = [tuple(edge) for edge in edges if tuple(edge) not in self.edges]
        return Dag(nodes=self.nodes, edges=(*self.edges, *new_edges))

    def remove_edges_into(self, name: str) -> Dag:
        self.node(name)
        return Dag(nodes=self.nodes, edges=tuple(edge for edge in self.edges if edge[1] != name))

    def with_latent(self, names: Iterable[str], latent: bool = True) -> Dag:
        """Return a copy of this graph with the latent flag of ``names`` set to ``latent``."""
        names = set(names)
        self.check_nodes(names)
        nodes = tuple(
            node.model_copy(update={"latent": latent}) if node.name in names else node for node in self.nodes
        )
        return Dag(nodes=nodes, edges=self.edges)

    def without_regime_nodes(self) -> Dag:
        regime = set(self.regime_nodes)
        return Dag(
            nodes=tuple(node for node in self.nodes if node.name not in regime),
            edges=tuple(edge for edge in self.edges if edge[0] not in regime),
        )


def topological_order(g: Dag) -> List[str]:
    """
    Return the nodes of ``g`` so that every edge points forward.
    Ties are broken by lexicographic node name, which makes the order deterministic.
    """
    return list(nx.lexicographical_topological_sort(g.nx_graph))


def descendants(g: Dag, v: str) -> Set[str]:
    """
    Proper descendants of ``v`` (``v`` itself excluded).

    :raises UnknownNodeError: If ``v`` is not in ``g``.
    """
    g.node(v)
    return set(nx.descendants(g.nx_graph, v))


def ancestors(g: Dag, v: str) -> Set[str]:
    """
    Proper ancestors of ``v`` (``v`` itself excluded).

    :raises UnknownNodeError: If ``v`` is not in ``g``.
    """
    g.node(v)
    return set(nx.ancestors(g.nx_graph, v))


def descendants_of_set(g: Dag, vs: Iterable[str], include_self: bool = False) -> Set[str]:
    result: Set[str] = set()
    for v in vs:
        result |= descendants(g, v)
        if include_self:
            result.add(v)
    return result


def ancestors_of_set(g: Dag, vs: Iterable[str], include_self: bool = False) -> Set[str]:
    result: Set[str] = set()
    for v in vs:
        result |= ancestors(g, v)
        if include_self:
            result.add(v)
    return result


def non_descendants(g: Dag, vs: Iterable[str], within: Optional[Iterable[str]] = None) -> List[str]:
    """
    Nodes (of ``within`` or of the whole graph) that are neither in ``vs`` nor descendants of any of them.
    Order follows ``within`` (or graph insertion order).
    """
    vs = list(vs)
    excluded = descendants_of_set(g, vs, include_self=True)
    pool = g.names if within is None else list(within)
    return [name for name in pool if name not in excluded]
