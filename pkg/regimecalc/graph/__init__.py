"""
This module defines the graph layer: the immutable DAG and the structural primitives
(ancestors, descendants, moralization, d-separation) every identification criterion reduces to.
"""

from regimecalc.graph.dag import (
    SIGMA_PREFIX,
    Dag,
    DagNode,
    GraphError,
    NodeKind,
    UnknownNodeError,
    ancestors,
    ancestors_of_set,
    descendants,
    descendants_of_set,
    non_descendants,
    sigma,
    topological_order,
)
from regimecalc.graph.separation import (
    SeparationMethod,
    d_separated,
    d_separated_bayes_ball,
    d_separated_moral,
    find_open_path,
    is_open_path,
)
from regimecalc.graph.dot import to_dot
