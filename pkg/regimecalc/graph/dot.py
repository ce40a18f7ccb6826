"""
DOT export
----------
Graphviz rendering of a :py:class:`~regimecalc.graph.dag.Dag`.
Regime indicators are drawn as boxes and latent variables with dashed outlines.
"""

from regimecalc.graph.dag import Dag, NodeKind


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: Dag, name: str = "G") -> str:
    """
    Render ``g`` in the DOT language.

    Output is deterministic: nodes follow graph order, edges are sorted.
    """
    lines = [f"digraph {_quote(name)} {{"]
    for node in g.nodes:
        attributes = []
        if node.kind == NodeKind.REGIME:
            attributes.append("shape=box")
        else:
            attributes.append("shape=ellipse")
        if node.latent:
            attributes.append("style=dashed")
        lines.append(f"    {_quote(node.name)} [{', '.join(attributes)}];")
    for parent, child in sorted(g.edges):
        lines.append(f"    {_quote(parent)} -> {_quote(child)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
