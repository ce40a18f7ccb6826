"""
Reference models
----------------
Graphs and models shared by tests, tutorials and the command line.

- :py:func:`sequential_graph`: two treatments ``X`` then ``Z`` with an intermediate covariate ``V``;
- :py:func:`mediation_graph`: treatment ``X``, mediators ``Z`` and ``V``, no confounding;
- :py:func:`stratified_mediator_graph`: the mediator also depends on an observed root ``W``;
- :py:func:`confounded_mediation_graph`: treatment, covariate ``V`` and mediator confounded by ``U1`` and ``U2``;
- :py:func:`random_dag` and :py:func:`random_cpts`: seeded random models.
"""

import logging
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from regimecalc.graph.dag import Dag
from regimecalc.model.model import Cpt, Model, Variable

logger = logging.getLogger(__name__)


def graph_from_edges(nodes: Sequence[str], edges: Iterable[Tuple[str, str]], latent: Iterable[str] = ()) -> Dag:
    dag = Dag.model_validate({"nodes": list(nodes), "edges": [list(edge) for edge in edges]})
    latent = list(latent)
    return dag.with_latent(latent) if latent else dag


def sequential_graph(latent_v: bool = False) -> Dag:
    """``X→V, V→Z, X→Z, X→Y, V→Y, Z→Y``."""
    edges = [("X", "V"), ("V", "Z"), ("X", "Z"), ("X", "Y"), ("V", "Y"), ("Z", "Y")]
    return graph_from_edges(["X", "V", "Z", "Y"], edges, ["V"] if latent_v else [])


def mediation_graph() -> Dag:
    """``X→Z, Z→Y, X→V, V→Y, X→Y``."""
    return graph_from_edges(["X", "Z", "V", "Y"], [("X", "Z"), ("Z", "Y"), ("X", "V"), ("V", "Y"), ("X", "Y")])


def stratified_mediator_graph() -> Dag:
    """``X→Z, W→Z, Z→Y, X→Y`` with ``W`` an observed root."""
    return graph_from_edges(["W", "X", "Z", "Y"], [("X", "Z"), ("W", "Z"), ("Z", "Y"), ("X", "Y")])


def confounded_mediation_graph(latent: bool = True) -> Dag:
    """
    ``U1→X, U1→V, U2→V, U2→Y, X→V, V→Z, X→Y, Z→Y``.

    :param latent: Whether ``U1`` and ``U2`` are unobserved.
    """
    edges = [
        ("U1", "X"),
        ("U1", "V"),
        ("U2", "V"),
        ("U2", "Y"),
        ("X", "V"),
        ("V", "Z"),
        ("X", "Y"),
        ("Z", "Y"),
    ]
    return graph_from_edges(["U1", "U2", "X", "V", "Z", "Y"], edges, ["U1", "U2"] if latent else [])


def random_dag(n_nodes: int, seed: int, edge_probability: float = 0.5, latent_probability: float = 0.0) -> Dag:
    """
    Random graph over nodes ``A, B, ...`` whose edges all point forward in name order.

    :raises ValueError: If ``n_nodes`` is not between 1 and 26.
    """
    if not 1 <= n_nodes <= 26:
        raise ValueError(f"Number of nodes must be between 1 and 26, got {n_nodes}.")
    rng = np.random.default_rng(seed)
    names = [chr(ord("A") + i) for i in range(n_nodes)]
    edges = [
        (parent, child) for j, child in enumerate(names) for parent in names[:j] if rng.random() < edge_probability
    ]
    latent = [name for name in names if rng.random() < latent_probability]
    return graph_from_edges(names, edges, latent)


def random_cpts(
    dag: Dag,
    seed: int,
    cards: Optional[Mapping[str, int]] = None,
    concentration: float = 1.0,
) -> Model:
    """
    Model over ``dag`` with rows drawn from a symmetric Dirichlet distribution.

    :param cards: Cardinality per variable; binary by default.
    """
    rng = np.random.default_rng(seed)
    cards = {name: 2 for name in dag.chance_nodes} | dict(cards or {})
    variables = [Variable(name=name, card=cards[name], latent=dag.is_latent(name)) for name in dag.chance_nodes]
    cpts = []
    for name in dag.chance_nodes:
        parents = dag.parents(name)
        shape = tuple(cards[parent] for parent in parents)
        table = rng.dirichlet(np.full(cards[name], concentration), size=shape or None)
        cpts.append(Cpt(target=name, parents=tuple(parents), table=table))
    return Model.build(variables, dag.edges, cpts)


def _binary_response(probability: Callable[..., float], parents: Sequence[str], target: str = "Y") -> Cpt:
    grid = np.indices((2,) * len(parents)).reshape(len(parents), -1).T
    rows = [[1.0 - probability(*codes), probability(*codes)] for codes in grid]
    return Cpt.from_rows(target, parents, rows, {name: 2 for name in (*parents, target)})


def additive_mediation_model(seed: int) -> Model:
    """
    Mediation model whose response has a mean additive in ``X``, ``Z`` and ``V``:
    ``p(Y=1 | x, z, v) = 0.1 + 0.3x + 0.2z + 0.25v``. Other rows are random.
    """
    base = random_cpts(mediation_graph(), seed)
    response = _binary_response(lambda x, z, v: 0.1 + 0.3 * x + 0.2 * z + 0.25 * v, ["X", "Z", "V"])
    cpts = [response if name == "Y" else cpt for name, cpt in base.cpts.items()]
    return Model.build(base.variables, base.dag.edges, cpts)


def interaction_model(seed: int, mediated: bool = True) -> Model:
    """
    ``p(Y=1 | x, z) = 0.1 + 0.3xz``: treatment and mediator interact in their effect on the response.

    :param mediated: Whether the mediator depends on the treatment (``p(Z=1 | x) = 0.3 + 0.4x``)
        or is an independent root (``p(Z=1) = 0.3``).
    """
    if mediated:
        dag = graph_from_edges(["X", "Z", "Y"], [("X", "Z"), ("X", "Y"), ("Z", "Y")])
        mediator = Cpt.from_rows("Z", ["X"], [[0.7, 0.3], [0.3, 0.7]], {"X": 2, "Z": 2})
    else:
        dag = graph_from_edges(["X", "Z", "Y"], [("X", "Y"), ("Z", "Y")])
        mediator = Cpt(target="Z", table=np.array([0.7, 0.3]))
    treatment = Cpt(target="X", table=np.random.default_rng(seed).dirichlet([2.0, 2.0]))
    response = _binary_response(lambda x, z: 0.1 + 0.3 * x * z, ["X", "Z"])
    variables = [Variable(name=name, card=2) for name in ("X", "Z", "Y")]
    return Model.build(variables, dag.edges, [treatment, mediator, response])


REFERENCE_GRAPHS: Dict[str, Callable[[], Dag]] = {
    "sequential": sequential_graph,
    "mediation": mediation_graph,
    "stratified-mediator": stratified_mediator_graph,
    "confounded-mediation": lambda: confounded_mediation_graph(latent=True),
    "confounded-mediation-observed": lambda: confounded_mediation_graph(latent=False),
}
"""Named graphs available to the command line."""


def reference_model(name: str, seed: int) -> Model:
    """
    A named reference graph with seeded random CPTs.

    :raises KeyError: If ``name`` is unknown.
    """
    if name not in REFERENCE_GRAPHS:
        raise KeyError(f"Unknown reference graph {name!r}; choose one of {sorted(REFERENCE_GRAPHS)}.")
    return random_cpts(REFERENCE_GRAPHS[name](), seed)
