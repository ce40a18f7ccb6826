"""
Sampling
--------
Forward (ancestral) sampling of a :py:class:`~regimecalc.model.model.Model` into a ``pandas`` dataset
and maximum-likelihood fitting of CPTs from such a dataset.

Datasets hold integer value codes, one column per variable.
Latent columns are kept but listed in ``DataFrame.attrs["latent"]``.
"""

import logging
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from regimecalc.graph.dag import Dag, topological_order
from regimecalc.model.model import Cpt, LatentVariableError, Model, ObservationalView, Variable
from regimecalc.model.table import Table

logger = logging.getLogger(__name__)

LATENT_ATTR = "latent"
"""Key of ``DataFrame.attrs`` listing latent columns."""


def sample(m: Model, n: int, seed: int) -> pd.DataFrame:
    """
    Draw ``n`` independent full assignments in topological order.

    :param seed: Seed of the ``numpy`` generator; identical seeds give identical datasets.
    :raises ValueError: If ``n`` is not positive.
    """
    if n < 1:
        raise ValueError(f"Sample size must be positive, got {n}.")
    rng = np.random.default_rng(seed)
    columns = {}
    for name in topological_order(m.dag):
        cpt = m.cpts[name]
        if cpt.parents:
            rows = cpt.table[tuple(columns[parent] for parent in cpt.parents)]
        else:
            rows = np.broadcast_to(cpt.table, (n, cpt.table.shape[-1]))
        cumulative = np.cumsum(rows, axis=-1)
        draws = rng.random(n)
        codes = (cumulative <= draws[:, None]).sum(axis=-1)
        columns[name] = np.minimum(codes, cpt.table.shape[-1] - 1)
    data = pd.DataFrame({name: columns[name].astype(int) for name in m.dag.names})
    data.attrs[LATENT_ATTR] = list(m.dag.latent_nodes)
    logger.debug(f"Sampled {n} rows with seed {seed}")
    return data


def fit_cpts(
    data: pd.DataFrame,
    g: Dag,
    smoothing: float = 0.0,
    variables: Optional[Mapping[str, Variable]] = None,
) -> Model:
    """
    Fit one CPT per node of ``g`` by counting, with additive ``smoothing``.

    Rows of a parent assignment that was never observed (and receives no smoothing) become uniform.

    :param variables: Known variables; cardinalities of the others are read off the data.
    :raises LatentVariableError: If ``g`` has latent nodes.
    :raises ValueError: If a column is missing or ``smoothing`` is negative.
    """
    if smoothing < 0:
        raise ValueError(f"Smoothing must be nonnegative, got {smoothing}.")
    if g.latent_nodes:
        raise LatentVariableError(f"Cannot fit CPTs of latent variable(s) {g.latent_nodes}.")
    missing = [name for name in g.chance_nodes if name not in data.columns]
    if missing:
        raise ValueError(f"Dataset has no column for {missing}.")
    variables = dict(variables or {})
    fitted_variables = []
    for name in g.chance_nodes:
        if name in variables:
            variable = variables[name].model_copy(update={"latent": False})
        else:
            observed = int(data[name].max()) + 1 if len(data) else 2
            variable = Variable(name=name, card=max(observed, 2))
        if len(data) and (int(data[name].min()) < 0 or int(data[name].max()) >= variable.card):
            raise ValueError(f"Column {name!r} has codes outside 0..{variable.card - 1}.")
        fitted_variables.append(variable)
    cards = {variable.name: variable.card for variable in fitted_variables}

    cpts = []
    for name in g.chance_nodes:
        parents = g.parents(name)
        counts = np.zeros(tuple(cards[parent] for parent in parents) + (cards[name],))
        index = tuple(data[column].to_numpy(dtype=int) for column in (*parents, name))
        np.add.at(counts, index, 1.0)
        counts += smoothing
        totals = counts.sum(axis=-1, keepdims=True)
        empty = totals[..., 0] == 0
        if empty.any():
            logger.warning(
                f"{int(empty.sum())} parent configuration(s) of {name!r} have no data; using uniform rows."
            )
        table = np.where(totals == 0, 1.0 / cards[name], counts / np.where(totals == 0, 1.0, totals))
        cpts.append(Cpt(target=name, parents=tuple(parents), table=table))
    return Model.build(fitted_variables, g.edges, cpts)


def fit_observational_view(
    data: pd.DataFrame,
    g: Dag,
    smoothing: float = 0.0,
    variables: Optional[Mapping[str, Variable]] = None,
) -> ObservationalView:
    """
    Plug-in estimate of what an analyst observing ``g`` can see.

    Without latent nodes the CPTs of ``g`` are fitted; otherwise the observable joint is fitted
    without restrictions, as a complete graph over the observable nodes in topological order.
    Latent columns of ``data`` are ignored.
    """
    observable = [name for name in topological_order(g) if not g.is_latent(name)]
    if g.latent_nodes:
        edges = [(parent, child) for i, child in enumerate(observable) for parent in observable[:i]]
        fitted_graph = Dag.model_validate({"nodes": observable, "edges": edges})
    else:
        fitted_graph = g
    fitted = fit_cpts(data, fitted_graph, smoothing, variables)
    ordered = tuple(fitted.variable(name) for name in g.observable_nodes)
    logger.info(f"Fitted the observable distribution of {len(ordered)} variable(s) on {len(data)} rows")
    return ObservationalView(dag=g, variables=ordered, joint=fitted.joint.reorder(g.observable_nodes))


def empirical_distribution(data: pd.DataFrame, names: Sequence[str], cards: Mapping[str, int]) -> Table:
    """
    Relative frequencies of the joint values of ``names``.

    :raises ValueError: If the dataset is empty or a code is out of range.
    """
    if not len(data):
        raise ValueError("Cannot estimate a distribution from an empty dataset.")
    shape = tuple(cards[name] for name in names)
    counts = np.zeros(shape)
    index = tuple(data[name].to_numpy(dtype=int) for name in names)
    for name, column in zip(names, index):
        if column.min() < 0 or column.max() >= cards[name]:
            raise ValueError(f"Column {name!r} has codes outside 0..{cards[name] - 1}.")
    np.add.at(counts, index, 1.0)
    return Table(scope=tuple(names), values=counts / len(data), normalized=True)
