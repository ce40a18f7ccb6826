import logging

import pytest

from regimecalc.model import Cpt, Model, Variable
from regimecalc.utils.reference_models import (
    confounded_mediation_graph,
    graph_from_edges,
    mediation_graph,
    random_cpts,
    sequential_graph,
    stratified_mediator_graph,
)


class _RecordList(logging.Handler):
    def __init__(self, records: list):
        super().__init__()
        self.records = records

    def emit(self, record):
        self.records.append(record)


@pytest.fixture
def log_event_catcher():
    """
    Return a function that attaches a recording handler to a logger and returns its record list.
    Handlers and levels are restored when the test ends.
    """
    attached = []

    def inner(logger, *, level=logging.DEBUG):
        records = []
        handler = _RecordList(records)
        attached.append((logger, handler, logger.level))
        logger.addHandler(handler)
        logger.setLevel(level)
        return records

    yield inner
    for logger, handler, previous in reversed(attached):
        logger.removeHandler(handler)
        logger.setLevel(previous)


@pytest.fixture
def seq_graph():
    return sequential_graph()


@pytest.fixture
def med_graph():
    return mediation_graph()


@pytest.fixture
def confounded_graph():
    return confounded_mediation_graph(latent=True)


@pytest.fixture
def confounded_graph_observed():
    return confounded_mediation_graph(latent=False)


@pytest.fixture
def stratified_graph():
    return stratified_mediator_graph()


@pytest.fixture
def seq_model(seq_graph):
    return random_cpts(seq_graph, seed=7)


@pytest.fixture
def med_model(med_graph):
    return random_cpts(med_graph, seed=11)


@pytest.fixture
def confounded_model(confounded_graph):
    return random_cpts(confounded_graph, seed=3)


@pytest.fixture
def confounded_model_observed(confounded_graph_observed):
    return random_cpts(confounded_graph_observed, seed=3)


@pytest.fixture
def chain_model():
    """``A -> B -> C`` with hand-written CPTs."""
    dag = graph_from_edges(["A", "B", "C"], [("A", "B"), ("B", "C")])
    cards = {"A": 2, "B": 2, "C": 2}
    variables = [Variable(name=name, card=2) for name in ("A", "B", "C")]
    cpts = [
        Cpt.from_rows("A", [], [0.6, 0.4], cards),
        Cpt.from_rows("B", ["A"], [[0.9, 0.1], [0.2, 0.8]], cards),
        Cpt.from_rows("C", ["B"], [[0.7, 0.3], [0.25, 0.75]], cards),
    ]
    return Model.build(variables, dag.edges, cpts)
