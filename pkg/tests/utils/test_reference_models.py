import numpy as np
import pytest

from regimecalc.graph import topological_order
from regimecalc.utils.reference_models import (
    REFERENCE_GRAPHS,
    additive_mediation_model,
    interaction_model,
    random_cpts,
    random_dag,
    reference_model,
)


@pytest.mark.parametrize("name", sorted(REFERENCE_GRAPHS))
def test_reference_models(name):
    m = reference_model(name, seed=0)
    graph = REFERENCE_GRAPHS[name]()
    assert m.dag.names == graph.names and set(m.dag.edges) == set(graph.edges)
    assert m.dag.latent_nodes == graph.latent_nodes
    assert m.joint.total() == pytest.approx(1.0)
    assert reference_model(name, seed=0).joint.max_abs_difference(m.joint) == 0.0


def test_unknown_reference_model():
    with pytest.raises(KeyError, match="Unknown reference graph"):
        reference_model("nope", seed=0)


def test_confounded_graph_latent_flags():
    assert REFERENCE_GRAPHS["confounded-mediation"]().latent_nodes == ["U1", "U2"]
    assert REFERENCE_GRAPHS["confounded-mediation-observed"]().latent_nodes == []


@pytest.mark.parametrize("seed", range(5))
def test_random_dag(seed):
    dag = random_dag(6, seed, edge_probability=0.4, latent_probability=0.3)
    assert dag.names == list("ABCDEF")
    assert all(parent < child for parent, child in dag.edges)
    assert topological_order(dag) == dag.names
    assert random_dag(6, seed, edge_probability=0.4, latent_probability=0.3).edges == dag.edges


@pytest.mark.parametrize("n", [0, 27])
def test_random_dag_size(n):
    with pytest.raises(ValueError, match="between 1 and 26"):
        random_dag(n, 0)


def test_random_cpts_cardinalities():
    m = random_cpts(random_dag(3, 1, edge_probability=1.0), seed=2, cards={"B": 3})
    assert m.cards == {"A": 2, "B": 3, "C": 2}
    assert m.cpts["C"].table.shape == (2, 3, 2)


def test_additive_model_response():
    m = additive_mediation_model(seed=0)
    cpt = m.cpts["Y"]
    assert cpt.parents == ("X", "Z", "V")
    assert np.allclose(cpt.table[1, 1, 1], [0.15, 0.85])


@pytest.mark.parametrize("mediated", [True, False])
def test_interaction_model(mediated):
    m = interaction_model(seed=0, mediated=mediated)
    assert np.allclose(m.cpts["Y"].table[:, :, 1], [[0.1, 0.1], [0.1, 0.4]])
    assert (("X", "Z") in m.dag.edges) == mediated
