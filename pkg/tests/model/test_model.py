import numpy as np
import pytest
from pydantic import ValidationError

from regimecalc.model import (
    Cpt,
    LatentVariableError,
    Model,
    PositivityViolation,
    Variable,
    conditional,
    expectation,
    intervention_distribution,
    joint_prob,
    marginal,
    oracle_intervene,
)
from regimecalc.regimes import AtomicRegime, ConditionalRegime, IdleRegime, RandomRegime, RegimeError
from regimecalc.utils.reference_models import random_cpts


@pytest.mark.parametrize(
    "kwargs,msg",
    [
        ({"name": "A", "card": 1}, "at least 2"),
        ({"name": "A", "card": 2, "values": (1.0,)}, "needs 2 numeric values"),
        ({"name": "A", "card": 2, "labels": ("no", "no")}, "must be distinct"),
    ],
)
def test_invalid_variables(kwargs, msg):
    with pytest.raises(ValidationError, match=msg):
        Variable(**kwargs)


def test_variable_numeric_values():
    assert Variable(name="A", card=3).numeric.tolist() == [0.0, 1.0, 2.0]
    assert Variable(name="A", cardinality=2, values=(-1.0, 1.0)).numeric.tolist() == [-1.0, 1.0]


@pytest.mark.parametrize(
    "kwargs,msg",
    [
        ({"target": "A", "table": [0.5, 0.6]}, "do not sum to 1"),
        ({"target": "A", "parents": ("A",), "table": [[0.5, 0.5], [0.5, 0.5]]}, "cannot list it as a parent"),
        ({"target": "A", "parents": ("B",), "table": [0.5, 0.5]}, "must have 2 axes"),
        ({"target": "A", "table": [1.5, -0.5]}, "negative"),
    ],
)
def test_invalid_cpts(kwargs, msg):
    with pytest.raises(ValidationError, match=msg):
        Cpt(**kwargs)


def test_cpt_rows_round_trip():
    cards = {"A": 2, "B": 3}
    rows = [[0.2, 0.3, 0.5], [0.1, 0.1, 0.8]]
    cpt = Cpt.from_rows("B", ["A"], rows, cards)
    assert cpt.table.shape == (2, 3)
    assert cpt.rows() == rows
    assert cpt.cards == cards
    with pytest.raises(ValueError, match="needs 6 entries"):
        Cpt.from_rows("B", ["A"], [0.5, 0.5], cards)


def test_model_consistency(chain_model):
    variables, edges = chain_model.variables, chain_model.dag.edges
    cpts = list(chain_model.cpts.values())
    with pytest.raises(ValidationError, match="missing"):
        Model.build(variables, edges, cpts[:2])
    wrong_parent = Cpt(target="C", parents=("A",), table=[[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(ValidationError, match="differ from graph parents"):
        Model.build(variables, edges, [*cpts[:2], wrong_parent])
    wide = Cpt(target="A", table=[0.2, 0.3, 0.5])
    with pytest.raises(ValidationError, match="has 3 values"):
        Model.build(variables, edges, [wide, *cpts[1:]])


def test_joint_and_marginals(chain_model):
    assert joint_prob(chain_model, {"A": 1, "B": 1, "C": 0}) == pytest.approx(0.4 * 0.8 * 0.25)
    assert chain_model.joint.total() == pytest.approx(1.0)
    assert marginal(chain_model, ["B"]).entries() == pytest.approx([0.62, 0.38])
    assert marginal(chain_model, ["C"]).entries() == pytest.approx([0.529, 0.471])
    assert conditional(chain_model, ["C"], {"A": 1}).entries() == pytest.approx([0.34, 0.66])
    assert expectation(marginal(chain_model, ["C"])) == pytest.approx(0.471)
    with pytest.raises(ValueError, match="misses"):
        joint_prob(chain_model, {"A": 1})


def test_conditional_on_impossible_event(chain_model):
    degenerate = oracle_intervene(chain_model, {"A": AtomicRegime(value=0)})
    with pytest.raises(PositivityViolation, match="is zero"):
        conditional(degenerate, ["C"], {"A": 1})


def test_oracle_intervene(chain_model):
    intervened = oracle_intervene(chain_model, {"B": AtomicRegime(value=1)})
    assert intervened.dag.parents("B") == []
    assert marginal(intervened, ["C"]).entries() == pytest.approx([0.25, 0.75])
    assert marginal(intervened, ["A"]).entries() == pytest.approx([0.6, 0.4])
    assert intervened.cpts["A"] is chain_model.cpts["A"]
    assert chain_model.dag.parents("B") == ["A"]


def test_idle_plan_is_observational(chain_model):
    intervened = oracle_intervene(chain_model, {"B": IdleRegime()})
    assert intervened.joint.max_abs_difference(chain_model.joint) == 0.0


def test_conditional_and_random_regimes(chain_model):
    # B copies A
    copy = ConditionalRegime(cond_set=("A",), decision=((0, 0), (1, 1)))
    distribution = intervention_distribution(chain_model, {"B": copy}, ["C"])
    assert distribution.entries() == pytest.approx([0.6 * 0.7 + 0.4 * 0.25, 0.6 * 0.3 + 0.4 * 0.75])

    coin = RandomRegime(table=(0.5, 0.5))
    distribution = intervention_distribution(chain_model, {"B": coin}, ["C"])
    assert distribution.entries() == pytest.approx([0.475, 0.525])


def test_regime_on_descendant_is_rejected(chain_model):
    backwards = ConditionalRegime(cond_set=("C",), decision=((0, 0), (1, 1)))
    with pytest.raises(RegimeError, match="invalid graph"):
        oracle_intervene(chain_model, {"B": backwards})
    with pytest.raises(RegimeError, match="not a variable"):
        oracle_intervene(chain_model, {"Q": AtomicRegime(value=0)})


def test_observational_view_hides_latent(confounded_model):
    view = confounded_model.observational_view()
    assert view.joint.scope == ("X", "V", "Z", "Y")
    assert view.joint.max_abs_difference(confounded_model.joint.marginalize(["X", "V", "Z", "Y"])) < 1e-15
    with pytest.raises(LatentVariableError, match="latent"):
        view.variable("U1")
    with pytest.raises(LatentVariableError, match="cannot be used observationally"):
        view.factor(["Y"], ["U2"])


def test_observational_factor(chain_model):
    view = chain_model.observational_view()
    factor = view.factor(["C"], ["B"])
    assert factor.scope == ("B", "C")
    assert np.allclose(factor.values, chain_model.cpts["C"].table)


def test_random_cpts_are_seeded(seq_graph):
    first, second = random_cpts(seq_graph, seed=3), random_cpts(seq_graph, seed=3)
    assert first.joint.max_abs_difference(second.joint) == 0.0
    assert random_cpts(seq_graph, seed=4).joint.max_abs_difference(first.joint) > 0.0
