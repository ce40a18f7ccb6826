import pytest

from regimecalc.graph import sigma
from regimecalc.regimes import (
    AtomicRegime,
    ConditionalRegime,
    IdleRegime,
    NaturalRegimeSpec,
    RandomRegime,
    RegimeError,
    influence_diagram,
    regime_parents,
    surgery,
)
from regimecalc.utils.reference_models import graph_from_edges


def test_atomic_surgery_cuts_arrows(seq_graph):
    surgered = surgery(seq_graph, {"Z": AtomicRegime(value=1)})
    assert surgered.parents("Z") == ["sigma_Z"]
    assert surgered.regime_nodes == [sigma("Z")]
    assert seq_graph.parents("Z") == ["V", "X"]


def test_conditional_surgery_rewires(seq_graph):
    regime = ConditionalRegime(cond_set=("V",), decision=((0, 0), (1, 1)))
    assert surgery(seq_graph, {"Z": regime}).parents("Z") == ["V", "sigma_Z"]


def test_idle_surgery_only_adds_indicator(seq_graph):
    surgered = surgery(seq_graph, {"X": IdleRegime(), "Z": IdleRegime()})
    assert surgered.parents("Z") == ["V", "X", "sigma_Z"]
    assert surgered.names[-2:] == ["sigma_X", "sigma_Z"]
    assert set(surgered.without_regime_nodes().edges) == set(seq_graph.edges)


def test_influence_diagram_unions_parents(seq_graph):
    regime = RandomRegime(cond_set=("V",), table=((0.5, 0.5), (0.2, 0.8)))
    assert influence_diagram(seq_graph, {"Z": regime}).parents("Z") == ["V", "X", "sigma_Z"]
    assert influence_diagram(seq_graph, {"Z": regime}, include_idle=False).parents("Z") == ["V", "sigma_Z"]
    stratified = influence_diagram(
        graph_from_edges(["W", "X", "Z"], [("X", "Z")]), {"Z": [IdleRegime(), NaturalRegimeSpec(w=("W",))]}
    )
    assert stratified.parents("Z") == ["W", "X", "sigma_Z"]


@pytest.mark.parametrize(
    "regime,msg",
    [
        (ConditionalRegime(cond_set=("Y",), decision=((0, 0), (1, 1))), "its descendant"),
        (ConditionalRegime(cond_set=("Z",), decision=((0, 0), (1, 1))), "its own target"),
        (ConditionalRegime(cond_set=("Q",), decision=((0, 0), (1, 1))), "unknown node"),
    ],
)
def test_invalid_conditioning_sets(seq_graph, regime, msg):
    with pytest.raises(RegimeError, match=msg):
        regime_parents(seq_graph, "Z", regime)


def test_invalid_targets(seq_graph):
    surgered = surgery(seq_graph, {"Z": IdleRegime()})
    with pytest.raises(RegimeError, match="already has a regime indicator"):
        surgery(surgered, {"Z": IdleRegime()})
    with pytest.raises(RegimeError, match="not a chance variable"):
        surgery(surgered, {sigma("Z"): IdleRegime()})
    with pytest.raises(RegimeError, match="regime indicators"):
        regime_parents(surgered, "Y", ConditionalRegime(cond_set=(sigma("Z"),), decision=((0, 0), (1, 1))))


@pytest.mark.parametrize(
    "plan",
    [
        {"X": IdleRegime()},
        {"X": AtomicRegime(value=0), "Z": AtomicRegime(value=1)},
        {"Z": RandomRegime(table=(0.5, 0.5))},
    ],
)
def test_every_target_gets_exactly_one_indicator(seq_graph, plan):
    surgered = surgery(seq_graph, plan)
    assert surgered.regime_nodes == [sigma(target) for target in sorted(plan)]
    for target in plan:
        assert surgered.children(sigma(target)) == [target]
        assert surgered.parents(sigma(target)) == []
