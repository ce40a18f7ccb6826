import pytest

from regimecalc.identify import (
    InvalidRoleError,
    NotDefined,
    NotIdentified,
    Roles,
    search_back_door,
    search_l,
    search_nde_roles,
    search_s,
    search_sequential_blocks,
    search_w,
)
from regimecalc.identify.search import candidates, subsets
from regimecalc.regimes import AtomicRegime, ConditionalRegime, RandomRegime
from regimecalc.utils.reference_models import sequential_graph

ATOMIC = AtomicRegime(value=1)


def test_subsets_order():
    assert list(subsets(["B", "A", "C"], 2)) == [
        (),
        ("A",),
        ("B",),
        ("C",),
        ("A", "B"),
        ("A", "C"),
        ("B", "C"),
    ]
    assert list(subsets(["A"], 0)) == [()]


def test_candidates(confounded_graph):
    assert candidates(confounded_graph, ["X", "Y"]) == ["V", "Z"]
    assert candidates(confounded_graph, ["X", "Y"], observable=False) == ["U1", "U2", "V", "Z"]


def test_search_back_door(seq_graph, confounded_graph_observed, confounded_graph):
    assert search_back_door(seq_graph, "X", "Y") == ()
    assert search_back_door(confounded_graph_observed, "X", "Y") == ("U1",)
    with pytest.raises(NotIdentified, match="blocks the back-door paths") as error:
        search_back_door(confounded_graph, "X", "Y")
    assert error.value.witness.recheck()
    with pytest.raises(NotIdentified):
        search_back_door(confounded_graph_observed, "X", "Y", max_size=0)


def test_search_sequential_blocks(seq_graph):
    assert search_sequential_blocks(seq_graph, ["X", "Z"], [ATOMIC, ATOMIC], "Y", [None, None]) == ((), ("V",))
    assert search_sequential_blocks(seq_graph, ["X", "Z"], [ATOMIC, ATOMIC], "Y", [(), None]) == ((), ("V",))


def test_search_sequential_blocks_places_regime_covariates(stratified_graph):
    regime = RandomRegime(cond_set=("W",), table=((0.5, 0.5), (0.2, 0.8)))
    blocks = search_sequential_blocks(stratified_graph, ["X", "Z"], [ATOMIC, regime], "Y", [None, None])
    assert blocks == (("W",), ())


def test_search_sequential_blocks_with_latent_covariate():
    with pytest.raises(NotIdentified, match="No assignment") as error:
        search_sequential_blocks(sequential_graph(latent_v=True), ["X", "Z"], [ATOMIC, ATOMIC], "Y", [None, None])
    assert error.value.witness.recheck()


def test_search_sequential_blocks_weak_condition(confounded_graph):
    coin = RandomRegime(table=(0.5, 0.5))
    assert search_sequential_blocks(confounded_graph, ["X", "Z"], [ATOMIC, coin], "Y", [None, None]) == ((), ("V",))


def test_search_sequential_blocks_untimely_regime(seq_graph):
    follow_v = ConditionalRegime(cond_set=("V",), decision=((0, 0), (1, 1)))
    with pytest.raises(InvalidRoleError, match="cannot be observed in time"):
        search_sequential_blocks(seq_graph, ["X", "Z"], [ATOMIC, follow_v], "Y", [None, ()])


def test_search_w(med_graph, confounded_graph_observed, confounded_graph, seq_graph):
    assert search_w(med_graph, "X", "Z", "Y") == ()
    assert search_w(confounded_graph_observed, "X", "Z", "Y") == ("U2",)
    with pytest.raises(NotIdentified, match="latent variables") as error:
        search_w(confounded_graph, "X", "Z", "Y")
    assert error.value.witness.recheck()
    with pytest.raises(NotDefined, match="not defined") as error:
        search_w(seq_graph, "X", "Z", "Y")
    assert error.value.witness.recheck()


def test_search_s_and_l(confounded_graph_observed):
    g = confounded_graph_observed
    assert search_s(g, "X", "Z", "Y", ["U2"]) == ("U1",)
    assert search_l(g, "X", "Z", "Y", ["U2"]) == (("U2",), ())
    assert search_l(g, "X", "Z", "Y", ["U2"], l1=["U1", "U2"]) == (("U1", "U2"), ())
    with pytest.raises(NotIdentified, match="stable under interventions") as error:
        search_l(g, "X", "Z", "Y", ["U2"], l1=["V"])
    assert error.value.witness.recheck()


def test_search_nde_roles(confounded_graph_observed, med_graph, seq_graph):
    roles = search_nde_roles(confounded_graph_observed, "X", "Z", "Y", Roles())
    assert roles == Roles(w=("U2",), s=("U1",), l1=("U2",), l2=())
    assert search_nde_roles(med_graph, "X", "Z", "Y", Roles()) == Roles(w=(), s=(), l1=(), l2=())

    given = search_nde_roles(confounded_graph_observed, "X", "Z", "Y", Roles(w=("U1", "U2")))
    assert given.w == ("U1", "U2") and given.l1 == ("U1", "U2")

    with pytest.raises(NotDefined, match="not well posed") as error:
        search_nde_roles(seq_graph, "X", "Z", "Y", Roles(w=()))
    assert error.value.witness.recheck()
