import logging

import pytest

from regimecalc.identify import CausalQuery, Condition, EffectKind, InvalidRoleError, Verdict, identify_query
from regimecalc.identify import engine
from regimecalc.model import intervention_distribution
from regimecalc.regimes import AtomicRegime, ConditionalRegime, RandomRegime


def query(kind, **kwargs):
    fields = dict(kind=kind, treatment="X", response="Y", x=1, x_star=0)
    return CausalQuery.model_validate({**fields, **kwargs})


@pytest.mark.parametrize(
    "kind,extra",
    [
        (EffectKind.ACE, {}),
        (EffectKind.CDE, {"mediator": "Z", "z": 1}),
        (EffectKind.CDE, {"mediator": "Z", "mediator_regime": {"type": "atomic", "value": 0}}),
        (EffectKind.SDE, {"mediator": "Z", "mediator_regime": {"type": "random", "table": [0.4, 0.6]}}),
        (EffectKind.NDE, {"mediator": "Z"}),
        (EffectKind.NIE, {"mediator": "Z"}),
    ],
)
def test_dispatch(med_model, kind, extra):
    result = identify_query(med_model.observational_view(), query(kind, **extra))
    assert result.identified and result.verdict == Verdict.IDENTIFIED
    assert result.formula


def test_regime_ace(confounded_model_observed):
    m = confounded_model_observed
    regime = ConditionalRegime(cond_set=("U1",), decision=((0, 1), (1, 0)))
    result = identify_query(
        m.observational_view(), CausalQuery(kind=EffectKind.ACE, treatment="X", response="Y", treatment_regime=regime)
    )
    assert result.roles.c == ("U1",)
    assert result.formula == ("p(y|x,u1)", "p(u1)", "1[x=a(u1)]")
    truth = intervention_distribution(m, {"X": regime}, ["Y"])
    assert result.value == pytest.approx(truth.expectation(), abs=1e-12)


def test_regime_ace_not_identified(confounded_model):
    coin = RandomRegime(table=(0.5, 0.5))
    result = identify_query(
        confounded_model.observational_view(),
        CausalQuery(kind=EffectKind.ACE, treatment="X", response="Y", treatment_regime=coin),
    )
    assert result.verdict == Verdict.NOT_IDENTIFIED
    assert result.witness.recheck()


def test_roles_without_search(confounded_model_observed):
    view = confounded_model_observed.observational_view()
    assert not identify_query(view, query(EffectKind.ACE, auto_search=False)).identified
    result = identify_query(view, query(EffectKind.ACE, auto_search=False, roles={"C": ["U1"]}))
    assert result.identified and result.roles.c == ("U1",)


@pytest.mark.parametrize(
    "kind,extra",
    [
        (EffectKind.ACE, {"roles": {"C": ["U1"]}}),
        (EffectKind.CDE, {"mediator": "Z", "z": 1, "roles": {"L1": ["U2"]}}),
        (EffectKind.NDE, {"mediator": "Z", "roles": {"W": ["U2"], "S": ["U1"]}}),
    ],
)
def test_latent_roles_are_not_identified(confounded_model, log_event_catcher, kind, extra):
    logs = log_event_catcher(engine.logger, level=logging.WARNING)
    result = identify_query(confounded_model.observational_view(), query(kind, **extra))
    assert result.verdict == Verdict.NOT_IDENTIFIED
    assert result.witness.condition == Condition.OBSERVABLE_ROLES
    assert set(result.witness.nodes) <= {"U1", "U2"}
    assert "latent" in result.notes[0]
    assert len(logs) == 1


def test_sde_with_treatment_strata(stratified_graph):
    from regimecalc.utils.reference_models import random_cpts

    view = random_cpts(stratified_graph, seed=1).observational_view()
    regime = {"type": "random", "given": ["X"], "table": [[0.5, 0.5], [0.1, 0.9]]}
    with pytest.raises(InvalidRoleError):
        identify_query(view, query(EffectKind.SDE, mediator="Z", mediator_regime=regime))


def test_sequential_query(seq_model):
    result = identify_query(
        seq_model.observational_view(),
        CausalQuery(
            kind=EffectKind.SEQ,
            response="Y",
            steps=[
                {"target": "X", "regime": AtomicRegime(value=1)},
                {"target": "Z", "regime": {"type": "random", "given": ["X", "V"], "table": [[0.5, 0.5]] * 4}},
            ],
        ),
    )
    assert result.identified
    assert result.formula == ("p(y|x,z,v)", "p(v|x)", "p~(z|x,v)")
