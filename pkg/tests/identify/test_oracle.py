import numpy as np
import pytest

from regimecalc.identify import (
    GRAPHICAL_NECESSARY,
    CausalQuery,
    EffectKind,
    NotDefined,
    SequentialStep,
    compare_with_oracle,
    estimate_randomized_studies,
    experimental_identify,
    natural_effect_oracle,
    oracle_effect,
    randomized_study_tables,
)
from regimecalc.model import Table
from regimecalc.regimes import AtomicRegime, RandomRegime
from regimecalc.utils.reference_models import random_cpts, random_dag


def effect_queries(names):
    x, z, y = names
    base = dict(treatment=x, response=y, x=1, x_star=0)
    return [
        CausalQuery(kind=EffectKind.ACE, **base),
        CausalQuery(kind=EffectKind.CDE, mediator=z, z=0, **base),
        CausalQuery(kind=EffectKind.SDE, mediator=z, mediator_regime=RandomRegime(table=(0.3, 0.7)), **base),
        CausalQuery(kind=EffectKind.NDE, mediator=z, **base),
        CausalQuery(kind=EffectKind.NIE, mediator=z, **base),
        CausalQuery(
            kind=EffectKind.SEQ,
            response=y,
            steps=(
                SequentialStep(target=x, regime=AtomicRegime(value=1)),
                SequentialStep(target=z, regime=AtomicRegime(value=0)),
            ),
        ),
    ]


def test_identified_values_match_oracle():
    rng = np.random.default_rng(17)
    compared = skipped = 0
    for seed in range(200):
        dag = random_dag(int(rng.integers(3, 7)), seed, edge_probability=0.5, latent_probability=0.2)
        observable = dag.observable_nodes
        if len(observable) < 3:
            continue
        names = sorted(str(name) for name in rng.choice(observable, size=3, replace=False))
        model = random_cpts(dag, seed)
        for query in effect_queries(names):
            report = compare_with_oracle(model, query)
            if report.skipped:
                skipped += 1
                assert report.identified.witness.recheck(), (dag.edges, query)
                continue
            compared += 1
            if GRAPHICAL_NECESSARY in report.identified.notes:
                continue
            assert report.within_tolerance, (dag.edges, dag.latent_nodes, query, report.to_output())
    assert compared > 100 and skipped > 0


def test_report(confounded_model_observed, confounded_model):
    query = CausalQuery(kind=EffectKind.ACE, treatment="X", response="Y", x=1, x_star=0)
    report = compare_with_oracle(confounded_model_observed, query)
    assert not report.skipped and report.within_tolerance
    output = report.to_output()
    assert output["identified"]["roles"] == {"C": ["U1"]}
    assert output["effect_deviation"] < 1e-12

    skipped = compare_with_oracle(confounded_model, query)
    assert skipped.skipped and skipped.within_tolerance
    assert skipped.to_output()["oracle_value"] is None


def test_oracle_effect_of_every_kind(confounded_model):
    query = CausalQuery(kind=EffectKind.NDE, treatment="X", mediator="Z", response="Y", x=1, x_star=0)
    truth = oracle_effect(confounded_model, query)
    assert truth.w == ("U2",)
    expected = [natural_effect_oracle(confounded_model, "X", "Z", "Y", x, 0, ("U2",)) for x in (1, 0)]
    assert truth.value == pytest.approx(expected[0].expectation() - expected[1].expectation(), abs=1e-12)

    coin = RandomRegime(table=(0.5, 0.5))
    regime_ace = CausalQuery(kind=EffectKind.ACE, treatment="X", response="Y", treatment_regime=coin)
    assert 0 <= oracle_effect(confounded_model, regime_ace).value <= 1


def test_oracle_without_strata(seq_model):
    query = CausalQuery(kind=EffectKind.NDE, treatment="X", mediator="Z", response="Y", x=1, x_star=0)
    with pytest.raises(NotDefined):
        oracle_effect(seq_model, query)


@pytest.mark.parametrize(
    "fixture,w", [("med_model", ()), ("confounded_model", ("U2",)), ("confounded_model", ("U1", "U2"))]
)
def test_experimental_identification(request, fixture, w):
    m = request.getfixturevalue(fixture)
    for x, x_star in [(1, 0), (0, 1), (1, 1)]:
        tables = randomized_study_tables(m, "X", "Z", "Y", w, x, x_star)
        recombined = experimental_identify(*tables)
        truth = natural_effect_oracle(m, "X", "Z", "Y", x, x_star, w)
        assert recombined.max_abs_difference(truth) < 1e-12


def test_experimental_identify_checks_scopes(med_model):
    py_wz, pz_w, pw = randomized_study_tables(med_model, "X", "Z", "Y", (), 1, 0)
    with pytest.raises(ValueError, match="do not fit together"):
        experimental_identify(py_wz, py_wz, pw)
    wrong = Table(scope=("V", "Z"), values=np.full((2, 2), 0.25))
    with pytest.raises(ValueError, match="do not fit together|Expected tables"):
        experimental_identify(wrong, pz_w, pw)


@pytest.mark.slow
@pytest.mark.parametrize("fixture,w", [("med_model", ()), ("confounded_model", ("U2",))])
def test_simulated_randomized_studies(request, fixture, w):
    m = request.getfixturevalue(fixture)
    tables = estimate_randomized_studies(m, "X", "Z", "Y", w, 1, 0, n=100_000, seed=3)
    estimate = experimental_identify(*tables)
    truth = natural_effect_oracle(m, "X", "Z", "Y", 1, 0, w)
    assert estimate.max_abs_difference(truth) < 0.02
