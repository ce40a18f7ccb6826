import logging

import numpy as np
import pandas as pd
import pytest

from regimecalc.model import (
    LATENT_ATTR,
    LatentVariableError,
    Variable,
    empirical_distribution,
    fit_cpts,
    fit_observational_view,
    sample,
)
from regimecalc.model import sampling
from regimecalc.utils.reference_models import graph_from_edges


def test_sample_is_reproducible(seq_model):
    first, second = sample(seq_model, 500, seed=1), sample(seq_model, 500, seed=1)
    pd.testing.assert_frame_equal(first, second)
    assert not first.equals(sample(seq_model, 500, seed=2))
    assert list(first.columns) == ["X", "V", "Z", "Y"]
    assert first.attrs[LATENT_ATTR] == []


def test_sample_flags_latent_columns(confounded_model):
    data = sample(confounded_model, 10, seed=0)
    assert data.attrs[LATENT_ATTR] == ["U1", "U2"]
    assert set(data.columns) == {"U1", "U2", "X", "V", "Z", "Y"}


def test_sample_size_must_be_positive(seq_model):
    with pytest.raises(ValueError, match="must be positive"):
        sample(seq_model, 0, seed=0)


def test_sample_frequencies(chain_model):
    data = sample(chain_model, 100_000, seed=3)
    frequencies = empirical_distribution(data, ["B"], chain_model.cards)
    assert frequencies.max_abs_difference(chain_model.joint.marginalize(["B"])) < 0.01


def test_fit_cpts_recovers_model(chain_model):
    data = sample(chain_model, 100_000, seed=4)
    fitted = fit_cpts(data, chain_model.dag)
    for name in ("A", "B", "C"):
        assert abs(fitted.cpts[name].table - chain_model.cpts[name].table).max() < 0.02


def test_fit_cpts_fills_empty_strata(chain_model, log_event_catcher):
    logs = log_event_catcher(sampling.logger, level=logging.WARNING)
    data = pd.DataFrame({"A": [0, 0, 0], "B": [0, 1, 1], "C": [1, 0, 1]})
    variables = {variable.name: variable for variable in chain_model.variables}

    fitted = fit_cpts(data, chain_model.dag, variables=variables)

    np.testing.assert_allclose(fitted.cpts["B"].rows(), [[1 / 3, 2 / 3], [0.5, 0.5]])
    assert len(logs) == 1
    assert "no data" in logs[0].getMessage()


def test_fit_cpts_smoothing(chain_model):
    data = pd.DataFrame({"A": [0, 0, 0], "B": [0, 1, 1], "C": [1, 0, 1]})
    fitted = fit_cpts(data, chain_model.dag, smoothing=1.0)
    np.testing.assert_allclose(fitted.cpts["A"].rows(), [[0.8, 0.2]])
    with pytest.raises(ValueError, match="nonnegative"):
        fit_cpts(data, chain_model.dag, smoothing=-1.0)


@pytest.mark.parametrize(
    "data,msg",
    [
        (pd.DataFrame({"A": [0], "B": [0]}), "no column"),
        (pd.DataFrame({"A": [0], "B": [0], "C": [2]}), "outside"),
    ],
)
def test_fit_cpts_rejects_bad_data(chain_model, data, msg):
    variables = {variable.name: variable for variable in chain_model.variables}
    with pytest.raises(ValueError, match=msg):
        fit_cpts(data, chain_model.dag, variables=variables)


def test_fit_cpts_rejects_latent_graphs(confounded_model):
    data = sample(confounded_model, 100, seed=0)
    with pytest.raises(LatentVariableError, match="latent"):
        fit_cpts(data, confounded_model.dag)


def test_fit_observational_view_with_latents(confounded_model):
    data = sample(confounded_model, 200_000, seed=5)
    view = fit_observational_view(data, confounded_model.dag)
    truth = confounded_model.observational_view()
    assert view.joint.scope == truth.joint.scope
    assert view.joint.max_abs_difference(truth.joint) < 0.01


def test_fit_observational_view_uses_known_variables():
    dag = graph_from_edges(["A", "B"], [("A", "B")])
    data = pd.DataFrame({"A": [0, 1], "B": [0, 0]})
    variables = {"A": Variable(name="A", card=2), "B": Variable(name="B", card=3)}
    view = fit_observational_view(data, dag, variables=variables)
    assert view.cards == {"A": 2, "B": 3}


def test_empirical_distribution_errors():
    with pytest.raises(ValueError, match="empty"):
        empirical_distribution(pd.DataFrame({"A": []}), ["A"], {"A": 2})
    with pytest.raises(ValueError, match="outside"):
        empirical_distribution(pd.DataFrame({"A": [0, 2]}), ["A"], {"A": 2})
