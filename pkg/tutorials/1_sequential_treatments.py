# %% [markdown]
"""
# 1. Sequential treatments

This tutorial shows how to decide whether the effect of a plan of
two successive interventions can be computed from observational data,
and how to evaluate the identifying formula.

The graph has a first treatment `X`, a covariate `V` observed after it,
a second treatment `Z` and a response `Y`.
"""

# %pip install regimecalc

# %%
import logging
import sys
from importlib import reload

from regimecalc.graph import d_separated, to_dot
from regimecalc.identify import (
    CausalQuery,
    EffectKind,
    SequentialStep,
    compare_with_oracle,
    identify_query,
)
from regimecalc.regimes import (
    AtomicRegime,
    ConditionalRegime,
    influence_diagram,
)
from regimecalc.utils.reference_models import random_cpts, sequential_graph

reload(logging)
logging.basicConfig(stream=sys.stdout, level=logging.INFO, format="")
# fix jupyter logs display

# %% [markdown]
"""
A model is a graph plus one conditional probability table per variable.
Here the tables are drawn at random with a fixed seed.
"""

# %%
model = random_cpts(sequential_graph(), seed=7)
print(to_dot(model.dag, name="sequential"))

# %% [markdown]
"""
Interventions are represented by regime indicators: an extra parent
`sigma_Z` of `Z` whose value says how `Z` is generated.
Identification questions become d-separation questions on the graph
augmented with these indicators.
"""

# %%
diagram = influence_diagram(model.dag, {"Z": AtomicRegime(value=1)})
print(diagram.parents("Z"))
print(d_separated(diagram, ["Y"], ["sigma_Z"], ["X", "V", "Z"]))

# %% [markdown]
"""
A sequential query lists the interventions in temporal order.
Covariate blocks that are left unset are searched for;
the result carries the formula and the blocks that were used.
"""

# %%
query = CausalQuery(
    kind=EffectKind.SEQ,
    response="Y",
    steps=[
        SequentialStep(target="X", regime=AtomicRegime(value=1)),
        SequentialStep(target="Z", regime=AtomicRegime(value=0)),
    ],
)
result = identify_query(model.observational_view(), query)
print(result.formula, result.notes)
print(f"E(Y) under the plan: {result.value:.4f}")

# %% [markdown]
"""
The second treatment may also depend on what was observed before it.
Here `Z` copies the value of `V`.
"""

# %%
dynamic = query.model_copy(
    update={
        "steps": (
            query.steps[0],
            SequentialStep(
                target="Z",
                regime=ConditionalRegime(
                    cond_set=("V",), decision=((0, 0), (1, 1))
                ),
            ),
        )
    }
)
report = compare_with_oracle(model, dynamic)
print(report.identified.formula)
print(f"deviation from the truth: {report.effect_deviation:.2e}")
assert report.within_tolerance

# %% [markdown]
"""
If `V` is not observed, the plan is no longer identified.
The witness is an open path showing which condition fails.
"""

# %%
hidden = random_cpts(sequential_graph(latent_v=True), seed=7)
failed = identify_query(hidden.observational_view(), query)
print(failed.verdict.value, failed.witness.condition.value, failed.witness.path)
assert failed.witness.recheck()
