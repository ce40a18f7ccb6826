# %% [markdown]
"""
# 2. Natural direct effects

This tutorial shows how the natural direct and indirect effects of a treatment
are identified, and what can be learned when some confounders are hidden.

In the natural regime the mediator is drawn from the distribution it would have
under the baseline treatment, within strata of a covariate set `W`.
"""

# %pip install regimecalc

# %%
import logging
import sys
from importlib import reload

from regimecalc.identify import (
    CausalQuery,
    EffectKind,
    compare_with_oracle,
    experimental_identify,
    identify_query,
    randomized_study_tables,
)
from regimecalc.utils.reference_models import (
    confounded_mediation_graph,
    interaction_model,
    random_cpts,
)

reload(logging)
logging.basicConfig(stream=sys.stdout, level=logging.INFO, format="")
# fix jupyter logs display

# %% [markdown]
"""
When treatment and mediator interact, the controlled direct effect
depends on the value the mediator is set to, while the natural direct effect
averages over the mediator's baseline distribution.
"""

# %%
model = interaction_model(seed=0)
view = model.observational_view()
base = dict(treatment="X", mediator="Z", response="Y", x=1, x_star=0)

for z in (0, 1):
    cde = identify_query(view, CausalQuery(kind=EffectKind.CDE, z=z, **base))
    print(f"CDE with Z={z}: {cde.value:.3f}")

nde = identify_query(view, CausalQuery(kind=EffectKind.NDE, **base))
nie = identify_query(view, CausalQuery(kind=EffectKind.NIE, **base))
ace = identify_query(view, CausalQuery(kind=EffectKind.ACE, **base))
print(f"NDE {nde.value:.3f} + NIE {nie.value:.3f} = ACE {ace.value:.3f}")

# %% [markdown]
"""
With observed confounders `U1` and `U2` the roles are searched for:
`W` stratifies the natural regime, `S` adjusts the treatment-mediator effect,
`L1` and `L2` make the response stable under both interventions.
"""

# %%
observed = random_cpts(confounded_mediation_graph(latent=False), seed=3)
nde_query = CausalQuery(kind=EffectKind.NDE, **base)
report = compare_with_oracle(observed, nde_query)
print(report.identified.roles.as_dict())
print(report.identified.formula)
assert report.within_tolerance

# %% [markdown]
"""
When `U1` and `U2` are hidden, the natural regime is only well posed
within strata of a latent variable and the effect is not identified
from observational data.
"""

# %%
hidden = random_cpts(confounded_mediation_graph(latent=True), seed=3)
failed = identify_query(hidden.observational_view(), nde_query)
print(failed.verdict.value, failed.notes)

# %% [markdown]
"""
Two randomized studies still suffice: one randomizing treatment and mediator,
one randomizing the treatment only.
Their results are recombined within strata of `W`.
"""

# %%
tables = randomized_study_tables(hidden, "X", "Z", "Y", ("U2",), 1, 0)
print(experimental_identify(*tables).entries())
