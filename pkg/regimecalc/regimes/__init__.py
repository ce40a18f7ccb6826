"""
This module defines the intervention regimes a regime indicator can take,
the CPTs they induce and the graph surgery that builds the check diagrams.
"""

from regimecalc.regimes.types import (
    AtomicRegime,
    ConditionalRegime,
    IdleRegime,
    MediatorRegime,
    NaturalRegimeSpec,
    RandomRegime,
    Regime,
    RegimeError,
    RegimeType,
    regime_cpt,
)
from regimecalc.regimes.surgery import influence_diagram, regime_parents, surgery
from regimecalc.regimes.natural import (
    ObservationalSource,
    OracleSource,
    check_natural_spec,
    natural_regime,
    observational_mediator_table,
    oracle_mediator_table,
)
