# flake8: noqa: F401

from importlib.metadata import version


__version__ = version(__name__)


from regimecalc.graph import Dag
from regimecalc.model import Model
from regimecalc.identify import CausalQuery, EffectKind, IdentificationResult, identify_query
