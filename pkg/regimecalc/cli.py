"""
CLI
---
Implementation of the command-line commands.

Each ``cmd_*`` function takes a validated :py:class:`RunConfig` and returns the exit status
together with the text to print. Exit statuses:

- ``0``: success (the query is identified, the deviation is within tolerance);
- ``2``: the query is not identified or not defined;
- ``1``: any error, including a deviation beyond tolerance.
"""

import argparse
import logging
import os
from enum import Enum, unique
from typing import Any, Dict, List, Optional, Tuple

from omegaconf import OmegaConf
from pydantic import BaseModel, Field, field_validator

from regimecalc.graph.dag import Dag
from regimecalc.graph.dot import to_dot
from regimecalc.graph.separation import d_separated, find_open_path
from regimecalc.identify.engine import identify_query
from regimecalc.identify.errors import IdentificationError
from regimecalc.identify.formulas import DEFAULT_TOLERANCE
from regimecalc.identify.oracle import compare_with_oracle, oracle_effect
from regimecalc.identify.query import IdentificationResult
from regimecalc.identify.search import DEFAULT_MAX_ADJUST_SIZE
from regimecalc.model.model import Model
from regimecalc.model.sampling import fit_observational_view, sample
from regimecalc.regimes.surgery import influence_diagram
from regimecalc.regimes.types import IdleRegime
from regimecalc.utils.reference_models import reference_model
from regimecalc.utils.serialization import dump_json, load_model, load_query, read_dataset, write_dataset, write_text

logger = logging.getLogger(__name__)

TOLERANCE_ENV = "REGIMECALC_TOL"
"""Environment variable overriding :py:attr:`RunConfig.tolerance`."""

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_IDENTIFIED = 2

CommandOutput = Tuple[int, str]


@unique
class Command(str, Enum):
    DSEP = "dsep"
    CHECK = "check"
    EFFECT = "effect"
    ORACLE = "oracle"
    COMPARE = "compare"
    SIMULATE = "simulate"
    ESTIMATE = "estimate"
    EXPORT_DOT = "export-dot"


@unique
class Mode(str, Enum):
    IDENTIFIED = "identified"
    ORACLE = "oracle"
    BOTH = "both"


@unique
class OutputFormat(str, Enum):
    JSON = "json"
    TEXT = "text"
    DOT = "dot"
    CSV = "csv"


class RunConfig(BaseModel, extra="ignore"):
    """
    Settings of one invocation, merged from a config file, the environment and command-line flags.
    """

    command: Command
    model: Optional[str] = None
    """Model file (JSON or YAML)."""
    query: Optional[str] = None
    """Query file."""
    data: Optional[str] = None
    """CSV dataset for ``estimate``."""
    reference: Optional[str] = None
    """Name of a reference graph, used instead of :py:attr:`model`."""
    seed: int = 0
    n: int = 1000
    """Sample size of ``simulate``."""
    smoothing: float = 0.0
    """Additive smoothing of the fitted CPTs."""
    max_adjust_size: int = DEFAULT_MAX_ADJUST_SIZE
    tolerance: float = DEFAULT_TOLERANCE
    mode: Mode = Mode.IDENTIFIED
    out: Optional[str] = None
    """Output file; standard output if unset."""
    format: OutputFormat = OutputFormat.JSON
    truth: bool = False
    """Whether ``estimate`` also reports the error against the model's own CPTs."""
    a: List[str] = Field(default_factory=list)
    b: List[str] = Field(default_factory=list)
    c: List[str] = Field(default_factory=list)
    sigma: List[str] = Field(default_factory=list)
    """Targets that get a regime indicator before ``dsep`` is decided."""
    verbose: bool = False

    @field_validator("n", "max_adjust_size")
    @classmethod
    def validate_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"Value must be at least 1, got {value}.")
        return value

    @field_validator("tolerance")
    @classmethod
    def validate_tolerance(cls, value: float) -> float:
        if value <= 0:
            raise ValueError(f"Tolerance must be positive, got {value}.")
        return value

    @field_validator("smoothing")
    @classmethod
    def validate_smoothing(cls, value: float) -> float:
        if value < 0:
            raise ValueError(f"Smoothing must be nonnegative, got {value}.")
        return value


def make_run_config(parsed_args: argparse.Namespace) -> RunConfig:
    """
    Merge, in increasing priority: the ``--config`` file, :py:data:`TOLERANCE_ENV` and the explicit flags.
    """
    arguments: Dict[str, Any] = {key: value for key, value in vars(parsed_args).items() if value is not None}
    config_file = arguments.pop("config", None)
    file_conf = OmegaConf.load(config_file) if config_file else OmegaConf.create()
    env_conf = OmegaConf.create({"tolerance": float(os.environ[TOLERANCE_ENV])} if TOLERANCE_ENV in os.environ else {})
    cmd_conf = OmegaConf.create(arguments)
    merged = OmegaConf.merge(file_conf, env_conf, cmd_conf)
    return RunConfig.model_validate(OmegaConf.to_container(merged, resolve=True))


def _model(config: RunConfig) -> Model:
    if config.reference is not None:
        return reference_model(config.reference, config.seed)
    if config.model is None:
        raise ValueError("A model file (--model) or a reference graph (--reference) is required.")
    return load_model(config.model)


def _query(config: RunConfig):
    if config.query is None:
        raise ValueError("A query file (--query) is required.")
    return load_query(config.query)


def _render(document: Dict[str, Any], config: RunConfig) -> str:
    if config.format == OutputFormat.TEXT:
        return "".join(f"{key}: {value}\n" for key, value in document.items())
    return dump_json(document)


def _emit(text: str, config: RunConfig) -> str:
    """Write ``text`` to :py:attr:`RunConfig.out` if set; return what remains to print."""
    if config.out is None:
        return text
    write_text(text, config.out)
    return ""


def _result_status(result: IdentificationResult) -> int:
    return EXIT_OK if result.identified else EXIT_NOT_IDENTIFIED


def cmd_dsep(config: RunConfig) -> CommandOutput:
    """Decide ``A ⊥⊥ B | C``, optionally after adding regime indicators for :py:attr:`RunConfig.sigma`."""
    dag: Dag = _model(config).dag
    if config.sigma:
        dag = influence_diagram(dag, {target: IdleRegime() for target in config.sigma})
    separated = d_separated(dag, config.a, config.b, config.c)
    path = None if separated else find_open_path(dag, config.a, config.b, config.c)
    return EXIT_OK, _render({"d_separated": separated, "open_path": path}, config)


def cmd_check(config: RunConfig) -> CommandOutput:
    """Identify the query; print the verdict, the roles and the witness of a failure."""
    result = identify_query(_model(config).observational_view(), _query(config), config.max_adjust_size)
    document = {key: value for key, value in result.to_output().items() if key not in ("value", "distribution")}
    return _result_status(result), _render(document, config)


def cmd_effect(config: RunConfig) -> CommandOutput:
    """Evaluate the query as identified, by the oracle or both, per :py:attr:`RunConfig.mode`."""
    model, query = _model(config), _query(config)
    if config.mode == Mode.IDENTIFIED:
        result = identify_query(model.observational_view(), query, config.max_adjust_size)
        return _result_status(result), _emit(_render(result.to_output(), config), config)
    if config.mode == Mode.ORACLE:
        try:
            truth = oracle_effect(model, query)
        except IdentificationError as error:
            result = IdentificationResult.failure(error)
            return EXIT_NOT_IDENTIFIED, _render(result.to_output(), config)
        document = {"value": truth.value, "distribution": truth.distribution.entries()}
        if truth.w is not None:
            document["W"] = list(truth.w)
        return EXIT_OK, _emit(_render(document, config), config)
    report = compare_with_oracle(model, query, config.tolerance, config.max_adjust_size)
    text = _emit(_render(report.to_output(), config), config)
    if report.skipped:
        return EXIT_NOT_IDENTIFIED, text
    return (EXIT_OK if report.within_tolerance else EXIT_ERROR), text


def cmd_oracle(config: RunConfig) -> CommandOutput:
    return cmd_effect(config.model_copy(update={"mode": Mode.ORACLE}))


def cmd_compare(config: RunConfig) -> CommandOutput:
    return cmd_effect(config.model_copy(update={"mode": Mode.BOTH}))


def cmd_simulate(config: RunConfig) -> CommandOutput:
    """Sample :py:attr:`RunConfig.n` rows; CSV goes to :py:attr:`RunConfig.out` or standard output."""
    data = sample(_model(config), config.n, config.seed)
    if config.out is not None:
        write_dataset(data, config.out)
        return EXIT_OK, _render({"rows": len(data), "out": config.out}, config)
    return EXIT_OK, data.to_csv(index=False)


def cmd_estimate(config: RunConfig) -> CommandOutput:
    """
    Plug-in estimate: the identified formula evaluated on CPTs fitted to :py:attr:`RunConfig.data`.
    The model file supplies the graph and the variables.
    """
    if config.data is None:
        raise ValueError("A dataset (--data) is required.")
    model, query = _model(config), _query(config)
    data = read_dataset(config.data, model.dag)
    variables = {variable.name: variable for variable in model.variables if not variable.latent}
    view = fit_observational_view(data, model.dag, config.smoothing, variables)
    result = identify_query(view, query, config.max_adjust_size)
    document = result.to_output()
    document["estimate"] = document.pop("value")
    if result.identified and config.truth:
        truth = oracle_effect(model, query, result.roles)
        document["true_value"] = truth.value
        document["absolute_error"] = abs(result.value - truth.value)
    if not result.identified:
        document["notes"] = [*document["notes"], "not estimable from this data"]
    return _result_status(result), _emit(_render(document, config), config)


def cmd_export_dot(config: RunConfig) -> CommandOutput:
    name = config.reference or "G"
    return EXIT_OK, _emit(to_dot(_model(config).dag, name=name), config)


COMMANDS = {
    Command.DSEP: cmd_dsep,
    Command.CHECK: cmd_check,
    Command.EFFECT: cmd_effect,
    Command.ORACLE: cmd_oracle,
    Command.COMPARE: cmd_compare,
    Command.SIMULATE: cmd_simulate,
    Command.ESTIMATE: cmd_estimate,
    Command.EXPORT_DOT: cmd_export_dot,
}


def run(config: RunConfig) -> CommandOutput:
    logger.debug(f"Running {config.command.value}")
    return COMMANDS[config.command](config)
