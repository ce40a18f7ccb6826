"""
Main
----
Command line entry point. Every option can also be set in a YAML file passed with ``--config``;
explicit flags override the file, and ``REGIMECALC_TOL`` overrides the comparison tolerance.

Examples
********

.. code:: bash

        # Is the natural direct effect identified, and by which roles?
        regimecalc check --model model.json --query nde.json

        # Identified value against the truth of the full model.
        regimecalc effect --model model.json --query nde.json --mode both

        # Plug-in estimate from a simulated dataset.
        regimecalc simulate --model model.json --n 100000 --seed 1 --out data.csv
        regimecalc estimate --model model.json --query nde.json --data data.csv --truth

        # Graphviz rendering of a reference graph.
        regimecalc export-dot --reference confounded-mediation

"""

import argparse
import logging
import sys
from typing import Optional

from pydantic import ValidationError

from regimecalc.cli import EXIT_ERROR, Command, Mode, OutputFormat, make_run_config, run
from regimecalc.graph.dag import GraphError
from regimecalc.identify.errors import IdentificationError
from regimecalc.model.model import LatentVariableError
from regimecalc.regimes.types import RegimeError
from regimecalc.utils.reference_models import REFERENCE_GRAPHS
from regimecalc.utils.serialization import SerializationError

logger = logging.getLogger(__name__)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regimecalc",
        description="Exact identification of causal effects with regime indicators.",
    )
    parser.add_argument("command", choices=[command.value for command in Command])
    parser.add_argument("-c", "--config", help="YAML file with default values of the options below.")
    parser.add_argument("-m", "--model", help="Model file (JSON or YAML).")
    parser.add_argument("-q", "--query", help="Query file (JSON or YAML).")
    parser.add_argument("-d", "--data", help="CSV dataset of integer codes, for `estimate`.")
    parser.add_argument(
        "-r", "--reference", choices=sorted(REFERENCE_GRAPHS), help="Reference graph with random CPTs."
    )
    parser.add_argument("-s", "--seed", type=int, help="Random seed.")
    parser.add_argument("-n", "--n", type=int, help="Sample size, for `simulate`.")
    parser.add_argument("--smoothing", type=float, help="Additive smoothing of fitted CPTs, for `estimate`.")
    parser.add_argument("--max-adjust-size", dest="max_adjust_size", type=int, help="Largest role set searched.")
    parser.add_argument("--mode", choices=[mode.value for mode in Mode], help="What `effect` evaluates.")
    parser.add_argument("-o", "--out", help="Output file.")
    parser.add_argument("-f", "--format", choices=[output.value for output in OutputFormat], help="Output format.")
    parser.add_argument(
        "--truth", action="store_true", default=None, help="Report the error of `estimate` against the model."
    )
    parser.add_argument("-a", nargs="+", help="First node set, for `dsep`.")
    parser.add_argument("-b", nargs="+", help="Second node set, for `dsep`.")
    parser.add_argument("--given", dest="c", nargs="*", help="Conditioning set, for `dsep`.")
    parser.add_argument("--sigma", nargs="*", help="Nodes that get a regime indicator, for `dsep`.")
    parser.add_argument("-v", "--verbose", action="store_true", default=None, help="Log debug messages.")
    return parser


def main(parsed_args: Optional[argparse.Namespace] = None) -> int:
    """
    Run one command and print its output.

    :param parsed_args: Set of command line arguments. If passed, overrides the command line contents.
        See the module docs for reference.
    :return: Exit status, see :py:mod:`regimecalc.cli`.
    """
    if parsed_args is None:
        parsed_args = _parser().parse_args(sys.argv[1:])
    logging.basicConfig(
        level=logging.DEBUG if getattr(parsed_args, "verbose", None) else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = make_run_config(parsed_args)
        status, text = run(config)
    except (
        ValidationError,
        SerializationError,
        GraphError,
        RegimeError,
        LatentVariableError,
        IdentificationError,
        ValueError,
        KeyError,
        OSError,
    ) as error:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR
    if text:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
