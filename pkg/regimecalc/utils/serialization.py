"""
Serialization
-------------
Reading and writing of model, query and dataset files.

Model and query files are JSON (YAML is accepted on input). Output JSON is canonical:
keys in a fixed order, two-space indentation and shortest round-trip floats,
so that loading and saving a model file reproduces it byte for byte.
Datasets are CSV files of integer codes, one column per variable.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd
import yaml
from pydantic import BaseModel, Field

from regimecalc.graph.dag import Dag
from regimecalc.identify.query import CausalQuery
from regimecalc.model.model import Cpt, Model, Variable
from regimecalc.model.sampling import LATENT_ATTR

logger = logging.getLogger(__name__)


class SerializationError(Exception):
    """A file could not be read as the requested document."""


class CptDocument(BaseModel, extra="forbid"):
    """A CPT as stored in a model file."""

    parents: Tuple[str, ...] = ()
    """Parents in the order of the table rows (last parent varying fastest)."""
    table: Union[List[float], List[List[float]]]
    """One row per parent assignment; a parentless CPT may be a single flat row."""


class ModelDocument(BaseModel, extra="forbid"):
    """Layout of a model file."""

    variables: List[Variable]
    edges: List[Tuple[str, str]] = Field(default_factory=list)
    cpts: Dict[str, CptDocument]

    def to_model(self) -> Model:
        cards = {variable.name: variable.card for variable in self.variables}
        unknown = sorted(set(self.cpts) - set(cards))
        if unknown:
            raise SerializationError(f"Cpts given for unknown variable(s) {unknown}.")
        cpts = [
            Cpt.from_rows(name, document.parents, document.table, cards) for name, document in self.cpts.items()
        ]
        return Model.build(self.variables, self.edges, cpts)

    @classmethod
    def from_model(cls, m: Model) -> "ModelDocument":
        cpts = {}
        for name in m.dag.names:
            cpt = m.cpts[name]
            rows = cpt.rows()
            cpts[name] = CptDocument(parents=cpt.parents, table=rows if cpt.parents else rows[0])
        return cls(variables=list(m.variables), edges=list(m.dag.edges), cpts=cpts)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "variables": [variable.model_dump(exclude_none=True) for variable in self.variables],
            "edges": [list(edge) for edge in self.edges],
            "cpts": {
                name: {"parents": list(document.parents), "table": document.table}
                for name, document in self.cpts.items()
            },
        }


def read_document(file: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a dictionary from a ``.json``, ``.yaml`` or ``.yml`` file.

    :raises SerializationError: If the extension is unknown, the file is malformed or not a dictionary.
    """
    file = Path(file)
    try:
        with open(file, "r", encoding="utf-8") as fd:
            if file.suffix == ".json":
                document = json.load(fd)
            elif file.suffix in (".yaml", ".yml"):
                document = yaml.safe_load(fd)
            else:
                raise SerializationError("File should have a `.json`, `.yaml` or `.yml` extension")
    except (json.JSONDecodeError, yaml.YAMLError) as error:
        raise SerializationError(f"Cannot parse {file}: {error}") from error
    if not isinstance(document, dict):
        raise SerializationError(f"{file} should contain a dict")
    logger.info(f"Loaded file {file}")
    return document


def dump_json(document: Any) -> str:
    """Canonical JSON text with a trailing newline."""
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def write_text(text: str, file: Union[str, Path]) -> None:
    with open(file, "w", encoding="utf-8") as fd:
        fd.write(text)
    logger.info(f"Wrote {file}")


def model_from_dict(document: Dict[str, Any]) -> Model:
    return ModelDocument.model_validate(document).to_model()


def load_model(file: Union[str, Path]) -> Model:
    return model_from_dict(read_document(file))


def dump_model(m: Model) -> str:
    return dump_json(ModelDocument.from_model(m).to_json_dict())


def save_model(m: Model, file: Union[str, Path]) -> None:
    write_text(dump_model(m), file)


def load_query(file: Union[str, Path]) -> CausalQuery:
    return CausalQuery.model_validate(read_document(file))


def read_dataset(file: Union[str, Path], dag: Optional[Dag] = None) -> pd.DataFrame:
    """
    Read a CSV dataset of integer codes.

    :param dag: If given, its latent nodes are recorded in ``DataFrame.attrs["latent"]``.
    :raises SerializationError: If a column holds non-integer values.
    """
    data = pd.read_csv(file)
    for column in data.columns:
        if not pd.api.types.is_integer_dtype(data[column]):
            raise SerializationError(f"Column {column!r} of {file} holds non-integer codes.")
    data.attrs[LATENT_ATTR] = [] if dag is None else [name for name in dag.latent_nodes if name in data.columns]
    logger.info(f"Read {len(data)} rows of {list(data.columns)} from {file}")
    return data


def write_dataset(data: pd.DataFrame, file: Union[str, Path]) -> None:
    data.to_csv(file, index=False)
    logger.info(f"Wrote {len(data)} rows to {file}")
