"""
Helpers shared by the command line, the tests and the tutorials:
model and query files, datasets and reference models.
"""

from regimecalc.utils.serialization import (
    CptDocument,
    ModelDocument,
    SerializationError,
    dump_json,
    dump_model,
    load_model,
    load_query,
    model_from_dict,
    read_dataset,
    read_document,
    save_model,
    write_dataset,
    write_text,
)
from regimecalc.utils.reference_models import (
    REFERENCE_GRAPHS,
    additive_mediation_model,
    confounded_mediation_graph,
    graph_from_edges,
    interaction_model,
    mediation_graph,
    random_cpts,
    random_dag,
    reference_model,
    sequential_graph,
    stratified_mediator_graph,
)
