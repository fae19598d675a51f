"""knnseq: retrieval-augmented inference for flat NER with subtypes.

A base token classifier's per-token label distribution is interpolated
with a distribution derived from exact k-nearest-neighbor search over
cached training embeddings; the result is decoded into entity spans and
scored with entity-level micro precision/recall/F1.
"""

from .corpus_io import (
    Corpus,
    SentenceRecord,
    inspect_datastore,
    read_corpus,
    read_datastore,
    write_corpus,
    write_datastore,
)
from .datastore import (
    Datastore,
    NeighborList,
    build_datastore,
    cosine_sim,
    knn_search,
)
from .decode import (
    EntityTuple,
    decode_entities,
    encode_entities,
    gold_entities,
)
from .errors import ValidationError
from .evaluation import EvalReport, TypeCounts, micro_prf
from .inference import (
    KnnConfig,
    interpolate,
    knn_distribution,
    predict_tokens,
)
from .sweep import (
    SweepGrid,
    SweepResult,
    SweepRow,
    format_sweep_csv,
    run_sweep,
)
from .tagset import Tagset, format_tagset, load_tagset, parse_tagset

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Datastore",
    "EntityTuple",
    "EvalReport",
    "KnnConfig",
    "NeighborList",
    "SentenceRecord",
    "SweepGrid",
    "SweepResult",
    "SweepRow",
    "Tagset",
    "TypeCounts",
    "ValidationError",
    "build_datastore",
    "cosine_sim",
    "decode_entities",
    "encode_entities",
    "format_sweep_csv",
    "format_tagset",
    "gold_entities",
    "inspect_datastore",
    "interpolate",
    "knn_distribution",
    "knn_search",
    "load_tagset",
    "micro_prf",
    "parse_tagset",
    "predict_tokens",
    "read_corpus",
    "read_datastore",
    "run_sweep",
    "write_corpus",
    "write_datastore",
]
