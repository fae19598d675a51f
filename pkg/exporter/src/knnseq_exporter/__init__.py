"""knnseq-exporter: dual-head encoder inference to knnseq corpus files."""

from .dataset import LabeledSentence, read_dataset
from .errors import ExporterError
from .export import ExportJob, ExportSummary, export_corpus
from .model import DualHeadTokenClassifier, load_checkpoint, save_checkpoint
from .taxonomy import Taxonomy, read_taxonomy

__version__ = "0.1.0"

__all__ = [
    "DualHeadTokenClassifier",
    "ExportJob",
    "ExportSummary",
    "ExporterError",
    "LabeledSentence",
    "Taxonomy",
    "export_corpus",
    "load_checkpoint",
    "read_dataset",
    "read_taxonomy",
    "save_checkpoint",
]
