import pytest

pytest.importorskip("torch", reason="exporter tests need torch")
pytest.importorskip("knnseq_exporter", reason="exporter tests need the exporter installed")

import torch
from tokenizers import Tokenizer
from tokenizers.models import WordPiece
from tokenizers.pre_tokenizers import Whitespace
from tokenizers.processors import TemplateProcessing
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

from knnseq_exporter import DualHeadTokenClassifier, save_checkpoint
from knnseq_exporter.taxonomy import Taxonomy

TAGSET_TEXT = """tagset-v1
main:
PERS
ORG
sub:
GOV
COM
"""

# words the toy WordPiece can spell; "cairos" and "marias" split into two pieces
WORD_PIECES = [
    "the", "acme", "corp", "in", "cairo", "maria", "works", "at", "joined",
    "bank", "national", "of", "a", "visited", "##s",
]

DATASET_TEXT = (
    "maria\tB-PERS\t\n"
    "works\tO\t\n"
    "at\tO\t\n"
    "acme\tB-ORG\tB-COM\n"
    "corp\tI-ORG\tI-COM;I-GOV\n"
    "\n"
    "# a comment between sentences\n"
    "marias\tB-PERS\n"
    "visited\tO\n"
    "cairos\tO\n"
    "\n"
    "the\tO\t\n"
    "national\tB-ORG\tB-GOV\n"
    "bank\tI-ORG\tI-GOV\n"
    "of\tI-ORG\tI-GOV\n"
    "cairo\tI-ORG\tI-GOV\n"
)


def build_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {t: i for i, t in enumerate(["[PAD]", "[UNK]", "[CLS]", "[SEP]"] + WORD_PIECES)}
    core = Tokenizer(WordPiece(vocab, unk_token="[UNK]"))
    core.pre_tokenizer = Whitespace()
    core.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=core,
        unk_token="[UNK]", pad_token="[PAD]", cls_token="[CLS]", sep_token="[SEP]",
    )


def build_model(main_labels: int, sub_labels: int, seed: int = 0) -> DualHeadTokenClassifier:
    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=4 + len(WORD_PIECES),
        hidden_size=16,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
    )
    model = DualHeadTokenClassifier(BertModel(config), main_labels, sub_labels)
    model.eval()
    return model


@pytest.fixture(scope="session")
def taxonomy() -> Taxonomy:
    return Taxonomy(main_types=("PERS", "ORG"), sub_types=("GOV", "COM"))


@pytest.fixture(scope="session")
def tagset_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("tagset") / "demo.tagset"
    path.write_text(TAGSET_TEXT, encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def dataset_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("dataset") / "train.tsv"
    path.write_text(DATASET_TEXT, encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory, taxonomy):
    path = tmp_path_factory.mktemp("model") / "checkpoint"
    model = build_model(taxonomy.main_label_count, taxonomy.sub_label_count)
    save_checkpoint(model, build_tokenizer(), path)
    return path


@pytest.fixture(scope="session")
def mismatched_checkpoint_dir(tmp_path_factory, taxonomy):
    path = tmp_path_factory.mktemp("model-bad") / "checkpoint"
    model = build_model(taxonomy.main_label_count + 2, taxonomy.sub_label_count)
    save_checkpoint(model, build_tokenizer(), path)
    return path
