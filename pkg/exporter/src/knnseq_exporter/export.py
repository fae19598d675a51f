"""Run the dual-head classifier over a dataset and emit a knnseq corpus file.

One record per sentence, one row per input word regardless of how many
subwords the tokenizer produces: the embedding and both probability rows
come from each word's first subword. Words whose first subword falls
beyond the tokenizer window are dropped and counted in the summary, so an
emitted record is always self-consistent (tokens, gold tags, and rows all
cover the same word prefix).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np
import torch

from .dataset import LabeledSentence, read_dataset
from .errors import ExporterError
from .model import load_checkpoint
from .taxonomy import read_taxonomy

CORPUS_FORMAT = "knnseq-corpus"
CORPUS_VERSION = 1


@dataclass(frozen=True)
class ExportJob:
    model_dir: str
    dataset_path: str
    output_path: str
    tagset_path: str
    max_length: int = 512
    batch_size: int = 16

    def __post_init__(self) -> None:
        if self.max_length < 1:
            raise ExporterError(f"max_length must be positive, got {self.max_length}")
        if self.batch_size < 1:
            raise ExporterError(f"batch_size must be positive, got {self.batch_size}")


@dataclass
class ExportSummary:
    records: int
    words: int
    dropped_words: int
    skipped_sentences: int
    dim: int


def _first_subword_positions(word_ids, n_words: int) -> list[int]:
    """Sequence position of each word's first subword, for covered words only."""
    positions: dict[int, int] = {}
    for seq_pos, word in enumerate(word_ids):
        if word is not None and word not in positions:
            positions[word] = seq_pos
    covered = 0
    while covered < n_words and covered in positions:
        covered += 1
    return [positions[w] for w in range(covered)]


def _record_obj(sid: str, sentence: LabeledSentence, keep: int,
                emb: np.ndarray, p_main: np.ndarray, p_sub: np.ndarray) -> dict:
    return {
        "id": sid,
        "tokens": sentence.tokens[:keep],
        "gold_main": sentence.main_tags[:keep],
        "gold_sub": [sorted(tags) for tags in sentence.sub_tags[:keep]],
        "emb": [[float(x) for x in row] for row in emb],
        "p_main": [[float(x) for x in row] for row in p_main],
        "p_sub": [[float(x) for x in row] for row in p_sub],
    }


def export_corpus(job: ExportJob) -> ExportSummary:
    taxonomy = read_taxonomy(job.tagset_path)
    tokenizer, model = load_checkpoint(job.model_dir)
    if model.main_labels != taxonomy.main_label_count:
        raise ExporterError(
            f"main head width {model.main_labels} != tagset main label space "
            f"{taxonomy.main_label_count}"
        )
    if model.sub_labels != taxonomy.sub_label_count:
        raise ExporterError(
            f"sub head width {model.sub_labels} != tagset sub label space "
            f"{taxonomy.sub_label_count}"
        )
    sentences = read_dataset(job.dataset_path, taxonomy)

    header = {
        "format": CORPUS_FORMAT,
        "version": CORPUS_VERSION,
        "dim": model.hidden_size,
        "tagset_hash": taxonomy.hash_hex,
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    words = dropped = skipped = 0

    with torch.no_grad():
        for start in range(0, len(sentences), job.batch_size):
            batch = sentences[start:start + job.batch_size]
            encoded = tokenizer(
                [s.tokens for s in batch],
                is_split_into_words=True,
                truncation=True,
                max_length=job.max_length,
                padding=True,
                return_tensors="pt",
            )
            hidden, p_main, p_sub = model(**encoded)
            for offset, sentence in enumerate(batch):
                words += len(sentence)
                positions = _first_subword_positions(encoded.word_ids(offset), len(sentence))
                dropped += len(sentence) - len(positions)
                if not positions:
                    skipped += 1
                    continue
                idx = torch.tensor(positions)
                obj = _record_obj(
                    f"s{start + offset:06d}",
                    sentence,
                    len(positions),
                    hidden[offset, idx].to(torch.float32).numpy(),
                    p_main[offset, idx].to(torch.float32).numpy(),
                    p_sub[offset, idx].to(torch.float32).numpy(),
                )
                lines.append(json.dumps(obj, separators=(",", ":")))

    if len(lines) == 1:
        raise ExporterError("no sentence survived tokenization; nothing to export")
    _atomic_write(job.output_path, "\n".join(lines) + "\n")
    return ExportSummary(
        records=len(lines) - 1,
        words=words,
        dropped_words=dropped,
        skipped_sentences=skipped,
        dim=model.hidden_size,
    )


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
