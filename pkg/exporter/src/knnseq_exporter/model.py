"""Dual-head token classifier: shared encoder, softmax main head, sigmoid sub head.

A checkpoint directory holds the encoder and tokenizer in HuggingFace
``save_pretrained`` layout plus ``heads.pt`` (both linear heads' weights)
and ``heads.json`` (their widths). Fine-tuning is out of scope here: this
module only loads an already-trained checkpoint and runs inference.
"""

from __future__ import annotations

import json
import os

import torch
from torch import nn
from transformers import AutoModel, AutoTokenizer

from .errors import ExporterError

HEADS_WEIGHTS = "heads.pt"
HEADS_CONFIG = "heads.json"


class DualHeadTokenClassifier(nn.Module):
    def __init__(self, encoder: nn.Module, main_labels: int, sub_labels: int):
        super().__init__()
        hidden = encoder.config.hidden_size
        self.encoder = encoder
        self.main_head = nn.Linear(hidden, main_labels)
        self.sub_head = nn.Linear(hidden, sub_labels)

    @property
    def hidden_size(self) -> int:
        return self.encoder.config.hidden_size

    @property
    def main_labels(self) -> int:
        return self.main_head.out_features

    @property
    def sub_labels(self) -> int:
        return self.sub_head.out_features

    def forward(self, **encoded):
        """Per-token embeddings, main-label probabilities, sub-label scores."""
        hidden = self.encoder(**encoded).last_hidden_state
        p_main = torch.softmax(self.main_head(hidden), dim=-1)
        p_sub = torch.sigmoid(self.sub_head(hidden))
        return hidden, p_main, p_sub


def save_checkpoint(model: DualHeadTokenClassifier, tokenizer, path) -> None:
    os.makedirs(path, exist_ok=True)
    model.encoder.save_pretrained(path)
    tokenizer.save_pretrained(path)
    torch.save(
        {"main_head": model.main_head.state_dict(), "sub_head": model.sub_head.state_dict()},
        os.path.join(path, HEADS_WEIGHTS),
    )
    with open(os.path.join(path, HEADS_CONFIG), "w", encoding="utf-8") as fh:
        json.dump({"main_labels": model.main_labels, "sub_labels": model.sub_labels}, fh)


def load_checkpoint(path):
    """Load (tokenizer, model) from a checkpoint directory, in eval mode."""
    heads_config = os.path.join(path, HEADS_CONFIG)
    if not os.path.exists(heads_config):
        raise ExporterError(f"{path} is not a dual-head checkpoint: missing {HEADS_CONFIG}")
    with open(heads_config, encoding="utf-8") as fh:
        config = json.load(fh)
    try:
        tokenizer = AutoTokenizer.from_pretrained(path)
        encoder = AutoModel.from_pretrained(path)
    except (OSError, ValueError) as exc:
        raise ExporterError(f"cannot load checkpoint {path}: {exc}") from exc
    model = DualHeadTokenClassifier(encoder, config["main_labels"], config["sub_labels"])
    state = torch.load(os.path.join(path, HEADS_WEIGHTS), map_location="cpu", weights_only=True)
    model.main_head.load_state_dict(state["main_head"])
    model.sub_head.load_state_dict(state["sub_head"])
    model.eval()
    return tokenizer, model
