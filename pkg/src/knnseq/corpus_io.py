"""Interchange corpus reader/writer and the binary datastore format.

Corpus files are UTF-8, line-delimited JSON: line 1 is the header object
``{"format":"knnseq-corpus","version":1,"dim":D,"tagset_hash":H}`` and every
following line is one sentence record. Validation is total: a record that
violates any invariant cannot escape ``read_corpus``, and failures name the
line (and where applicable the record id and token position).

Datastore files are little-endian binary: magic ``KNND``, u32 version=1,
u32 dim, u32 main-label-count, u64 entry count, 32-byte tagset hash, then
one (dim x f32 vector, u32 label) block per entry. Writing is deterministic,
so equal datastores produce byte-identical files.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .datastore import UNIT_NORM_ATOL, Datastore
from .errors import ValidationError
from .tagset import Tagset

CORPUS_FORMAT = "knnseq-corpus"
CORPUS_VERSION = 1
P_MAIN_SUM_ATOL = 1e-4

DATASTORE_MAGIC = b"KNND"
DATASTORE_VERSION = 1
_DS_HEADER = struct.Struct("<4sIIIQ32s")


@dataclass
class SentenceRecord:
    """One sentence: tokens plus whichever per-token annotations are present.

    All present per-token fields have one row/entry per token. ``p_main``
    rows are probability distributions over the main BIO label space;
    ``p_sub`` rows are independent per-label scores in [0, 1].
    """

    id: str
    tokens: list[str]
    gold_main: list[str] | None = None
    gold_sub: list[set[str]] | None = None
    emb: np.ndarray | None = None      # (m, D) float32
    p_main: np.ndarray | None = None   # (m, main_label_count) float64, rows sum to 1
    p_sub: np.ndarray | None = None    # (m, sub_label_count) float64 in [0, 1]

    @property
    def length(self) -> int:
        return len(self.tokens)


@dataclass
class Corpus:
    dim: int
    tagset_hash: str
    records: list[SentenceRecord] = field(default_factory=list)


def _atomic_write_bytes(path, data: bytes) -> None:
    """Write via temp file + rename so partial runs never leave truncated files."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(path, text.encode("utf-8"))


def _fail(lineno: int, message: str):
    raise ValidationError(f"line {lineno}: {message}")


def _as_matrix(value, lineno: int, what: str, rec_id: str, m: int, width: int, dtype) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        _fail(lineno, f"record {rec_id}: {what} is not a numeric matrix")
    if arr.ndim != 2 or arr.shape[0] != m:
        _fail(lineno, f"record {rec_id}: {what} must have one row per token ({m}), got shape {arr.shape}")
    if arr.shape[1] != width:
        _fail(lineno, f"record {rec_id}: {what} width {arr.shape[1]} != expected {width}")
    if not np.isfinite(arr).all():
        _fail(lineno, f"record {rec_id}: {what} contains non-finite values")
    return arr.astype(dtype)


def _parse_record(obj, lineno: int, dim: int, ts: Tagset) -> SentenceRecord:
    if not isinstance(obj, dict):
        _fail(lineno, "record is not an object")
    rec_id = obj.get("id")
    if not isinstance(rec_id, str) or not rec_id:
        _fail(lineno, "record missing string 'id'")
    tokens = obj.get("tokens")
    if not isinstance(tokens, list) or not tokens or not all(isinstance(t, str) for t in tokens):
        _fail(lineno, f"record {rec_id}: 'tokens' must be a nonempty list of strings")
    m = len(tokens)
    unknown = set(obj) - {"id", "tokens", "gold_main", "gold_sub", "emb", "p_main", "p_sub"}
    if unknown:
        _fail(lineno, f"record {rec_id}: unknown keys {sorted(unknown)}")

    gold_main = obj.get("gold_main")
    if gold_main is not None:
        if not isinstance(gold_main, list) or len(gold_main) != m:
            _fail(lineno, f"record {rec_id}: gold_main must list one tag per token")
        for pos, tag in enumerate(gold_main):
            if not isinstance(tag, str):
                _fail(lineno, f"record {rec_id}: gold_main[{pos}] is not a string")
            try:
                ts.main_index_of(tag)
            except ValidationError as exc:
                _fail(lineno, f"record {rec_id}: token {pos}: {exc}")

    gold_sub = None
    raw_sub = obj.get("gold_sub")
    if raw_sub is not None:
        if not isinstance(raw_sub, list) or len(raw_sub) != m:
            _fail(lineno, f"record {rec_id}: gold_sub must list one tag set per token")
        gold_sub = []
        for pos, tags in enumerate(raw_sub):
            if not isinstance(tags, list):
                _fail(lineno, f"record {rec_id}: gold_sub[{pos}] is not a list")
            for tag in tags:
                if not isinstance(tag, str):
                    _fail(lineno, f"record {rec_id}: gold_sub[{pos}] has a non-string tag")
                try:
                    ts.sub_index_of(tag)
                except ValidationError as exc:
                    _fail(lineno, f"record {rec_id}: token {pos}: {exc}")
            if len(set(tags)) != len(tags):
                _fail(lineno, f"record {rec_id}: gold_sub[{pos}] has duplicate tags")
            gold_sub.append(set(tags))

    emb = None
    if obj.get("emb") is not None:
        emb = _as_matrix(obj["emb"], lineno, "emb", rec_id, m, dim, np.float32)

    p_main = None
    if obj.get("p_main") is not None:
        p_main = _as_matrix(obj["p_main"], lineno, "p_main", rec_id, m, ts.main_label_count, np.float64)
        if (p_main < 0).any():
            pos = int(np.argwhere(p_main < 0)[0][0])
            _fail(lineno, f"record {rec_id}: token {pos}: p_main has a negative entry")
        sums = p_main.sum(axis=1)
        off = np.flatnonzero(np.abs(sums - 1.0) > P_MAIN_SUM_ATOL)
        if off.size:
            pos = int(off[0])
            _fail(
                lineno,
                f"record {rec_id}: token {pos}: p_main row sums to {sums[pos]:.6f}, "
                f"expected 1 within {P_MAIN_SUM_ATOL}",
            )
        # Renormalize exactly so downstream math sees unit mass.
        p_main = p_main / sums[:, None]

    p_sub = None
    if obj.get("p_sub") is not None:
        p_sub = _as_matrix(obj["p_sub"], lineno, "p_sub", rec_id, m, ts.sub_label_count, np.float64)
        if (p_sub < 0).any() or (p_sub > 1).any():
            pos = int(np.argwhere((p_sub < 0) | (p_sub > 1))[0][0])
            _fail(lineno, f"record {rec_id}: token {pos}: p_sub entry outside [0, 1]")

    return SentenceRecord(
        id=rec_id, tokens=list(tokens), gold_main=gold_main, gold_sub=gold_sub,
        emb=emb, p_main=p_main, p_sub=p_sub,
    )


def read_corpus(path, ts: Tagset) -> Corpus:
    """Single streaming pass over a corpus file with full validation."""
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read corpus {path}: {exc}") from exc
    with fh:
        header_line = fh.readline()
        if not header_line:
            raise ValidationError("line 1: empty file, missing corpus header")
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"line 1: header is not valid JSON: {exc}") from exc
        if not isinstance(header, dict) or header.get("format") != CORPUS_FORMAT:
            _fail(1, f"header 'format' must be {CORPUS_FORMAT!r}")
        if header.get("version") != CORPUS_VERSION:
            _fail(1, f"header 'version' must be {CORPUS_VERSION}, got {header.get('version')!r}")
        dim = header.get("dim")
        if not isinstance(dim, int) or dim < 1:
            _fail(1, f"header 'dim' must be a positive integer, got {dim!r}")
        tagset_hash = header.get("tagset_hash")
        if not isinstance(tagset_hash, str):
            _fail(1, "header missing 'tagset_hash'")
        if tagset_hash != ts.hash_hex:
            _fail(1, f"tagset hash mismatch: corpus was written under a different tagset")

        corpus = Corpus(dim=dim, tagset_hash=tagset_hash)
        seen_ids: set[str] = set()
        for lineno, raw in enumerate(fh, start=2):
            if not raw.strip():
                _fail(lineno, "blank line inside corpus")
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                _fail(lineno, f"record is not valid JSON: {exc}")
            rec = _parse_record(obj, lineno, dim, ts)
            if rec.id in seen_ids:
                _fail(lineno, f"duplicate record id {rec.id!r}")
            seen_ids.add(rec.id)
            corpus.records.append(rec)
    return corpus


def _record_to_obj(rec: SentenceRecord) -> dict:
    obj: dict = {"id": rec.id, "tokens": rec.tokens}
    if rec.gold_main is not None:
        obj["gold_main"] = rec.gold_main
    if rec.gold_sub is not None:
        obj["gold_sub"] = [sorted(tags) for tags in rec.gold_sub]
    if rec.emb is not None:
        obj["emb"] = [[float(x) for x in row] for row in np.asarray(rec.emb, dtype=np.float32)]
    if rec.p_main is not None:
        obj["p_main"] = [[float(x) for x in row] for row in rec.p_main]
    if rec.p_sub is not None:
        obj["p_sub"] = [[float(x) for x in row] for row in rec.p_sub]
    return obj


def write_corpus(corpus: Corpus, path) -> None:
    header = {
        "format": CORPUS_FORMAT,
        "version": CORPUS_VERSION,
        "dim": corpus.dim,
        "tagset_hash": corpus.tagset_hash,
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    lines.extend(json.dumps(_record_to_obj(rec), separators=(",", ":")) for rec in corpus.records)
    atomic_write_text(path, "\n".join(lines) + "\n")


def _entry_dtype(dim: int) -> np.dtype:
    return np.dtype([("vec", "<f4", (dim,)), ("label", "<u4")])


def write_datastore(ds: Datastore, path) -> None:
    """Serialize a datastore; deterministic, so equal stores give equal bytes."""
    if len(ds) == 0:
        raise ValidationError("refusing to write an empty datastore")
    hash_bytes = bytes.fromhex(ds.tagset_hash)
    if len(hash_bytes) != 32:
        raise ValidationError("datastore tagset hash is not a 32-byte digest")
    header = _DS_HEADER.pack(
        DATASTORE_MAGIC, DATASTORE_VERSION, ds.dim, ds.main_label_count, len(ds), hash_bytes
    )
    entries = np.empty(len(ds), dtype=_entry_dtype(ds.dim))
    entries["vec"] = ds.vectors
    entries["label"] = ds.labels.astype(np.uint32)
    _atomic_write_bytes(path, header + entries.tobytes())


def _load_datastore_file(path) -> Datastore:
    """Structural read: layout, label range, and unit norms, but no tagset check."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read datastore {path}: {exc}") from exc
    if len(blob) < _DS_HEADER.size:
        raise ValidationError("datastore file truncated: header incomplete")
    magic, version, dim, label_count, count, hash_bytes = _DS_HEADER.unpack_from(blob)
    if magic != DATASTORE_MAGIC:
        raise ValidationError(f"bad magic {magic!r}, expected {DATASTORE_MAGIC!r}")
    if version != DATASTORE_VERSION:
        raise ValidationError(f"unsupported datastore version {version}")
    if dim < 1:
        raise ValidationError(f"datastore dim must be positive, got {dim}")
    if count < 1:
        raise ValidationError("datastore file contains no entries")
    dtype = _entry_dtype(dim)
    expected = _DS_HEADER.size + count * dtype.itemsize
    if len(blob) != expected:
        raise ValidationError(
            f"datastore file size {len(blob)} != expected {expected} (truncated or trailing bytes)"
        )
    entries = np.frombuffer(blob, dtype=dtype, offset=_DS_HEADER.size, count=count)
    vectors = np.ascontiguousarray(entries["vec"])
    labels = entries["label"].astype(np.int64)
    if (labels >= label_count).any():
        raise ValidationError("datastore contains a label index outside its label space")
    norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
    off = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_ATOL)
    if off.size:
        raise ValidationError(f"datastore entry {int(off[0])} is not unit-norm")
    return Datastore(
        dim=dim, main_label_count=label_count, vectors=vectors, labels=labels,
        tagset_hash=hash_bytes.hex(), sources=None,
    )


def read_datastore(path, ts: Tagset) -> Datastore:
    """Read a datastore file, verifying layout, invariants, and the tagset hash."""
    ds = _load_datastore_file(path)
    if ds.tagset_hash != ts.hash_hex:
        raise ValidationError("tagset hash mismatch: datastore was built under a different tagset")
    if ds.main_label_count != ts.main_label_count:
        raise ValidationError(
            f"datastore label space {ds.main_label_count} != tagset label space {ts.main_label_count}"
        )
    return ds


def inspect_datastore(path) -> Datastore:
    """Structural validation only; the tagset hash is left unverified.

    For format tooling that has no tagset at hand. Anything that will
    actually query the store should use read_datastore instead.
    """
    return _load_datastore_file(path)
