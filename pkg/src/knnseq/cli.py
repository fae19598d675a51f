"""Batch command-line front end.

Subcommands: build-datastore, predict, evaluate, sweep, validate.
Exit codes: 0 success, 1 validation error, 2 runtime error. Every failure
prints a single line starting with ``error:`` to stderr. Output files are
written atomically (temp + rename), so interrupted runs never leave
truncated artifacts behind.
"""

from __future__ import annotations

import argparse
import json
import sys

from .corpus_io import (
    DATASTORE_MAGIC,
    atomic_write_text,
    inspect_datastore,
    read_corpus,
    read_datastore,
    write_datastore,
)
from .datastore import build_datastore
from .decode import decode_entities, entity_from_obj, entity_to_obj, gold_entities
from .errors import ValidationError
from .evaluation import micro_prf
from .inference import KnnConfig, predict_tokens
from .sweep import SweepGrid, format_sweep_csv, run_sweep
from .tagset import TAGSET_VERSION, Tagset, load_tagset


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route usage errors through the exit-1 path
        raise ValidationError(message)


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="knnseq", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("build-datastore", help="cache (embedding, main label) pairs from a training corpus")
    p.add_argument("train", help="training corpus file (needs emb and gold_main)")
    p.add_argument("--tagset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--exclude-outside", action="store_true",
                   help="skip tokens whose gold label is O")
    p.set_defaults(func=cmd_build_datastore)

    p = sub.add_parser("predict", help="kNN-interpolated prediction over a corpus")
    p.add_argument("test", help="input corpus file (needs emb and p_main)")
    p.add_argument("--datastore", required=True)
    p.add_argument("--tagset", required=True)
    p.add_argument("--k", type=int, default=512)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5,
                   help="interpolation factor; 1 = base model only, 0 = neighbors only")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="entity-level micro P/R/F1 of predictions against gold")
    p.add_argument("gold", help="corpus file with gold labels")
    p.add_argument("predictions", help="prediction file from the predict subcommand")
    p.add_argument("--tagset", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="grid search over k and lambda; prints a CSV table")
    p.add_argument("dev", help="corpus file with emb, p_main, and gold labels")
    p.add_argument("--datastore", required=True)
    p.add_argument("--tagset", required=True)
    p.add_argument("--ks", type=_parse_int_list, default=None,
                   help="comma-separated neighbor counts (default 8,...,512)")
    p.add_argument("--lambdas", type=_parse_float_list, default=None,
                   help="comma-separated interpolation factors (default 0.0,...,1.0)")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--out", help="write the table here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check a file against its format")
    p.add_argument("file")
    p.add_argument("--tagset", help="required for corpus files; enables full checks elsewhere")
    p.set_defaults(func=cmd_validate)

    return parser


def cmd_build_datastore(args) -> int:
    ts = load_tagset(args.tagset)
    corpus = read_corpus(args.train, ts)
    ds = build_datastore(corpus, ts, include_outside=not args.exclude_outside)
    write_datastore(ds, args.out)
    print(f"entries={len(ds)} dim={ds.dim}")
    print("label histogram:")
    hist = ds.label_histogram()
    for idx in range(ts.main_label_count):
        if hist[idx]:
            print(f"  {ts.main_tag_of(idx)}\t{int(hist[idx])}")
    return 0


def cmd_predict(args) -> int:
    ts = load_tagset(args.tagset)
    cfg = KnnConfig(k=args.k, lam=args.lam, tau=args.tau)
    ds = read_datastore(args.datastore, ts)
    corpus = read_corpus(args.test, ts)
    lines = []
    for rec in corpus.records:
        main, subs = predict_tokens(rec, ds, cfg, ts)
        entities = decode_entities(main, subs, ts)
        obj = {"id": rec.id, "entities": [entity_to_obj(e) for e in entities]}
        lines.append(json.dumps(obj, separators=(",", ":")))
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote predictions for {len(lines)} records to {args.out}")
    return 0


def read_predictions(path, ts: Tagset) -> dict:
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read predictions {path}: {exc}") from exc
    pred = {}
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                raise ValidationError(f"line {lineno}: blank line in predictions file")
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"line {lineno}: not valid JSON: {exc}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
                raise ValidationError(f"line {lineno}: prediction record missing string 'id'")
            if not isinstance(obj.get("entities"), list):
                raise ValidationError(f"line {lineno}: prediction record missing 'entities' list")
            if obj["id"] in pred:
                raise ValidationError(f"line {lineno}: duplicate prediction id {obj['id']!r}")
            try:
                pred[obj["id"]] = [entity_from_obj(e, ts) for e in obj["entities"]]
            except ValidationError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from exc
    return pred


def cmd_evaluate(args) -> int:
    ts = load_tagset(args.tagset)
    corpus = read_corpus(args.gold, ts)
    gold = {rec.id: gold_entities(rec, ts) for rec in corpus.records}
    pred = read_predictions(args.predictions, ts)
    report = micro_prf(gold, pred, ts)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_sweep(args) -> int:
    ts = load_tagset(args.tagset)
    ds = read_datastore(args.datastore, ts)
    corpus = read_corpus(args.dev, ts)
    grid_kwargs = {"tau": args.tau}
    if args.ks is not None:
        grid_kwargs["ks"] = args.ks
    if args.lambdas is not None:
        grid_kwargs["lambdas"] = args.lambdas
    grid = SweepGrid(**grid_kwargs)
    result = run_sweep(corpus, ds, grid, ts)
    table = format_sweep_csv(result)
    if args.out:
        atomic_write_text(args.out, table)
        print(f"wrote {len(result.rows)} rows to {args.out}")
    else:
        sys.stdout.write(table)
    return 0


def cmd_validate(args) -> int:
    ts = load_tagset(args.tagset) if args.tagset else None
    try:
        with open(args.file, "rb") as fh:
            head = fh.read(64)
    except OSError as exc:
        raise ValidationError(f"cannot read {args.file}: {exc}") from exc
    if head.startswith(DATASTORE_MAGIC):
        ds = read_datastore(args.file, ts) if ts else inspect_datastore(args.file)
        checked = "tagset verified" if ts else "tagset unverified"
        print(f"ok: datastore entries={len(ds)} dim={ds.dim} ({checked})")
        return 0
    first = head.split(b"\n", 1)[0].decode("utf-8", errors="replace").strip()
    if first == TAGSET_VERSION:
        loaded = load_tagset(args.file)
        print(
            f"ok: tagset main={len(loaded.main_types)} sub={len(loaded.sub_types)} "
            f"labels={loaded.main_label_count}/{loaded.sub_label_count}"
        )
        return 0
    if first.startswith("{"):
        return _validate_json_lines(args.file, ts)
    raise ValidationError(f"unrecognized file type: {args.file}")


def _validate_json_lines(path, ts: Tagset | None) -> int:
    with open(path, "r", encoding="utf-8") as fh:
        first_line = fh.readline()
    try:
        obj = json.loads(first_line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line 1: not valid JSON: {exc}") from exc
    if isinstance(obj, dict) and "format" in obj:
        # Anything claiming a format is an intended corpus file; let the
        # reader name whichever header field is wrong.
        if ts is None:
            raise ValidationError("corpus validation needs --tagset")
        corpus = read_corpus(path, ts)
        print(f"ok: corpus records={len(corpus.records)} dim={corpus.dim}")
        return 0
    if isinstance(obj, dict) and "id" in obj and "entities" in obj:
        if ts is None:
            raise ValidationError("prediction validation needs --tagset")
        pred = read_predictions(path, ts)
        print(f"ok: predictions records={len(pred)}")
        return 0
    raise ValidationError("unrecognized JSON file: neither a corpus header nor a prediction record")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {str(exc) or exc.__class__.__name__}".replace("\n", " "), file=sys.stderr)
        return 1
    except SystemExit:
        raise
    except Exception as exc:  # runtime failure: bad state, IO race, bugs
        print(f"error: {exc.__class__.__name__}: {exc}".replace("\n", " "), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
