"""Command line for the exporter.

Exit codes mirror the knnseq CLI: 0 success, 1 validation error, 2 runtime
error, failures printed as a single ``error:`` line on stderr.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ExporterError
from .export import ExportJob, export_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knnseq-export",
        description="run a dual-head token classifier and emit a knnseq corpus file",
    )
    parser.add_argument("--model", required=True, help="checkpoint directory")
    parser.add_argument("--dataset", required=True, help="token/tag dataset file")
    parser.add_argument("--tagset", required=True, help="tagset file matching the model heads")
    parser.add_argument("--out", required=True, help="corpus file to write")
    parser.add_argument("--max-length", type=int, default=512,
                        help="tokenizer window; words beyond it are dropped and counted")
    parser.add_argument("--batch-size", type=int, default=16)
    return parser


def main(argv=None) -> int:
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()  # keep stderr to the single error: line
    args = build_parser().parse_args(argv)
    try:
        job = ExportJob(
            model_dir=args.model,
            dataset_path=args.dataset,
            output_path=args.out,
            tagset_path=args.tagset,
            max_length=args.max_length,
            batch_size=args.batch_size,
        )
        summary = export_corpus(job)
    except ExporterError as exc:
        print(f"error: {exc}".replace("\n", " "), file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {exc.__class__.__name__}: {exc}".replace("\n", " "), file=sys.stderr)
        return 2
    print(
        f"wrote {summary.records} records ({summary.words - summary.dropped_words} rows, "
        f"dim={summary.dim}) to {args.out}"
    )
    if summary.dropped_words:
        print(
            f"dropped {summary.dropped_words} words beyond the {args.max_length}-token window"
            + (f"; skipped {summary.skipped_sentences} empty sentences" if summary.skipped_sentences else "")
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
