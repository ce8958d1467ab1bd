"""Command-line surface: load a document, run the engine, emit the artifacts.

``anacent resolve <doc>`` processes one document and writes four artifacts
to the output directory: the centering table, the resolution report, the
protocol trace, and the pronoun ambiguity report (each also as JSON with
``--json``).  Exit codes: 0 ok, 1 load error, 2 engine error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .corpus import load_document
from .engine import EngineConfig, run_document
from .errors import AnacentError, LoadError
from .lexicon import CategoryHierarchy, Taxonomy

EXIT_OK = 0
EXIT_LOAD_ERROR = 1
EXIT_ENGINE_ERROR = 2


def run(document, categories, taxonomy, config=None, max_sentences=None,
        out_dir=None, as_json=False):
    """Run a loaded document and optionally write the artifacts."""
    result = run_document(document, categories, taxonomy, config, max_sentences)
    if out_dir is not None:
        write_artifacts(result, out_dir, as_json=as_json)
    return result


def write_artifacts(result, out_dir, as_json=False):
    os.makedirs(out_dir, exist_ok=True)
    artifacts = {
        "centering_table.txt": result.centering_table(),
        "resolution_report.txt": result.resolution_report(),
        "trace.txt": result.trace_text(),
        "ambiguity_report.txt": result.ambiguity_report(),
    }
    for name, text in artifacts.items():
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as handle:
            handle.write(text)
    if as_json:
        json_artifacts = {
            "centering_table.json": {
                "document": result.doc_id,
                "utterances": result.to_dict()["utterances"],
            },
            "resolution_report.json": {
                "document": result.doc_id,
                "episodes": [episode.to_dict() for episode in result.episodes],
                "readings": [fate.to_dict() for fate in result.reading_fates],
            },
            "trace.json": {
                "document": result.doc_id,
                "level": result.config.trace_level,
                "events": [event.to_dict() for event in result.trace]
                if result.config.trace_level == "full"
                else [episode.summary() for episode in result.episodes]
                if result.config.trace_level == "summary"
                else [],
            },
            "ambiguity_report.json": {
                "document": result.doc_id,
                "classification": result.classification,
            },
        }
        for name, payload in json_artifacts.items():
            with open(os.path.join(out_dir, name), "w", encoding="utf-8") as handle:
                json.dump(payload, handle, indent=2, sort_keys=True, ensure_ascii=False)
                handle.write("\n")
    return sorted(artifacts)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="anacent",
        description="Incremental centering-based anaphora resolution.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    resolve = subparsers.add_parser(
        "resolve", help="resolve anaphora in one annotated document"
    )
    resolve.add_argument("document", help="path to the annotated document")
    resolve.add_argument("--taxonomy", help="taxonomy file (overrides the document header)")
    resolve.add_argument(
        "--categories", help="category hierarchy file (overrides the document header)"
    )
    resolve.add_argument(
        "--trace", choices=("off", "summary", "full"), default="summary",
        help="trace verbosity (default: summary)",
    )
    resolve.add_argument(
        "--json", action="store_true", help="also emit the artifacts as JSON"
    )
    resolve.add_argument(
        "--out", default="anacent-out", help="output directory (default: anacent-out)"
    )
    resolve.add_argument(
        "--sentences", type=int, default=None, metavar="N",
        help="process only the first N sentences",
    )
    resolve.add_argument(
        "--max-readings", type=int, default=32, metavar="K",
        help="reading fan-out limit (default: 32)",
    )
    resolve.add_argument(
        "--schedule-seed", type=int, default=None, metavar="S",
        help="randomize the interleaving of parallel protocol branches",
    )
    return parser


def _cmd_resolve(args):
    categories = CategoryHierarchy.load(args.categories) if args.categories else None
    taxonomy = Taxonomy.load(args.taxonomy) if args.taxonomy else None
    document, categories, taxonomy = load_document(
        args.document, categories=categories, taxonomy=taxonomy
    )
    config = EngineConfig(
        max_readings=args.max_readings,
        trace_level=args.trace,
        schedule_seed=args.schedule_seed,
    )
    result = run(
        document,
        categories,
        taxonomy,
        config=config,
        max_sentences=args.sentences,
        out_dir=args.out,
        as_json=args.json,
    )
    sys.stdout.write(result.centering_table())
    sys.stdout.write(f"artifacts written to {args.out}\n")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "resolve":
            return _cmd_resolve(args)
        parser.error(f"unknown command {args.command!r}")
    except LoadError as exc:
        sys.stderr.write(f"load error: {exc}\n")
        return EXIT_LOAD_ERROR
    except (AnacentError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ENGINE_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
