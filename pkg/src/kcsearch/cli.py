"""``kcsearch search`` and ``kcsearch compare``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .oracle import SURFACE_KINDS
from .report import RunManifest, compare_algorithms, run_search


def _add_common(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dataset", metavar="PATH", help="CSV file with a header row")
    src.add_argument("--surface", choices=SURFACE_KINDS, help="synthetic accuracy surface instead of training")
    p.add_argument("--schema", metavar="PATH", help="column schema JSON, or a bundled name such as 'titanic'")
    p.add_argument("--label", help="label column; infers a schema when --schema is not given")
    p.add_argument("--input-dim", type=int, default=11, help="input width for synthetic surfaces")
    p.add_argument("--max-ihls", type=int, default=64)
    p.add_argument("--df-max-exp", type=int, default=6, help="DF axis is 2**1 .. 2**N")
    p.add_argument("--include-df-one", action="store_true", help="prepend DF=1 (single hidden layer)")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--split", type=float, default=0.8, help="training share of the rows")
    p.add_argument("--activation", choices=("relu", "sigmoid", "tanh"), default="relu")
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--metric", choices=("test", "train"), default="test")
    p.add_argument("--max-passes", type=int, default=None, help="zigzag pass cap")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcsearch",
                                     description="k-completeness guided architecture search")
    sub = parser.add_subparsers(dest="command", required=True)
    search = sub.add_parser("search", help="run one traversal algorithm")
    search.add_argument("--algorithm", choices=("brute", "diagonal", "zigzag"), default="zigzag")
    _add_common(search)
    compare = sub.add_parser("compare", help="run all three algorithms and tabulate them")
    _add_common(compare)
    return parser


def manifest_from_args(args) -> RunManifest:
    return RunManifest(
        out=args.out,
        algorithms=[args.algorithm] if args.command == "search" else ["brute", "diagonal", "zigzag"],
        dataset=args.dataset, schema=args.schema, label=args.label, surface=args.surface,
        input_dim=args.input_dim, max_ihls=args.max_ihls, df_max_exp=args.df_max_exp,
        include_df_one=args.include_df_one, alpha=args.alpha, seed=args.seed,
        epochs=args.epochs, batch_size=args.batch, learning_rate=args.lr,
        split_fraction=args.split, hidden_activation=args.activation, optimizer=args.optimizer,
        metric=args.metric, max_passes=args.max_passes, workers=args.workers,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        manifest = manifest_from_args(args)
        if args.command == "search":
            result = next(iter(run_search(manifest).values()))
            print(json.dumps(result.as_dict(include_timing=True) | {"out": manifest.out}, indent=2))
        else:
            report = compare_algorithms(manifest)
            print(report.format_table())
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
