"""Batch driver: ``cogtags ingest | topics | evaluate``.

Every subcommand accepts ``--config FILE`` with flat ``key=value`` lines
(keys are flag names, dashes or underscores); explicit flags override it.
Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .core import build_folksonomy
from .evaluation import ALGORITHMS, NEEDS_TOPICS, BenchmarkParams, format_table, run_benchmark, write_query_log, write_summary_csv
from .ingest import DEFAULT_BLACKLIST, PreprocessConfig, parse_dump, preprocess, split_train_test, write_posts
from .topics import LdaConfig, build_documents, load_model, save_model, train_lda

log = logging.getLogger("cogtags")

_BOOL_KEYS = {"lowercase", "lda_on_full", "strict_precision"}


class UsageError(Exception):
    pass


def load_config(path: str | Path) -> dict[str, object]:
    values: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key in _BOOL_KEYS:
                values[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                values[key] = value
    return values


def sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir: Path, command: str, args: argparse.Namespace, inputs: dict[str, str | None]) -> None:
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in ("func", "config", "subparsers")}
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "inputs": {name: {"path": str(p), "sha256": sha256(p)} for name, p in inputs.items() if p},
    }
    with open(out_dir / f"manifest_{command}.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_file(path: str | None, what: str) -> Path:
    if not path:
        raise UsageError(f"{what} is required")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} not found: {p}")
    return p


def _load_split(path: Path, min_posts: int):
    posts, report = parse_dump(path)
    if report.skipped:
        log.warning("%d malformed rows skipped", report.skipped)
    folk = build_folksonomy(posts)
    return folk, split_train_test(folk, PreprocessConfig(min_user_posts_for_eval=min_posts))


def cmd_ingest(args: argparse.Namespace) -> int:
    src = _require_file(args.input, "input dataset")
    blacklist = DEFAULT_BLACKLIST
    if args.blacklist:
        with open(_require_file(args.blacklist, "blacklist file"), encoding="utf-8") as fh:
            blacklist = frozenset(line.strip() for line in fh if line.strip())
    cfg = PreprocessConfig(
        blacklist=blacklist,
        lowercase=args.lowercase,
        user_sample_fraction=args.sample_fraction,
        sample_seed=args.sample_seed,
    )
    posts, report = parse_dump(src, args.format)
    posts = preprocess(posts, cfg)
    if not posts:
        log.error("no posts left after preprocessing")
        return 1
    folk = build_folksonomy(posts)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_posts(folk.posts, out / "posts.tsv")
    stats = folk.stats
    with open(out / "stats.txt", "w", encoding="utf-8") as fh:
        for key, value in stats._asdict().items():
            fh.write(f"{key}={value}\n")
        fh.write(f"rows={report.rows}\nskipped={report.skipped}\n")
    write_manifest(out, "ingest", args, {"input": src, "blacklist": args.blacklist})
    print("|P|={} |U|={} |R|={} |T|={} |TAS|={}".format(*stats))
    return 0


def cmd_topics(args: argparse.Namespace) -> int:
    src = _require_file(args.input, "canonical post TSV")
    folk, split = _load_split(src, args.min_posts)
    cfg = LdaConfig(
        num_topics=args.topics, alpha=args.lda_alpha, eta=args.lda_eta, iterations=args.lda_iterations, seed=args.lda_seed
    )
    docs = build_documents(folk if args.lda_on_full else split.train)
    log.info("training LDA Z=%d seed=%d iterations=%d", cfg.num_topics, cfg.seed, cfg.iterations)
    start = time.perf_counter()
    model = train_lda(docs, cfg)
    log.info("LDA done in %.1fs", time.perf_counter() - start)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    model_path = Path(args.model) if args.model else out / "topics.tsv"
    save_model(model, model_path)
    write_manifest(out, "topics", args, {"input": src})
    print(f"wrote {model_path} ({len(model.resources)} resources, Z={cfg.num_topics})")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown or not algorithms:
        raise UsageError(f"unknown algorithm(s) {unknown}; choose from {', '.join(ALGORITHMS)}")
    src = _require_file(args.input, "canonical post TSV")
    model = None
    if NEEDS_TOPICS.intersection(algorithms):
        if not args.model:
            raise UsageError("topic model required for " + ", ".join(sorted(NEEDS_TOPICS.intersection(algorithms))))
        model = load_model(_require_file(args.model, "topic model"))

    _, split = _load_split(src, args.min_posts)
    params = BenchmarkParams(
        beta=args.beta,
        decay=args.decay,
        cf_neighbors=args.cf_neighbors,
        girptm_mu=args.girptm_mu,
        strict_precision=args.strict_precision,
    )
    reports = run_benchmark(split, algorithms, model, params)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_summary_csv(reports, out / "summary.csv")
    for rep in reports:
        write_query_log(rep, out / f"queries_{rep.algorithm}.tsv")
    write_manifest(out, "evaluate", args, {"input": src, "model": args.model})
    print(f"{len(split.eval_users)} evaluation users")
    print(format_table(reports))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cogtags", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.set_defaults(subparsers=sub.choices)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="key=value file with defaults for any flag")
        p.add_argument("--input", help="input file")
        p.add_argument("--output-dir", default="out")

    p = sub.add_parser("ingest", help="parse and preprocess a dump into canonical TSV")
    common(p)
    p.add_argument("--format", default="tsv", choices=["tsv"])
    p.add_argument("--blacklist", help="file with one blacklisted tag per line")
    p.add_argument("--lowercase", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--sample-fraction", type=float, default=1.0)
    p.add_argument("--sample-seed", type=int, default=0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("topics", help="train LDA on the training split and persist it")
    common(p)
    p.add_argument("--min-posts", type=int, default=20)
    p.add_argument("--topics", type=int, default=1000)
    p.add_argument("--lda-seed", type=int, default=0)
    p.add_argument("--lda-iterations", type=int, default=500)
    p.add_argument("--lda-alpha", type=float, default=None)
    p.add_argument("--lda-eta", type=float, default=0.01)
    p.add_argument("--lda-on-full", action="store_true", help="train on all posts, test posts included")
    p.add_argument("--model", help="output model path (default OUTPUT_DIR/topics.tsv)")
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("evaluate", help="run the leave-last-post-out benchmark")
    common(p)
    p.add_argument("--model", help="topic model file (needed by 3l, 3lt, 3lt_mpr)")
    p.add_argument("--algorithms", default="mp,mp_u,mp_r,mp_u_r,cf,folkrank,girptm,bll_c")
    p.add_argument("--min-posts", type=int, default=20)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--decay", type=float, default=0.5)
    p.add_argument("--cf-neighbors", type=int, default=20)
    p.add_argument("--girptm-mu", type=float, default=1e-6)
    p.add_argument("--strict-precision", action="store_true", help="divide precision by k even for short lists")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config:
            args.subparsers[args.command].set_defaults(**load_config(args.config))
            args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"cogtags {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cogtags {args.command}: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, FileNotFoundError) else 1
    except ValueError as exc:
        print(f"cogtags {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
