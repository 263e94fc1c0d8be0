"""Command-line interface.

Subcommands: ``score``, ``compare``, ``report {histogram,growth,recall,probe}``
and ``generate``. Every command writes its result to ``--out`` plus a JSON
manifest at ``<out>.manifest.json``. Any option can also be set through an
``IMPACT_<OPTION>`` environment variable (``IMPACT_WALK_LENGTH=3``); flags
on the command line take precedence.

Exit codes: 0 success, 2 usage error, 3 input/ingest error, 4 metric error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .analysis import (
    rank_scores,
    recall_report,
    score_histogram,
    self_citation_probe,
    growth_curve,
    spearman_rho,
)
from .baselines import PageRankConfig, citation_count, h_index, jif, pagerank
from .engine import (
    MetricConfig,
    aggregate,
    compute_paper_sindex,
    resolve_threads,
    restrict_published,
    scale_scores,
)
from .exceptions import SIndexError
from .graph import EntityKind, TemporalWindow
from .io import CorpusPaths, format_float, load_corpus, write_corpus, write_scores, write_tsv
from .synthetic import preferential_attachment_graph
from .validation import check_window

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INGEST = 3
EXIT_METRIC = 4

METRICS = ("sindex", "sr-index", "citations", "h-index", "jif", "pagerank")
ENTITIES = ("paper", "author", "venue")
COMPATIBLE = {
    "sindex": ENTITIES,
    "sr-index": ENTITIES,
    "citations": ENTITIES,
    "h-index": ("author",),
    "jif": ("venue",),
    "pagerank": ("paper",),
}


class UsageError(Exception):
    pass


class IngestFailure(Exception):
    pass


def _env(dest, default, type=str):
    raw = os.environ.get("IMPACT_" + dest.upper())
    if raw is None:
        return default
    if type is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return type(raw)


def _int_or_none(s):
    return None if s in (None, "", "none") else int(s)


def _float_or_none(s):
    return None if s in (None, "", "none") else float(s)


class _Formatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


def _add(parser, *flags, dest, default=None, type=str, **kw):
    """add_argument with an IMPACT_<DEST> environment override of the default."""
    if kw.get("action") == "store_true":
        parser.add_argument(*flags, dest=dest, default=_env(dest, default, bool), **kw)
    else:
        parser.add_argument(*flags, dest=dest, default=_env(dest, default, type), type=type, **kw)


def _corpus_args(p):
    g = p.add_argument_group("corpus")
    _add(g, "--papers", dest="papers", help="papers TSV (paper_id, year, venue_id)")
    _add(g, "--citations", dest="citations", help="citations TSV (cited_id, citing_id)")
    _add(g, "--authorships", dest="authorships", help="authorships TSV (paper_id, author_id)")
    _add(g, "--mode", dest="mode", default="strict", help="ingestion mode: strict or lenient")
    _add(g, "--subset", dest="subset", help="file of paper keys, one per line; score the induced subgraph only")
    _add(g, "--threads", dest="threads", default=None, type=_int_or_none,
         help="worker threads for matrix-vector products (None = all cores); never changes output")


def _walk_args(p, prefix=""):
    dash = f"--{prefix}-" if prefix else "--"
    under = f"{prefix}_" if prefix else ""
    default_decay = None if prefix else 0.5
    default_m = None if prefix else 4
    _add(p, f"{dash}decay", dest=f"{under}decay", default=default_decay, type=_float_or_none,
         help="decay factor d in (0, 1]" + (" (defaults to --decay)" if prefix else ""))
    _add(p, f"{dash}walk-length", dest=f"{under}walk_length", default=default_m, type=_int_or_none,
         help="walk length m >= 1" + (" (defaults to --walk-length)" if prefix else ""))


def _metric_args(p, with_metric=True):
    g = p.add_argument_group("metric")
    if with_metric:
        _add(g, "--metric", dest="metric", default="sindex", help="one of " + ", ".join(METRICS))
    _add(g, "--entity", dest="entity", default="paper", help="one of " + ", ".join(ENTITIES))
    _walk_args(g)
    _add(g, "--window", dest="window", default=None, type=_int_or_none,
         help="window span r in years (sr-index; JIF publication window, default 2 there)")
    _add(g, "--ref-year", dest="ref_year", default=None, type=_int_or_none,
         help="last year of the window (None = newest publication year)")
    _add(g, "--damping", dest="damping", default=0.5, type=float, help="PageRank damping factor")
    _add(g, "--pagerank-tol", dest="pagerank_tol", default=1e-10, type=float, help="PageRank L1 tolerance")
    _add(g, "--pagerank-max-iter", dest="pagerank_max_iter", default=200, type=int,
         help="PageRank iteration cap")
    _add(g, "--jif-cites-in-ref-year-only", dest="jif_cites_in_ref_year_only", default=False,
         action="store_true", help="JIF: count only citations made in the reference year")


def _out_args(p):
    _add(p, "--out", dest="out", help="output file; the manifest goes to <out>.manifest.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sindex",
        description="Research-impact scores over citation graphs.",
        epilog="Options may be set via IMPACT_<OPTION> environment variables.",
        formatter_class=_Formatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("score", help="compute one metric and write a ranking table", formatter_class=_Formatter)
    _corpus_args(p)
    _metric_args(p)
    _add(p, "--scaled", dest="scaled", default=False, action="store_true", help="add log2-scaled scores")
    _add(p, "--top", dest="top", default=None, type=_int_or_none, help="keep only the top K rows")
    _add(p, "--published-within", dest="published_within", default=None, type=_int_or_none,
         help="paper rows only: keep papers published in the last R years up to --ref-year")
    _add(p, "--format", dest="format", default=None, help="tsv or json (None = from the --out suffix)")
    _out_args(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("compare", help="Spearman correlation between two metrics", formatter_class=_Formatter)
    _corpus_args(p)
    _metric_args(p, with_metric=False)
    _add(p, "--left", dest="left", default="sindex", help="first metric")
    _add(p, "--right", dest="right", default="citations", help="second metric")
    _walk_args(p, "left")
    _walk_args(p, "right")
    _out_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="analysis artifacts", formatter_class=_Formatter)
    rsub = p.add_subparsers(dest="report", metavar="REPORT")
    rsub.required = True

    r = rsub.add_parser("histogram", help="logarithmic score histogram (TSV)", formatter_class=_Formatter)
    _corpus_args(r)
    _metric_args(r)
    _add(r, "--bins", dest="bins", default=20, type=int, help="number of bins")
    _add(r, "--base", dest="base", default=10.0, type=float, help="bin width factor (> 1)")
    _add(r, "--start", dest="start", default=None, type=_float_or_none,
         help="lower edge of the first bin (None = smallest positive score)")
    _out_args(r)
    r.set_defaults(func=cmd_histogram)

    r = rsub.add_parser("growth", help="score of one paper as citations accumulate (TSV)",
                        formatter_class=_Formatter)
    _corpus_args(r)
    _walk_args(r)
    _add(r, "--paper", dest="paper", help="paper key")
    _add(r, "--from", dest="year_from", default=None, type=_int_or_none,
         help="first year (None = year of publication)")
    _add(r, "--to", dest="year_to", default=None, type=_int_or_none, help="last year (None = newest year)")
    _out_args(r)
    r.set_defaults(func=cmd_growth)

    r = rsub.add_parser("recall", help="share of labelled entities in the top fraction",
                        formatter_class=_Formatter)
    _corpus_args(r)
    _metric_args(r)
    _add(r, "--labels", dest="labels", help="file with one entity key per line")
    _add(r, "--fraction", dest="fraction", default=0.005, type=float, help="top fraction in (0, 1]")
    _out_args(r)
    r.set_defaults(func=cmd_recall)

    r = rsub.add_parser("probe", help="self-citation robustness probe (JSON)", formatter_class=_Formatter)
    _corpus_args(r)
    _walk_args(r)
    _add(r, "--author", dest="author", help="author key")
    _add(r, "--inject", dest="inject", default=1, type=int, help="self-citations to inject")
    _out_args(r)
    r.set_defaults(func=cmd_probe)

    p = sub.add_parser("generate", help="write a synthetic preferential-attachment corpus",
                       formatter_class=_Formatter)
    _add(p, "--edges", dest="edges", default=10000, type=int, help="number of citation edges")
    _add(p, "--refs-per-paper", dest="refs_per_paper", default=8, type=int, help="references per new paper")
    _add(p, "--authors", dest="authors", default=1000, type=int, help="number of authors")
    _add(p, "--venues", dest="venues", default=50, type=int, help="number of venues")
    _add(p, "--seed", dest="seed", default=0, type=int, help="random seed")
    _add(p, "--out-dir", dest="out_dir", help="directory for papers/citations/authorships.tsv")
    p.set_defaults(func=cmd_generate)
    return parser


# -- helpers ----------------------------------------------------------------


class _Run:
    """Collects timings and inputs for the manifest."""

    def __init__(self, args):
        self.args = args
        self.timings = {}
        self.inputs = {}
        self.ingest = None

    @contextmanager
    def phase(self, name):
        t0 = time.perf_counter()
        yield
        self.timings[name] = time.perf_counter() - t0

    def add_input(self, name, path):
        h = hashlib.sha256()
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
        self.inputs[name] = {"path": str(path), "sha256": h.hexdigest(), "bytes": os.path.getsize(path)}

    def write_manifest(self, out):
        config = {
            k: v for k, v in sorted(vars(self.args).items())
            if k not in ("func", "threads") and not callable(v)
        }
        doc = {
            "tool": "sindex",
            "version": __version__,
            "command": self.args.command if self.args.command != "report" else f"report {self.args.report}",
            "config": config,
            "inputs": self.inputs,
            "ingest": self.ingest,
            "runtime": {
                "threads": resolve_threads(getattr(self.args, "threads", None)),
                "timings_seconds": self.timings,
            },
        }
        with open(f"{out}.manifest.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) in (None, ""):
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _load(args, run):
    _require(args, "papers", "out")
    if args.mode not in ("strict", "lenient"):
        raise UsageError("--mode must be strict or lenient")
    paths = CorpusPaths(args.papers, args.citations, args.authorships)
    try:
        with run.phase("ingest"):
            for name in ("papers", "citations", "authorships"):
                if getattr(paths, name) is not None:
                    run.add_input(name, getattr(paths, name))
            graph, report = load_corpus(paths, mode=args.mode)
    except (OSError, UnicodeDecodeError, SIndexError) as exc:
        raise IngestFailure(str(exc)) from exc
    run.ingest = report.to_dict()
    if args.subset is not None:
        try:
            run.add_input("subset", args.subset)
            with open(args.subset, encoding="utf-8") as fh:
                keys = [line.strip() for line in fh if line.strip()]
            graph = graph.subgraph(keys)
        except (OSError, UnicodeDecodeError, SIndexError) as exc:
            raise IngestFailure(str(exc)) from exc
        run.ingest["subset_papers"] = graph.n_papers
    return graph


def _check_compat(metric, entity, args):
    if metric not in METRICS:
        raise UsageError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    if entity not in ENTITIES:
        raise UsageError(f"unknown entity {entity!r}; choose from {', '.join(ENTITIES)}")
    if entity not in COMPATIBLE[metric]:
        allowed = ", ".join(COMPATIBLE[metric])
        raise UsageError(f"metric {metric} is defined for {allowed} only, not {entity}")
    if metric == "sr-index" and args.window is None:
        raise UsageError("sr-index needs --window")
    if metric in ("sindex", "citations", "h-index", "pagerank") and args.window is not None:
        raise UsageError(f"--window does not apply to {metric}; use sr-index for windowed scores")


def _walk_config(args, decay, walk_length, window=None):
    try:
        return MetricConfig(
            decay if decay is not None else args.decay,
            walk_length if walk_length is not None else args.walk_length,
            window if window is not None else TemporalWindow.unbounded(),
        )
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _compute(graph, args, metric, entity, decay=None, walk_length=None):
    """Score vector for one metric/entity pair."""
    _check_compat(metric, entity, args)
    kind = EntityKind(entity)
    threads = args.threads
    if metric in ("sindex", "sr-index"):
        window = None
        if metric == "sr-index":
            window = check_window(args.window, args.ref_year, graph)
        config = _walk_config(args, decay, walk_length, window)
        papers = compute_paper_sindex(graph, config, threads=threads)
        return papers if kind is EntityKind.PAPER else aggregate(papers, graph, kind)
    if metric == "citations":
        papers = citation_count(graph)
        return papers if kind is EntityKind.PAPER else aggregate(papers, graph, kind)
    if metric == "h-index":
        return h_index(graph)
    if metric == "jif":
        span = 2 if args.window is None else args.window
        return jif(graph, check_window(span, args.ref_year, graph), args.jif_cites_in_ref_year_only)
    try:
        config = PageRankConfig(args.damping, args.pagerank_tol, args.pagerank_max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return pagerank(graph, config, threads=threads)


def _metric_config_echo(args, metric, decay=None, walk_length=None):
    out = {"metric": metric}
    if metric in ("sindex", "sr-index"):
        out["decay"] = decay if decay is not None else args.decay
        out["walk_length"] = walk_length if walk_length is not None else args.walk_length
    if metric in ("sr-index", "jif"):
        out["window"] = args.window if args.window is not None else 2
        out["ref_year"] = args.ref_year
    if metric == "pagerank":
        out.update(damping=args.damping, tolerance=args.pagerank_tol, max_iterations=args.pagerank_max_iter)
    return out


# -- commands ---------------------------------------------------------------


def cmd_score(args, run):
    _check_compat(args.metric, args.entity, args)
    fmt = args.format or ("json" if str(args.out or "").endswith(".json") else "tsv")
    if fmt not in ("tsv", "json"):
        raise UsageError("--format must be tsv or json")
    if args.published_within is not None and args.entity != "paper":
        raise UsageError("--published-within applies to paper rows only")
    graph = _load(args, run)
    with run.phase("metric"):
        scores = _compute(graph, args, args.metric, args.entity)
        if args.published_within is not None:
            try:
                window = check_window(args.published_within, args.ref_year, graph)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            scores = restrict_published(scores, graph, window)
    with run.phase("rank"):
        table = rank_scores(
            scores,
            scale_scores(scores) if args.scaled else None,
            metric=args.metric,
            config=_metric_config_echo(args, args.metric),
        ).head(args.top)
    with run.phase("write"):
        write_scores(table, args.out, fmt)
    return args.out


def cmd_compare(args, run):
    _check_compat(args.left, args.entity, args)
    _check_compat(args.right, args.entity, args)
    graph = _load(args, run)
    with run.phase("metric"):
        left = _compute(graph, args, args.left, args.entity, args.left_decay, args.left_walk_length)
        right = _compute(graph, args, args.right, args.entity, args.right_decay, args.right_walk_length)
    with run.phase("correlate"):
        rho = spearman_rho(left, right) if len(left) >= 2 else math.nan
        lt = rank_scores(left)
        rt = rank_scores(right)
    lrank = {r.external_key: r.rank for r in lt}
    rrank = {r.external_key: r.rank for r in rt}
    rows = [
        (key, format_float(lv), format_float(rv),
         "" if lrank[key] is None else lrank[key], "" if rrank[key] is None else rrank[key])
        for key, lv, rv in zip(left.keys, left.values.tolist(), right.values.tolist())
    ]
    with run.phase("write"):
        write_tsv(args.out, ("external_key", "left_score", "right_score", "left_rank", "right_rank"), rows)
    print(f"spearman_rho\t{format_float(rho) or 'NA'}")
    return args.out


def cmd_histogram(args, run):
    _check_compat(args.metric, args.entity, args)
    graph = _load(args, run)
    with run.phase("metric"):
        scores = _compute(graph, args, args.metric, args.entity)
    try:
        hist = score_histogram(scores.values, args.bins, args.base, args.start)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_tsv(args.out, ("bin_lower", "bin_upper", "count"), hist.rows())
    return args.out


def cmd_growth(args, run):
    _require(args, "paper")
    config = _walk_config(args, None, None)
    graph = _load(args, run)
    p = graph.paper_index(args.paper)
    first = args.year_from if args.year_from is not None else int(graph.years[p])
    last = args.year_to if args.year_to is not None else int(graph.years.max())
    with run.phase("metric"):
        curve = growth_curve(graph, args.paper, config, range(first, last + 1), threads=args.threads)
    write_tsv(args.out, ("year", "score"), ((y, format_float(s)) for y, s in curve))
    return args.out


def cmd_recall(args, run):
    _require(args, "labels")
    _check_compat(args.metric, args.entity, args)
    if not 0 < args.fraction <= 1:
        raise UsageError("--fraction must lie in (0, 1]")
    graph = _load(args, run)
    try:
        run.add_input("labels", args.labels)
        with open(args.labels, encoding="utf-8") as fh:
            labels = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise IngestFailure(str(exc)) from exc
    with run.phase("metric"):
        scores = _compute(graph, args, args.metric, args.entity)
        rep = recall_report(scores, labels, args.fraction)
    doc = {
        "metric": _metric_config_echo(args, args.metric),
        "entity": args.entity,
        "fraction": args.fraction,
        "cutoff": rep.cutoff,
        "recall": rep.recall,
        "labels_resolved": rep.n_labels,
        "labels_found": rep.n_found,
        "labels_unresolved": list(rep.unresolved),
    }
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"recall\t{format_float(rep.recall)}")
    return args.out


def cmd_probe(args, run):
    _require(args, "author")
    config = _walk_config(args, None, None)
    graph = _load(args, run)
    with run.phase("metric"):
        rep = self_citation_probe(graph, args.author, args.inject, config, threads=args.threads)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(rep.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return args.out


def cmd_generate(args, run):
    _require(args, "out_dir")
    with run.phase("generate"):
        graph = preferential_attachment_graph(
            args.edges, args.refs_per_paper, seed=args.seed, n_authors=args.authors, n_venues=args.venues
        )
        write_corpus(graph, args.out_dir)
    return str(Path(args.out_dir) / "papers.tsv")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    run = _Run(args)
    try:
        out = args.func(args, run)
    except UsageError as exc:
        print(f"sindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IngestFailure as exc:
        print(f"sindex: ingest error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except SIndexError as exc:
        print(f"sindex: metric error: {exc}", file=sys.stderr)
        return EXIT_METRIC
    except OSError as exc:
        print(f"sindex: I/O error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    run.write_manifest(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
