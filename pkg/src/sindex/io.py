"""Tab-separated corpus ingestion and ranking serialization.

Input files (UTF-8, one header line, tab-separated):

* papers:       ``paper_id  year  venue_id``  (venue_id may be empty)
* citations:    ``cited_id  citing_id``
* authorships:  ``paper_id  author_id``

Rankings are written as TSV (``external_key raw_score scaled_score rank``)
or JSON. Floats are written with 17 significant digits so a round trip is
exact; undefined values are written as empty fields (``null`` in JSON).
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

from .analysis import RankingRow, RankingTable
from .exceptions import ParseError
from .graph import (
    DEFAULT_YEAR_RANGE,
    LENIENT,
    STRICT,
    UNDATED_YEAR,
    CitationGraph,
    EntityKind,
    PaperRecord,
    build_graph,
)

__all__ = [
    "PAPERS_HEADER",
    "CITATIONS_HEADER",
    "AUTHORSHIPS_HEADER",
    "RANKING_HEADER",
    "FileReport",
    "IngestReport",
    "CorpusPaths",
    "load_corpus",
    "write_scores",
    "read_scores",
    "write_tsv",
    "format_float",
    "write_corpus",
]

PAPERS_HEADER = ("paper_id", "year", "venue_id")
CITATIONS_HEADER = ("cited_id", "citing_id")
AUTHORSHIPS_HEADER = ("paper_id", "author_id")
RANKING_HEADER = ("external_key", "raw_score", "scaled_score", "rank")

PathLike = Union[str, os.PathLike]


@dataclass
class FileReport:
    path: str = ""
    lines_read: int = 0
    header_lines: int = 0
    records_accepted: int = 0
    duplicates_dropped: int = 0
    selfloops_dropped: int = 0
    malformed_lines: int = 0
    unknown_keys: int = 0
    undated_records: int = 0

    def reconciles(self) -> bool:
        return self.lines_read == (
            self.records_accepted
            + self.duplicates_dropped
            + self.selfloops_dropped
            + self.malformed_lines
            + self.unknown_keys
            + self.header_lines
        )


@dataclass
class IngestReport:
    mode: str = STRICT
    files: dict = field(default_factory=dict)
    papers: int = 0
    authors: int = 0
    venues: int = 0
    citations: int = 0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "files": {name: asdict(rep) for name, rep in self.files.items()},
            "entities": {
                "papers": self.papers,
                "authors": self.authors,
                "venues": self.venues,
                "citations": self.citations,
            },
        }


@dataclass(frozen=True)
class CorpusPaths:
    papers: PathLike
    citations: Optional[PathLike] = None
    authorships: Optional[PathLike] = None


class _Reader:
    """Iterates the data lines of one TSV file, enforcing strict/lenient rules."""

    def __init__(self, path, header, report: FileReport, strict: bool):
        self.path = Path(path)
        self.header = header
        self.report = report
        self.strict = strict
        report.path = str(path)

    def fail(self, lineno, column, message):
        if self.strict:
            raise ParseError(self.path, lineno, column, message)
        self.report.malformed_lines += 1

    def __iter__(self):
        with open(self.path, encoding="utf-8", newline="") as fh:
            for lineno, line in enumerate(fh, start=1):
                self.report.lines_read += 1
                line = line.rstrip("\n").rstrip("\r")
                fields = line.split("\t")
                if lineno == 1:
                    self.report.header_lines += 1
                    if self.strict and tuple(f.strip() for f in fields) != self.header:
                        expected = "\t".join(self.header)
                        raise ParseError(self.path, 1, 1, f"expected header {expected!r}, got {line!r}")
                    continue
                if len(fields) != len(self.header):
                    self.fail(lineno, min(len(fields), len(self.header)) + 1,
                              f"expected {len(self.header)} tab-separated fields, got {len(fields)}")
                    continue
                yield lineno, fields


def _read_papers(path, report, strict, year_range, undated_year):
    records = []
    seen = set()
    lo, hi = year_range
    reader = _Reader(path, PAPERS_HEADER, report, strict)
    for lineno, (key, year_s, venue) in reader:
        if not key:
            reader.fail(lineno, 1, "empty paper_id")
            continue
        year_s = year_s.strip()
        if year_s == "":
            if strict:
                raise ParseError(path, lineno, 2, f"paper {key!r} has no year")
            year = None
            report.undated_records += 1
        else:
            try:
                year = int(year_s)
            except ValueError:
                reader.fail(lineno, 2, f"year {year_s!r} is not an integer")
                continue
            if not lo <= year <= hi:
                reader.fail(lineno, 2, f"year {year} outside [{lo}, {hi}]")
                continue
        if key in seen:
            report.duplicates_dropped += 1
            continue
        seen.add(key)
        report.records_accepted += 1
        records.append(PaperRecord(key, year, venue or None))
    return records


def _read_pairs(path, header, report, strict, known, selfloops):
    pairs = []
    seen = set()
    reader = _Reader(path, header, report, strict)
    for lineno, (left, right) in reader:
        if not left or not right:
            reader.fail(lineno, 1 if not left else 2, "empty key")
            continue
        paper_cols = (1, 2) if selfloops else (1,)
        unknown = [c for c, k in zip(paper_cols, (left, right)) if k not in known]
        if unknown:
            if strict:
                bad = (left, right)[unknown[0] - 1]
                raise ParseError(path, lineno, unknown[0], f"unknown paper key {bad!r}")
            report.unknown_keys += 1
            continue
        if selfloops and left == right:
            report.selfloops_dropped += 1
            continue
        if (left, right) in seen:
            report.duplicates_dropped += 1
            continue
        seen.add((left, right))
        report.records_accepted += 1
        pairs.append((left, right))
    return pairs


def load_corpus(
    paths,
    mode: str = STRICT,
    year_range=DEFAULT_YEAR_RANGE,
    undated_year: int = UNDATED_YEAR,
):
    """Read the corpus files into a graph.

    ``paths`` is a :class:`CorpusPaths` or a mapping with ``papers`` and
    optional ``citations``/``authorships`` entries. Returns
    ``(graph, report)``.

    Strict mode raises :class:`ParseError` (with file, line and column) on
    the first bad line. Lenient mode counts bad lines and carries on.
    """
    if mode not in (STRICT, LENIENT):
        raise ValueError(f"mode must be 'strict' or 'lenient', got {mode!r}")
    if not isinstance(paths, CorpusPaths):
        paths = CorpusPaths(**dict(paths))
    strict = mode == STRICT
    report = IngestReport(mode=mode)

    rep = report.files["papers"] = FileReport()
    papers = _read_papers(paths.papers, rep, strict, year_range, undated_year)
    known = {p.key for p in papers}

    citations = []
    if paths.citations is not None:
        rep = report.files["citations"] = FileReport()
        citations = _read_pairs(paths.citations, CITATIONS_HEADER, rep, strict, known, selfloops=True)
    authorships = []
    if paths.authorships is not None:
        rep = report.files["authorships"] = FileReport()
        authorships = _read_pairs(paths.authorships, AUTHORSHIPS_HEADER, rep, strict, known, selfloops=False)

    graph = build_graph(
        papers,
        citations,
        authorships,
        mode=LENIENT,  # records are already validated above
        year_range=year_range,
        undated_year=undated_year,
    )
    report.papers = graph.n_papers
    report.authors = graph.n_authors
    report.venues = graph.n_venues
    report.citations = graph.n_citations
    return graph, report


# -- output -----------------------------------------------------------------


def format_float(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".17g")


def _parse_float(s: str):
    return None if s == "" else float(s)


def write_tsv(path: PathLike, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(str(c) for c in row) + "\n")


def _check_key(key: str):
    if "\t" in key or "\n" in key or "\r" in key:
        raise ValueError(f"key {key!r} cannot be written to TSV")


def write_scores(table: RankingTable, path: PathLike, format: str = "tsv") -> None:
    """Write a ranking table as TSV (header + one line per row) or JSON."""
    if format == "tsv":
        rows = []
        for r in table.rows:
            _check_key(r.external_key)
            rows.append((
                r.external_key,
                format_float(r.raw_score),
                format_float(r.scaled_score),
                "" if r.rank is None else str(r.rank),
            ))
        write_tsv(path, RANKING_HEADER, rows)
    elif format == "json":
        doc = {
            "metric": table.metric,
            "entity": table.entity,
            "config": table.config,
            "rows": [
                {
                    "external_key": r.external_key,
                    "raw_score": None if math.isnan(r.raw_score) else r.raw_score,
                    "scaled_score": r.scaled_score,
                    "rank": r.rank,
                }
                for r in table.rows
            ],
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {format!r}; use 'tsv' or 'json'")


def read_scores(path: PathLike, format: Optional[str] = None) -> RankingTable:
    """Parse a table written by :func:`write_scores`."""
    if format is None:
        format = "json" if str(path).endswith(".json") else "tsv"
    if format == "json":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        rows = [
            RankingRow(
                r["external_key"],
                math.nan if r["raw_score"] is None else float(r["raw_score"]),
                r["scaled_score"],
                r["rank"],
            )
            for r in doc["rows"]
        ]
        return RankingTable(rows, doc.get("metric", ""), doc.get("entity", ""), doc.get("config", {}))
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != RANKING_HEADER:
            raise ParseError(path, 1, 1, f"unexpected ranking header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            fields = line.rstrip("\n").split("\t")
            if len(fields) != len(RANKING_HEADER):
                raise ParseError(path, lineno, 1, "expected 4 fields")
            key, raw, scaled, rank = fields
            raw_v = _parse_float(raw)
            rows.append(RankingRow(
                key,
                math.nan if raw_v is None else raw_v,
                _parse_float(scaled),
                None if rank == "" else int(rank),
            ))
    return RankingTable(rows)


def write_corpus(graph: CitationGraph, directory: PathLike) -> CorpusPaths:
    """Write ``graph`` as papers/citations/authorships TSV files in ``directory``.

    Undated papers are written with an empty year.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = CorpusPaths(
        directory / "papers.tsv", directory / "citations.tsv", directory / "authorships.tsv"
    )
    keys = graph.paper_keys
    for kind in EntityKind:
        for key in graph.keys(kind):
            _check_key(key)
    venues = graph.venue_keys
    write_tsv(paths.papers, PAPERS_HEADER, (
        (keys[i], "" if y == UNDATED_YEAR else y, "" if v < 0 else venues[v])
        for i, (y, v) in enumerate(zip(graph.years.tolist(), graph.paper_venue.tolist()))
    ))
    cited, citing = graph.edges()
    write_tsv(paths.citations, CITATIONS_HEADER, (
        (keys[c], keys[q]) for c, q in zip(cited.tolist(), citing.tolist())
    ))
    authors, papers = graph.authorship_pairs()
    order = sorted(range(len(papers)), key=lambda i: (papers[i], authors[i]))
    write_tsv(paths.authorships, AUTHORSHIPS_HEADER, (
        (keys[papers[i]], graph.author_keys[authors[i]]) for i in order
    ))
    return paths
