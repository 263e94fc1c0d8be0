"""Decay-weighted walk counting over the citation graph.

The paper score is ``sum_{i=1..m} d**i * (number of length-i walks leaving p)``,
computed with ``m`` sparse matrix-vector products against the all-ones vector.
``A**i`` is never formed. Author and venue scores are sums of paper scores.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import LengthMismatch, NonFiniteAccumulation, UnboundedWindow
from .graph import CitationGraph, EntityKind, TemporalWindow, induce_temporal

__all__ = [
    "MetricConfig",
    "ScoreVector",
    "RowPartitionedMatvec",
    "compute_paper_sindex",
    "aggregate_author_sindex",
    "aggregate_venue_sindex",
    "aggregate",
    "compute_sr_index",
    "scale_scores",
    "restrict_published",
    "resolve_threads",
]


@dataclass(frozen=True)
class MetricConfig:
    decay: float = 0.5
    walk_length: int = 4
    window: TemporalWindow = field(default_factory=TemporalWindow)

    def __post_init__(self):
        if not (0.0 < self.decay <= 1.0):
            raise ValueError(f"decay must lie in (0, 1], got {self.decay!r}")
        if int(self.walk_length) != self.walk_length or self.walk_length < 1:
            raise ValueError(f"walk_length must be a positive integer, got {self.walk_length!r}")


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Dense per-entity scores.

    ``optional=True`` marks vectors in which NaN is the undefined marker
    (JIF of a venue with no papers in the window, log2 of a zero score).
    Otherwise every value is finite and non-negative.
    """

    kind: EntityKind
    values: np.ndarray
    keys: tuple = ()
    optional: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", EntityKind(self.kind))
        values = np.array(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "keys", tuple(self.keys))
        if values.ndim != 1:
            raise ValueError("score values must be one-dimensional")
        if self.keys and len(self.keys) != len(values):
            raise LengthMismatch(f"{len(self.keys)} keys for {len(values)} scores")
        if not self.optional and not (np.all(np.isfinite(values)) and np.all(values >= 0)):
            raise ValueError("scores must be finite and non-negative")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, key):
        if isinstance(key, str):
            return float(self.values[self.keys.index(key)])
        return self.values[key]

    def defined(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def as_dict(self) -> dict:
        return dict(zip(self.keys, self.values.tolist()))


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return int(threads)


class RowPartitionedMatvec:
    """``y = M @ x`` with rows split into contiguous blocks, one per worker.

    Each output row is summed by a single worker in storage order, so the
    result does not depend on the number of workers.
    """

    def __init__(self, matrix, threads: Optional[int] = 1):
        self.matrix = matrix
        self.shape = matrix.shape
        n_rows = matrix.shape[0]
        workers = max(1, min(resolve_threads(threads), n_rows))
        bounds = np.linspace(0, n_rows, workers + 1).astype(np.int64)
        self._blocks = [
            (int(lo), int(hi), matrix[lo:hi]) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
        ]
        self._pool = ThreadPoolExecutor(len(self._blocks)) if len(self._blocks) > 1 else None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if self._pool is None:
            return self.matrix @ x
        out = np.empty(self.shape[0], dtype=np.float64)

        def run(block):
            lo, hi, rows = block
            out[lo:hi] = rows @ x

        list(self._pool.map(run, self._blocks))
        return out

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def compute_paper_sindex(
    graph: CitationGraph, config: MetricConfig = MetricConfig(), threads: Optional[int] = 1
) -> ScoreVector:
    """Paper s-index for every paper of ``graph``.

    A bounded ``config.window`` restricts the walks to citations made inside
    the window (the temporal variant).

    Raises
    ------
    NonFiniteAccumulation
        If a walk count or the accumulator overflows double precision.
    """
    graph = induce_temporal(graph, config.window)
    n = graph.n_papers
    scores = np.zeros(n, dtype=np.float64)
    walks = np.ones(n, dtype=np.float64)
    weight = 1.0
    with RowPartitionedMatvec(graph.adjacency, threads) as matvec:
        for _ in range(config.walk_length):
            walks = matvec(walks)
            weight *= config.decay
            scores += weight * walks
            if not np.all(np.isfinite(scores)):
                raise NonFiniteAccumulation(
                    "walk counts overflowed double precision; reduce walk_length"
                )
    return ScoreVector(EntityKind.PAPER, scores, graph.paper_keys)


def aggregate(paper_scores, graph: CitationGraph, kind) -> ScoreVector:
    """Sum paper scores into authors or venues via the incidence matrices."""
    kind = EntityKind(kind)
    values = paper_scores.values if isinstance(paper_scores, ScoreVector) else np.asarray(paper_scores)
    if isinstance(paper_scores, ScoreVector) and paper_scores.kind is not EntityKind.PAPER:
        raise ValueError(f"expected paper scores, got {paper_scores.kind.value} scores")
    if len(values) != graph.n_papers:
        raise LengthMismatch(f"{len(values)} paper scores for a graph with {graph.n_papers} papers")
    incidence = {EntityKind.AUTHOR: graph.authorship, EntityKind.VENUE: graph.venueship}[kind]
    return ScoreVector(kind, incidence @ values, graph.keys(kind))


def aggregate_author_sindex(paper_scores, graph: CitationGraph) -> ScoreVector:
    return aggregate(paper_scores, graph, EntityKind.AUTHOR)


def aggregate_venue_sindex(paper_scores, graph: CitationGraph) -> ScoreVector:
    """Venue score: the sum, not the mean, of its papers' scores."""
    return aggregate(paper_scores, graph, EntityKind.VENUE)


def compute_sr_index(graph: CitationGraph, config: MetricConfig, threads: Optional[int] = 1) -> dict:
    """Temporal scores for papers, authors and venues.

    Returns a dict keyed by :class:`EntityKind`.
    """
    if not config.window.bounded:
        raise UnboundedWindow("the temporal variant needs a bounded window (span and reference year)")
    papers = compute_paper_sindex(graph, config, threads=threads)
    return {
        EntityKind.PAPER: papers,
        EntityKind.AUTHOR: aggregate_author_sindex(papers, graph),
        EntityKind.VENUE: aggregate_venue_sindex(papers, graph),
    }


def scale_scores(scores: ScoreVector) -> ScoreVector:
    """log2 of every positive score; zero and undefined inputs map to NaN."""
    values = scores.values
    out = np.full(len(values), np.nan)
    positive = values > 0
    out[positive] = np.log2(values[positive])
    return ScoreVector(scores.kind, out, scores.keys, optional=True)


def restrict_published(scores: ScoreVector, graph: CitationGraph, window: TemporalWindow) -> ScoreVector:
    """Paper scores of only the papers published inside ``window``.

    This is an output filter: the scores themselves are not recomputed.
    """
    if scores.kind is not EntityKind.PAPER:
        raise ValueError("only paper scores can be filtered by publication year")
    if len(scores) != graph.n_papers:
        raise LengthMismatch(f"{len(scores)} scores for {graph.n_papers} papers")
    keep = np.flatnonzero(window.contains(graph.years))
    return ScoreVector(
        EntityKind.PAPER,
        scores.values[keep],
        tuple(scores.keys[i] for i in keep.tolist()),
        optional=scores.optional,
    )
