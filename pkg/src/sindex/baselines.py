"""Comparison metrics: citation count, h-index, journal impact factor, PageRank."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .engine import RowPartitionedMatvec, ScoreVector
from .exceptions import EmptyGraph, UnboundedWindow
from .graph import CitationGraph, EntityKind, TemporalWindow

__all__ = [
    "PageRankConfig",
    "PageRankResult",
    "citation_count",
    "h_index",
    "h_index_of_counts",
    "jif",
    "pagerank",
]


def citation_count(graph: CitationGraph) -> ScoreVector:
    """Number of papers citing each paper (row lengths of the adjacency)."""
    counts = np.diff(graph.adjacency.indptr).astype(np.float64)
    return ScoreVector(EntityKind.PAPER, counts, graph.paper_keys)


def h_index_of_counts(counts) -> int:
    """Largest h such that at least h of ``counts`` are >= h."""
    c = np.sort(np.asarray(counts, dtype=np.float64))[::-1]
    if not len(c):
        return 0
    ranks = np.arange(1, len(c) + 1)
    ok = c >= ranks
    return int(ranks[ok][-1]) if ok.any() else 0


def h_index(graph: CitationGraph, citations: Optional[ScoreVector] = None) -> ScoreVector:
    """h-index of every author; authors with no papers score 0."""
    if citations is None:
        citations = citation_count(graph)
    counts = citations.values
    b = graph.authorship
    out = np.zeros(graph.n_authors, dtype=np.float64)
    for a in range(graph.n_authors):
        out[a] = h_index_of_counts(counts[b.indices[b.indptr[a]:b.indptr[a + 1]]])
    return ScoreVector(EntityKind.AUTHOR, out, graph.author_keys)


def jif(
    graph: CitationGraph,
    window: TemporalWindow,
    cites_in_ref_year_only: bool = False,
) -> ScoreVector:
    """Mean citation count of each venue's papers published inside ``window``.

    By default a paper contributes its total citation count. With
    ``cites_in_ref_year_only`` only citations made in ``window.reference_year``
    count, as in the classic impact factor. Venues with no paper in the window
    get NaN.
    """
    if not window.bounded:
        raise UnboundedWindow("JIF needs a bounded publication window")
    if cites_in_ref_year_only:
        a = graph.adjacency
        citing_years = graph.years[a.indices]
        in_ref_year = (citing_years == window.reference_year).astype(np.int64)
        cum = np.concatenate([[0], np.cumsum(in_ref_year)])
        counts = (cum[a.indptr[1:]] - cum[a.indptr[:-1]]).astype(np.float64)
    else:
        counts = citation_count(graph).values
    inside = window.contains(graph.years).astype(np.float64)
    c = graph.venueship
    totals = c @ (counts * inside)
    sizes = c @ inside
    out = np.full(graph.n_venues, np.nan)
    has = sizes > 0
    out[has] = totals[has] / sizes[has]
    return ScoreVector(EntityKind.VENUE, out, graph.venue_keys, optional=True)


@dataclass(frozen=True)
class PageRankConfig:
    damping: float = 0.5
    tolerance: float = 1e-10
    max_iterations: int = 200

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must lie in (0, 1), got {self.damping!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


class PageRankResult(NamedTuple):
    scores: ScoreVector
    converged: bool
    n_iter: int


def pagerank(
    graph: CitationGraph,
    config: PageRankConfig = PageRankConfig(),
    threads: Optional[int] = 1,
    initial=None,
    full_output: bool = False,
):
    """Citation PageRank by power iteration.

    Each citing paper splits its rank equally over its references; papers
    with no references spread their rank uniformly. Iteration stops once the
    L1 change drops below ``config.tolerance``.

    Returns the paper :class:`ScoreVector`, or a :class:`PageRankResult`
    carrying the convergence flag when ``full_output`` is set.
    """
    n = graph.n_papers
    if n == 0:
        raise EmptyGraph("PageRank needs at least one paper")
    refs = graph.reference_counts().astype(np.float64)
    dangling = refs == 0
    inv_refs = np.zeros(n)
    inv_refs[~dangling] = 1.0 / refs[~dangling]
    d = config.damping

    if initial is None:
        rank = np.full(n, 1.0 / n)
    else:
        rank = np.asarray(initial, dtype=np.float64).copy()
        rank /= rank.sum()

    converged = False
    it = 0
    with RowPartitionedMatvec(graph.adjacency, threads) as matvec:
        for it in range(1, config.max_iterations + 1):
            spread = d * rank[dangling].sum() / n
            new = matvec(rank * inv_refs)
            new = d * new + ((1.0 - d) / n + spread)
            new /= new.sum()
            delta = np.abs(new - rank).sum()
            rank = new
            if delta < config.tolerance:
                converged = True
                break
    scores = ScoreVector(EntityKind.PAPER, rank, graph.paper_keys)
    if full_output:
        return PageRankResult(scores, converged, it)
    return scores
