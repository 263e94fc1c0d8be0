"""Synthetic citation graphs for tests, benchmarks and demos."""
from __future__ import annotations

import numpy as np

from .graph import CitationGraph

__all__ = ["preferential_attachment_graph", "random_graph", "attach_people"]


def _keys(prefix, n):
    width = len(str(max(n - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def preferential_attachment_graph(
    n_edges: int,
    refs_per_paper: int = 8,
    seed=0,
    first_year: int = 1950,
    last_year: int = 2020,
    n_authors: int = 0,
    n_venues: int = 0,
) -> CitationGraph:
    """Growing citation graph with ``n_edges`` citations.

    Papers arrive one at a time and cite up to ``refs_per_paper`` earlier
    papers, chosen with probability proportional to ``1 + citations``.
    Publication years increase with arrival order, so the graph is acyclic
    and every citation points back in time.
    """
    rng = np.random.default_rng(seed)
    k = refs_per_paper
    pool = np.empty(2 * n_edges + n_edges // max(k, 1) + 16, dtype=np.int64)
    pool[0] = 0
    size = 1
    cited = np.empty(n_edges, dtype=np.int64)
    citing = np.empty(n_edges, dtype=np.int64)
    n_done = 0
    paper = 1
    while n_done < n_edges:
        picks = np.unique(pool[rng.integers(0, size, size=min(k, paper))])
        picks = picks[: n_edges - n_done]
        m = len(picks)
        cited[n_done:n_done + m] = picks
        citing[n_done:n_done + m] = paper
        n_done += m
        if size + m + 1 > len(pool):
            pool = np.concatenate([pool, np.empty(len(pool), dtype=np.int64)])
        pool[size:size + m] = picks
        pool[size + m] = paper
        size += m + 1
        paper += 1
    n_papers = paper
    years = first_year + (np.arange(n_papers) * (last_year - first_year + 1)) // n_papers
    graph = CitationGraph(_keys("p", n_papers), years, cited, citing)
    if n_authors or n_venues:
        graph = attach_people(graph, n_authors, n_venues, seed=rng)
    return graph


def random_graph(n_papers: int, n_edges: int, seed=0, years=None) -> CitationGraph:
    """Uniform random directed graph; cycles allowed, no self-loops or duplicates.

    ``n_edges`` is capped at ``n_papers * (n_papers - 1)``.
    """
    rng = np.random.default_rng(seed)
    n_edges = min(n_edges, n_papers * (n_papers - 1))
    codes = set()
    while len(codes) < n_edges:
        a, b = rng.integers(0, n_papers, size=2)
        if a != b:
            codes.add((int(a), int(b)))
    pairs = np.array(sorted(codes), dtype=np.int64).reshape(-1, 2)
    if years is None:
        years = rng.integers(1990, 2021, size=n_papers)
    return CitationGraph(_keys("p", n_papers), years, pairs[:, 0], pairs[:, 1])


def attach_people(graph: CitationGraph, n_authors: int, n_venues: int, seed=0,
                  max_authors_per_paper: int = 3) -> CitationGraph:
    """Copy of ``graph`` with random authorships and venues."""
    rng = np.random.default_rng(seed)
    n = graph.n_papers
    rows, cols = [], []
    if n_authors:
        per_paper = rng.integers(1, max_authors_per_paper + 1, size=n)
        for p in range(n):
            for a in np.unique(rng.integers(0, n_authors, size=per_paper[p])):
                rows.append(int(a))
                cols.append(p)
    venue = rng.integers(0, n_venues, size=n) if n_venues else np.full(n, -1)
    cited, citing = graph.edges()
    return CitationGraph(
        graph.paper_keys,
        graph.years,
        cited,
        citing,
        author_keys=_keys("a", n_authors),
        authorship_pairs=(np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)),
        venue_keys=_keys("v", n_venues),
        paper_venue=venue,
    )
