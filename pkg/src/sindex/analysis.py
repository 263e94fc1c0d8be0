"""Rankings and the statistics used to compare impact metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .baselines import citation_count, h_index
from .engine import MetricConfig, ScoreVector, aggregate_author_sindex, compute_paper_sindex
from .exceptions import EmptyLabels, LengthMismatch, TooFewPapers
from .graph import UNDATED_YEAR, CitationGraph

__all__ = [
    "RankingRow",
    "RankingTable",
    "rank_scores",
    "competition_ranks",
    "average_ranks",
    "spearman_rho",
    "RecallReport",
    "recall_report",
    "top_fraction_recall",
    "Histogram",
    "score_histogram",
    "growth_curve",
    "ProbeReport",
    "self_citation_probe",
    "rank_percentile",
]


# -- rankings ---------------------------------------------------------------


@dataclass(frozen=True)
class RankingRow:
    external_key: str
    raw_score: float
    scaled_score: Optional[float]
    rank: Optional[int]


@dataclass
class RankingTable:
    """Rows sorted by score descending, ties by key ascending.

    Ranks use competition ranking ("1224"); rows whose score is undefined
    come last and carry no rank.
    """

    rows: list
    metric: str = ""
    entity: str = ""
    config: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def keys(self):
        return [r.external_key for r in self.rows]

    def head(self, k: Optional[int]) -> "RankingTable":
        if k is None:
            return self
        return RankingTable(self.rows[:k], self.metric, self.entity, dict(self.config))


def _order(keys, values):
    defined = [i for i in range(len(values)) if not math.isnan(values[i])]
    undefined = [i for i in range(len(values)) if math.isnan(values[i])]
    defined.sort(key=lambda i: (-values[i], keys[i]))
    undefined.sort(key=lambda i: keys[i])
    return defined, undefined


def competition_ranks(values) -> np.ndarray:
    """1 + number of strictly larger values; NaN entries get rank 0."""
    values = np.asarray(values, dtype=np.float64)
    out = np.zeros(len(values), dtype=np.int64)
    ok = ~np.isnan(values)
    v = values[ok]
    sorted_desc = -np.sort(-v)
    out[ok] = 1 + np.searchsorted(-sorted_desc, -v, side="left")
    return out


def rank_scores(
    scores: ScoreVector,
    scaled: Optional[ScoreVector] = None,
    metric: str = "",
    config: Optional[dict] = None,
) -> RankingTable:
    values = scores.values.tolist()
    keys = scores.keys
    ranks = competition_ranks(scores.values)
    defined, undefined = _order(keys, values)
    rows = []
    for i in defined + undefined:
        s = None
        if scaled is not None and not math.isnan(scaled.values[i]):
            s = float(scaled.values[i])
        raw = values[i]
        rows.append(RankingRow(keys[i], raw, s, int(ranks[i]) if not math.isnan(raw) else None))
    return RankingTable(rows, metric=metric, entity=scores.kind.value, config=dict(config or {}))


# -- correlation ------------------------------------------------------------


def average_ranks(x) -> np.ndarray:
    """1-based ranks in ascending order; ties share the mean of their positions."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    boundaries = np.flatnonzero(np.diff(xs) != 0) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [len(x)]])
    ranks = np.empty(len(x), dtype=np.float64)
    for lo, hi in zip(starts, ends):
        ranks[order[lo:hi]] = (lo + 1 + hi) / 2.0
    return ranks


def _values(v):
    return v.values if isinstance(v, ScoreVector) else np.asarray(v, dtype=np.float64)


def spearman_rho(x, y) -> float:
    """Spearman rank correlation; NaN if either input is constant.

    Without ties this is ``1 - 6 * sum(d**2) / (n * (n**2 - 1))``; with ties
    it is the Pearson correlation of average ranks.
    """
    if isinstance(x, ScoreVector) and isinstance(y, ScoreVector) and x.kind is not y.kind:
        raise ValueError(f"cannot correlate {x.kind.value} with {y.kind.value} scores")
    a, b = _values(x), _values(y)
    if len(a) != len(b):
        raise LengthMismatch(f"vectors of length {len(a)} and {len(b)}")
    n = len(a)
    if n < 2:
        raise ValueError("spearman_rho needs at least two observations")
    if np.all(a == a[0]) or np.all(b == b[0]):
        return math.nan
    ra, rb = average_ranks(a), average_ranks(b)
    ties = len(np.unique(a)) < n or len(np.unique(b)) < n
    if not ties:
        d2 = float(np.sum((ra - rb) ** 2))
        return 1.0 - 6.0 * d2 / (n * (n * n - 1.0))
    ra -= ra.mean()
    rb -= rb.mean()
    rho = float(np.dot(ra, rb) / math.sqrt(np.dot(ra, ra) * np.dot(rb, rb)))
    return max(-1.0, min(1.0, rho))


# -- recall -----------------------------------------------------------------


@dataclass(frozen=True)
class RecallReport:
    recall: float
    cutoff: int
    n_labels: int
    n_found: int
    n_unresolved: int
    unresolved: tuple = ()


def recall_report(scores: ScoreVector, labels: Iterable[str], fraction: float) -> RecallReport:
    """Share of labelled entities placed within the top ``ceil(fraction * n)`` rows.

    Positions follow the ranking-table order (score desc, key asc). Labels
    that match no entity are reported and left out of the denominator.
    """
    labels = sorted(set(labels))
    if not labels:
        raise EmptyLabels("no labels given")
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction!r}")
    n = len(scores)
    keys = scores.keys
    defined, undefined = _order(keys, scores.values.tolist())
    position = {keys[i]: p for p, i in enumerate(defined + undefined, start=1)}
    resolved = [k for k in labels if k in position]
    unresolved = tuple(k for k in labels if k not in position)
    if not resolved:
        raise EmptyLabels("none of the labels matches an entity")
    cutoff = math.ceil(fraction * n)
    found = sum(1 for k in resolved if position[k] <= cutoff)
    return RecallReport(found / len(resolved), cutoff, len(resolved), found, len(unresolved), unresolved)


def top_fraction_recall(scores: ScoreVector, labels: Iterable[str], fraction: float) -> float:
    return recall_report(scores, labels, fraction).recall


# -- distributions ----------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    underflow: int
    overflow: int

    def rows(self):
        """(lower, upper, count) rows, underflow and overflow included."""
        out = [("-inf", _fmt(self.edges[0]), self.underflow)]
        for lo, hi, c in zip(self.edges[:-1], self.edges[1:], self.counts):
            out.append((_fmt(lo), _fmt(hi), int(c)))
        out.append((_fmt(self.edges[-1]), "inf", self.overflow))
        return out


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def score_histogram(scores, bins: int = 20, base: float = 10.0, start: Optional[float] = None) -> Histogram:
    """Logarithmic histogram with edges ``start * base**k`` for k = 0..bins.

    ``start`` defaults to the smallest positive score. Zeros and scores below
    ``start`` go to the underflow count; scores at or above the last edge to
    the overflow count. Non-finite scores are ignored.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if not base > 1:
        raise ValueError("base must be > 1")
    v = _values(scores)
    v = v[np.isfinite(v)]
    positive = v[v > 0]
    if start is None:
        start = float(positive.min()) if len(positive) else 1.0
    if not start > 0:
        raise ValueError("start must be positive")
    edges = start * np.power(float(base), np.arange(bins + 1, dtype=np.float64))
    idx = np.searchsorted(edges, v, side="right") - 1
    underflow = int(np.sum(idx < 0))
    overflow = int(np.sum(idx >= bins))
    inside = idx[(idx >= 0) & (idx < bins)]
    counts = np.bincount(inside, minlength=bins)
    return Histogram(edges, counts, underflow, overflow)


# -- growth -----------------------------------------------------------------


def growth_curve(
    graph: CitationGraph,
    paper: str,
    config: MetricConfig = MetricConfig(),
    years: Optional[Iterable[int]] = None,
    threads: Optional[int] = 1,
) -> list:
    """(year, score) of one paper as citations accumulate year by year.

    The score for year Y uses every citation made in year Y or earlier. The
    window in ``config`` is ignored.
    """
    p = graph.paper_index(paper)
    if years is None:
        real = graph.years[graph.years > UNDATED_YEAR]
        years = range(int(graph.years[p]), int(real.max()) + 1)
    cumulative = MetricConfig(decay=config.decay, walk_length=config.walk_length)
    citing_years = graph.years[graph.adjacency.indices]
    out = []
    for year in years:
        sub = graph.filter_citations(citing_years <= year)
        out.append((int(year), float(compute_paper_sindex(sub, cumulative, threads).values[p])))
    return out


# -- robustness -------------------------------------------------------------


def rank_percentile(values, index: int) -> float:
    """Percentage of entities scoring strictly below entity ``index``."""
    values = np.asarray(values)
    return 100.0 * float(np.sum(values < values[index])) / len(values)


@dataclass(frozen=True)
class ProbeReport:
    author: str
    injected_requested: int
    edges_added: int
    added_edges: tuple
    h_index_before: float
    h_index_after: float
    sindex_before: float
    sindex_after: float
    h_index_percentile_before: float
    h_index_percentile_after: float
    sindex_percentile_before: float
    sindex_percentile_after: float

    @property
    def delta_h_index_rank_percentile(self) -> float:
        return self.h_index_percentile_after - self.h_index_percentile_before

    @property
    def delta_sindex_rank_percentile(self) -> float:
        return self.sindex_percentile_after - self.sindex_percentile_before

    def to_dict(self) -> dict:
        return {
            "author": self.author,
            "injected_requested": self.injected_requested,
            "edges_added": self.edges_added,
            "added_edges": [list(e) for e in self.added_edges],
            "h_index": {
                "before": self.h_index_before,
                "after": self.h_index_after,
                "rank_percentile_before": self.h_index_percentile_before,
                "rank_percentile_after": self.h_index_percentile_after,
                "delta_rank_percentile": self.delta_h_index_rank_percentile,
            },
            "sindex": {
                "before": self.sindex_before,
                "after": self.sindex_after,
                "rank_percentile_before": self.sindex_percentile_before,
                "rank_percentile_after": self.sindex_percentile_after,
                "delta_rank_percentile": self.delta_sindex_rank_percentile,
            },
        }


def _self_citation_candidates(graph: CitationGraph, papers: np.ndarray):
    """(cited, citing) pairs within ``papers``: newest citing first, oldest cited first."""
    by_age = sorted(papers.tolist(), key=lambda p: (int(graph.years[p]), p))
    pairs = []
    for j in range(len(by_age) - 1, 0, -1):
        for i in range(j):
            pairs.append((by_age[i], by_age[j]))
    return pairs


def self_citation_probe(
    graph: CitationGraph,
    author: str,
    injected: int,
    config: MetricConfig = MetricConfig(),
    threads: Optional[int] = 1,
) -> ProbeReport:
    """Inject up to ``injected`` citations among one author's own papers and
    report how the author's h-index and s-index rank percentiles move.

    Pairs already cited are skipped, so fewer edges may be added.
    """
    a = graph.author_index(author)
    papers = graph.papers_of_author(a)
    if len(papers) < 2:
        raise TooFewPapers(f"author {author!r} has {len(papers)} paper(s); need at least 2")
    if injected < 0:
        raise ValueError("injected must be >= 0")

    cited, citing = graph.edges()
    existing = set(zip(cited.tolist(), citing.tolist()))
    added = []
    for pair in _self_citation_candidates(graph, papers):
        if len(added) >= injected:
            break
        if pair not in existing:
            added.append(pair)
    if added:
        extra = np.asarray(added, dtype=np.int64)
        mutated = graph.with_citations(
            np.concatenate([cited, extra[:, 0]]), np.concatenate([citing, extra[:, 1]])
        )
    else:
        mutated = graph

    def measure(g):
        h = h_index(g, citation_count(g)).values
        s = aggregate_author_sindex(compute_paper_sindex(g, config, threads), g).values
        return h, s

    h0, s0 = measure(graph)
    h1, s1 = measure(mutated) if added else (h0, s0)
    keys = graph.paper_keys
    return ProbeReport(
        author=author,
        injected_requested=injected,
        edges_added=len(added),
        added_edges=tuple((keys[c], keys[q]) for c, q in added),
        h_index_before=float(h0[a]),
        h_index_after=float(h1[a]),
        sindex_before=float(s0[a]),
        sindex_after=float(s1[a]),
        h_index_percentile_before=rank_percentile(h0, a),
        h_index_percentile_after=rank_percentile(h1, a),
        sindex_percentile_before=rank_percentile(s0, a),
        sindex_percentile_after=rank_percentile(s1, a),
    )
