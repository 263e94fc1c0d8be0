"""scikit-learn style wrappers around the metric functions.

Each estimator takes a :class:`~sindex.graph.CitationGraph` as ``X``.
``fit`` computes the scores and stores them in trailing-underscore
attributes; ``transform`` returns the primary score array for a graph.
Parameters follow the usual ``get_params``/``set_params`` protocol, so the
metrics drop into grids and pipelines like any other estimator::

    >>> est = SIndex(decay=0.5, walk_length=4).fit(graph)
    >>> est.paper_scores_.values
"""
from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analysis import rank_scores
from .baselines import PageRankConfig, citation_count, h_index, jif, pagerank
from .engine import (
    aggregate_author_sindex,
    aggregate_venue_sindex,
    compute_paper_sindex,
    scale_scores,
)
from .exceptions import UnboundedWindow
from .graph import EntityKind
from .validation import check_graph, check_metric_config, check_window

__all__ = [
    "SIndex",
    "SrIndex",
    "CitationCount",
    "HIndex",
    "JournalImpactFactor",
    "PageRank",
]


class _GraphMetric(TransformerMixin, BaseEstimator):
    def _compute(self, graph):
        raise NotImplementedError

    def fit(self, X, y=None):
        graph = check_graph(X)
        self.scores_ = self._compute(graph)
        self.n_entities_ = len(self.scores_)
        return self

    def transform(self, X):
        check_is_fitted(self)
        return self._compute(check_graph(X)).values

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X).scores_.values

    def rank(self, scaled=False, metric=None):
        """Ranking table of the fitted scores."""
        check_is_fitted(self)
        return rank_scores(
            self.scores_,
            scale_scores(self.scores_) if scaled else None,
            metric=metric or type(self).__name__,
            config=self.get_params(),
        )


class SIndex(_GraphMetric):
    """Decay-weighted walk count for papers, summed over authors and venues.

    Parameters
    ----------
    decay : float, default=0.5
        Weight multiplier per walk step, in (0, 1].
    walk_length : int, default=4
        Longest walk counted.
    window : int or None, default=None
        Span in years of the citation window; None counts every citation.
    ref_year : int or None, default=None
        Last year of the window; defaults to the newest paper in the graph.
    n_jobs : int, default=1
        Row-partition workers for the matrix-vector products. Results do not
        depend on it.

    Attributes
    ----------
    paper_scores_, author_scores_, venue_scores_ : ScoreVector
    scores_ : ScoreVector
        Alias for ``paper_scores_``.
    window_ : TemporalWindow
    """

    def __init__(self, decay=0.5, walk_length=4, window=None, ref_year=None, n_jobs=1):
        self.decay = decay
        self.walk_length = walk_length
        self.window = window
        self.ref_year = ref_year
        self.n_jobs = n_jobs

    def _config(self, graph):
        self.window_ = check_window(self.window, self.ref_year, graph)
        return check_metric_config(self.decay, self.walk_length, self.window_)

    def _compute(self, graph):
        return compute_paper_sindex(graph, self._config(graph), threads=self.n_jobs)

    def fit(self, X, y=None):
        super().fit(X)
        self.paper_scores_ = self.scores_
        self.author_scores_ = aggregate_author_sindex(self.scores_, X)
        self.venue_scores_ = aggregate_venue_sindex(self.scores_, X)
        return self

    def score_vector(self, entity="paper"):
        check_is_fitted(self)
        return {
            EntityKind.PAPER: self.paper_scores_,
            EntityKind.AUTHOR: self.author_scores_,
            EntityKind.VENUE: self.venue_scores_,
        }[EntityKind(entity)]


class SrIndex(SIndex):
    """Temporal s-index: only citations made inside the last ``window`` years."""

    def __init__(self, decay=0.5, walk_length=4, window=5, ref_year=None, n_jobs=1):
        super().__init__(decay, walk_length, window, ref_year, n_jobs)

    def _config(self, graph):
        if self.window is None:
            raise UnboundedWindow("SrIndex needs a window span")
        return super()._config(graph)


class CitationCount(_GraphMetric):
    def _compute(self, graph):
        return citation_count(graph)


class HIndex(_GraphMetric):
    """Author h-index from paper citation counts."""

    def _compute(self, graph):
        return h_index(graph)


class JournalImpactFactor(_GraphMetric):
    """Mean citations of a venue's papers published in the last ``span`` years.

    Venues without papers in the window score NaN.
    """

    def __init__(self, span=2, ref_year=None, cites_in_ref_year_only=False):
        self.span = span
        self.ref_year = ref_year
        self.cites_in_ref_year_only = cites_in_ref_year_only

    def _compute(self, graph):
        if self.span is None:
            raise UnboundedWindow("JIF needs a window span")
        self.window_ = check_window(self.span, self.ref_year, graph)
        return jif(graph, self.window_, self.cites_in_ref_year_only)


class PageRank(_GraphMetric):
    """Citation PageRank.

    Attributes
    ----------
    scores_ : ScoreVector
    converged_ : bool
    n_iter_ : int
    """

    def __init__(self, damping=0.5, tol=1e-10, max_iter=200, n_jobs=1):
        self.damping = damping
        self.tol = tol
        self.max_iter = max_iter
        self.n_jobs = n_jobs

    def _compute(self, graph):
        check_graph(graph, min_papers=1)
        result = pagerank(
            graph,
            PageRankConfig(self.damping, self.tol, self.max_iter),
            threads=self.n_jobs,
            full_output=True,
        )
        self.converged_ = result.converged
        self.n_iter_ = result.n_iter
        return result.scores
