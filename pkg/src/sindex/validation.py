"""Input checks shared by the functional API, the estimators and the CLI."""
from __future__ import annotations

from typing import Optional

import numpy as np

from .engine import MetricConfig, ScoreVector
from .exceptions import LengthMismatch
from .graph import CitationGraph, EntityKind, TemporalWindow

__all__ = ["check_graph", "check_window", "check_metric_config", "check_score_vector"]


def check_graph(graph, min_papers: int = 0) -> CitationGraph:
    if not isinstance(graph, CitationGraph):
        raise TypeError(f"expected a CitationGraph, got {type(graph).__name__}")
    if graph.n_papers < min_papers:
        raise ValueError(f"graph has {graph.n_papers} papers; at least {min_papers} required")
    return graph


def check_window(span: Optional[int], ref_year: Optional[int], graph: Optional[CitationGraph] = None) -> TemporalWindow:
    """Window from a span and reference year.

    ``span=None`` gives the unbounded window. A missing reference year
    defaults to the latest publication year in ``graph``.
    """
    if span is None:
        return TemporalWindow.unbounded()
    if ref_year is None:
        if graph is None or graph.n_papers == 0:
            raise ValueError("a bounded window needs a reference year")
        ref_year = int(graph.years.max())
    return TemporalWindow(int(ref_year), int(span))


def check_metric_config(decay, walk_length, window=None) -> MetricConfig:
    if window is None:
        window = TemporalWindow.unbounded()
    return MetricConfig(float(decay), int(walk_length), window)


def check_score_vector(scores, kind=None, length: Optional[int] = None) -> ScoreVector:
    if not isinstance(scores, ScoreVector):
        raise TypeError(f"expected a ScoreVector, got {type(scores).__name__}")
    if kind is not None and scores.kind is not EntityKind(kind):
        raise ValueError(f"expected {EntityKind(kind).value} scores, got {scores.kind.value}")
    if length is not None and len(scores) != length:
        raise LengthMismatch(f"expected {length} scores, got {len(scores)}")
    if np.isinf(scores.values).any():
        raise ValueError("scores contain infinities")
    return scores
