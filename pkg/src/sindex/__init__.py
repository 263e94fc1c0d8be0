"""Research-impact metrics over heterogeneous citation graphs.

The s-index of a paper is the decay-weighted number of citation walks that
leave it; author and venue scores sum their papers. Citation count, h-index,
journal impact factor and PageRank are provided for comparison.
"""

__version__ = "0.1.0"

from .analysis import (
    Histogram,
    RankingRow,
    RankingTable,
    growth_curve,
    rank_scores,
    recall_report,
    score_histogram,
    self_citation_probe,
    spearman_rho,
    top_fraction_recall,
)
from .baselines import PageRankConfig, citation_count, h_index, jif, pagerank
from .engine import (
    MetricConfig,
    ScoreVector,
    aggregate_author_sindex,
    aggregate_venue_sindex,
    compute_paper_sindex,
    compute_sr_index,
    restrict_published,
    scale_scores,
)
from .estimators import CitationCount, HIndex, JournalImpactFactor, PageRank, SIndex, SrIndex
from .exceptions import *  # noqa: F401,F403
from .graph import (
    CitationGraph,
    EntityId,
    EntityKind,
    PaperMeta,
    PaperRecord,
    TemporalWindow,
    build_graph,
    induce_temporal,
)
from .io import CorpusPaths, IngestReport, load_corpus, read_scores, write_corpus, write_scores
