"""Heterogeneous citation graph: papers, authors, venues and the edges between them.

Citation edges are stored cited -> citing, so row ``p`` of the paper adjacency
lists the papers that cite ``p``. Walks from ``p`` along this adjacency reach
the papers ``p`` influenced directly or indirectly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import CapacityExceeded, InvalidRecord, UnknownKey

__all__ = [
    "EntityKind",
    "EntityId",
    "PaperRecord",
    "PaperMeta",
    "TemporalWindow",
    "BuildStats",
    "CitationGraph",
    "build_graph",
    "induce_temporal",
    "DEFAULT_YEAR_RANGE",
    "UNDATED_YEAR",
]

DEFAULT_YEAR_RANGE = (1500, 2100)
# Far below any realistic window start; undated papers never fall inside a bounded window.
UNDATED_YEAR = -(2**31)
INDEX_LIMIT = np.iinfo(np.int32).max

STRICT = "strict"
LENIENT = "lenient"


class EntityKind(str, enum.Enum):
    PAPER = "paper"
    AUTHOR = "author"
    VENUE = "venue"


@dataclass(frozen=True)
class EntityId:
    kind: EntityKind
    index: int
    external_key: str


@dataclass(frozen=True)
class PaperRecord:
    """One row of the papers table as handed to :func:`build_graph`."""

    key: str
    year: Optional[int]
    venue: Optional[str] = None


@dataclass(frozen=True)
class PaperMeta:
    paper: EntityId
    year: int
    venue: Optional[EntityId]
    authors: tuple


@dataclass(frozen=True)
class TemporalWindow:
    """Publication-year window ``[reference_year - span_years + 1, reference_year]``.

    ``span_years=None`` is the unbounded sentinel: every paper is inside.
    """

    reference_year: Optional[int] = None
    span_years: Optional[int] = None

    def __post_init__(self):
        if self.span_years is None:
            return
        if int(self.span_years) != self.span_years or self.span_years < 1:
            raise ValueError(f"span_years must be a positive integer, got {self.span_years!r}")
        if self.reference_year is None:
            raise ValueError("a bounded window needs a reference_year")

    @classmethod
    def unbounded(cls) -> "TemporalWindow":
        return cls()

    @property
    def bounded(self) -> bool:
        return self.span_years is not None

    @property
    def first_year(self) -> Optional[int]:
        if not self.bounded:
            return None
        return self.reference_year - self.span_years + 1

    def contains(self, years):
        """Boolean mask (or bool for a scalar) of years inside the window."""
        years = np.asarray(years)
        if not self.bounded:
            out = np.ones(years.shape, dtype=bool)
        else:
            out = (years >= self.first_year) & (years <= self.reference_year)
        return bool(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BuildStats:
    citations_accepted: int = 0
    duplicate_citations: int = 0
    selfloop_citations: int = 0
    unknown_citation_keys: int = 0
    authorships_accepted: int = 0
    duplicate_authorships: int = 0
    unknown_authorship_keys: int = 0
    duplicate_papers: int = 0
    rejected_papers: int = 0
    undated_papers: int = 0


def _freeze(*arrays):
    for a in arrays:
        a.flags.writeable = False


def _freeze_csr(m):
    _freeze(m.data, m.indices, m.indptr)
    return m


def _incidence(n_rows, n_cols, rows, cols):
    """0/1 CSR matrix from (row, col) pairs that are already unique."""
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=indptr[1:])
    m = sp.csr_matrix(
        (np.ones(len(cols), dtype=np.float64), cols.astype(np.int32), indptr),
        shape=(n_rows, n_cols),
    )
    return _freeze_csr(m)


class CitationGraph:
    """Immutable citation graph with paper, author and venue nodes.

    Parameters
    ----------
    paper_keys, author_keys, venue_keys : sequence of str
        External keys; position in the sequence is the dense internal index.
    years : array of int
        Publication year per paper.
    paper_venue : array of int
        Venue index per paper, ``-1`` for papers without a venue.
    cited, citing : array of int
        Citation edge endpoints. Must be free of self-loops and duplicates
        (use :func:`build_graph` for raw input).
    authorship : (author, paper) index pairs, unique.

    Attributes
    ----------
    adjacency : scipy.sparse.csr_matrix, shape (n_papers, n_papers)
        ``adjacency[p, q] == 1`` iff paper ``q`` cites paper ``p``.
    authorship : scipy.sparse.csr_matrix, shape (n_authors, n_papers)
    venueship : scipy.sparse.csr_matrix, shape (n_venues, n_papers)
    stats : BuildStats
    """

    def __init__(
        self,
        paper_keys,
        years,
        cited,
        citing,
        author_keys=(),
        authorship_pairs=None,
        venue_keys=(),
        paper_venue=None,
        stats=None,
    ):
        self.paper_keys = tuple(paper_keys)
        self.author_keys = tuple(author_keys)
        self.venue_keys = tuple(venue_keys)
        n = len(self.paper_keys)
        for keys in (self.paper_keys, self.author_keys, self.venue_keys):
            if len(keys) > INDEX_LIMIT:
                raise CapacityExceeded(f"{len(keys)} entities exceed the int32 index range")

        self.years = np.array(years, dtype=np.int64)
        if self.years.shape != (n,):
            raise InvalidRecord("years must have one entry per paper")
        if paper_venue is None:
            paper_venue = np.full(n, -1, dtype=np.int64)
        self.paper_venue = np.array(paper_venue, dtype=np.int64)
        if self.paper_venue.shape != (n,):
            raise InvalidRecord("paper_venue must have one entry per paper")
        if n and (self.paper_venue.max(initial=-1) >= len(self.venue_keys) or self.paper_venue.min() < -1):
            raise InvalidRecord("paper_venue references an unknown venue")
        _freeze(self.years, self.paper_venue)

        cited = np.asarray(cited, dtype=np.int64)
        citing = np.asarray(citing, dtype=np.int64)
        if len(cited) > INDEX_LIMIT:
            raise CapacityExceeded(f"{len(cited)} citation edges exceed the int32 index range")
        if np.any(cited == citing):
            raise InvalidRecord("self-loop citation edge")
        self.adjacency = _incidence(n, n, cited, citing)
        if self.adjacency.nnz and np.any((np.diff(self.adjacency.indices) <= 0) & ~_row_starts(self.adjacency)):
            raise InvalidRecord("duplicate citation edge")

        if authorship_pairs is None:
            a_rows = a_cols = np.zeros(0, dtype=np.int64)
        else:
            a_rows = np.asarray(authorship_pairs[0], dtype=np.int64)
            a_cols = np.asarray(authorship_pairs[1], dtype=np.int64)
        self.authorship = _incidence(len(self.author_keys), n, a_rows, a_cols)

        has_venue = np.flatnonzero(self.paper_venue >= 0)
        self.venueship = _incidence(len(self.venue_keys), n, self.paper_venue[has_venue], has_venue)

        self.stats = stats if stats is not None else BuildStats(citations_accepted=int(len(cited)))
        self._index = {
            EntityKind.PAPER: None,
            EntityKind.AUTHOR: None,
            EntityKind.VENUE: None,
        }

    # -- sizes -------------------------------------------------------------

    @property
    def n_papers(self) -> int:
        return len(self.paper_keys)

    @property
    def n_authors(self) -> int:
        return len(self.author_keys)

    @property
    def n_venues(self) -> int:
        return len(self.venue_keys)

    @property
    def n_citations(self) -> int:
        return int(self.adjacency.nnz)

    def count(self, kind) -> int:
        return len(self.keys(kind))

    def keys(self, kind) -> tuple:
        kind = EntityKind(kind)
        return {
            EntityKind.PAPER: self.paper_keys,
            EntityKind.AUTHOR: self.author_keys,
            EntityKind.VENUE: self.venue_keys,
        }[kind]

    # -- lookups -----------------------------------------------------------

    def index_of(self, kind, key: str) -> int:
        kind = EntityKind(kind)
        if self._index[kind] is None:
            self._index[kind] = {k: i for i, k in enumerate(self.keys(kind))}
        try:
            return self._index[kind][key]
        except KeyError:
            raise UnknownKey(f"unknown {kind.value} key {key!r}") from None

    def paper_index(self, key: str) -> int:
        return self.index_of(EntityKind.PAPER, key)

    def author_index(self, key: str) -> int:
        return self.index_of(EntityKind.AUTHOR, key)

    def venue_index(self, key: str) -> int:
        return self.index_of(EntityKind.VENUE, key)

    def papers_of_author(self, author: int) -> np.ndarray:
        a = self.authorship
        return a.indices[a.indptr[author]:a.indptr[author + 1]].astype(np.int64)

    def papers_of_venue(self, venue: int) -> np.ndarray:
        c = self.venueship
        return c.indices[c.indptr[venue]:c.indptr[venue + 1]].astype(np.int64)

    def citers_of(self, paper: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[paper]:a.indptr[paper + 1]].astype(np.int64)

    def paper_meta(self, index: int) -> PaperMeta:
        venue = int(self.paper_venue[index])
        at = self.authorship.tocsc()
        authors = at.indices[at.indptr[index]:at.indptr[index + 1]]
        return PaperMeta(
            paper=EntityId(EntityKind.PAPER, index, self.paper_keys[index]),
            year=int(self.years[index]),
            venue=None if venue < 0 else EntityId(EntityKind.VENUE, venue, self.venue_keys[venue]),
            authors=tuple(EntityId(EntityKind.AUTHOR, int(a), self.author_keys[a]) for a in sorted(authors)),
        )

    def edges(self):
        """Citation edges as ``(cited, citing)`` index arrays in storage order."""
        a = self.adjacency
        cited = np.repeat(np.arange(self.n_papers, dtype=np.int64), np.diff(a.indptr))
        return cited, a.indices.astype(np.int64)

    def authorship_pairs(self):
        b = self.authorship
        authors = np.repeat(np.arange(self.n_authors, dtype=np.int64), np.diff(b.indptr))
        return authors, b.indices.astype(np.int64)

    def reference_counts(self) -> np.ndarray:
        """Number of references (outgoing citations) of every paper."""
        return np.bincount(self.adjacency.indices, minlength=self.n_papers).astype(np.int64)

    # -- derived graphs ----------------------------------------------------

    def with_citations(self, cited, citing, stats=None) -> "CitationGraph":
        """Same nodes and incidences, different (already clean) citation edge set."""
        return CitationGraph(
            self.paper_keys,
            self.years,
            cited,
            citing,
            author_keys=self.author_keys,
            authorship_pairs=self.authorship_pairs(),
            venue_keys=self.venue_keys,
            paper_venue=self.paper_venue,
            stats=stats if stats is not None else self.stats,
        )

    def filter_citations(self, keep: np.ndarray) -> "CitationGraph":
        """Keep the citation edges selected by a mask in storage order."""
        cited, citing = self.edges()
        return self.with_citations(cited[keep], citing[keep])

    def subgraph(self, papers) -> "CitationGraph":
        """Graph induced by a subset of papers, given as keys or a boolean mask.

        Citations and authorships between kept papers survive. Author and
        venue key sets are kept whole, so entities that lose every paper
        score zero instead of disappearing.
        """
        if isinstance(papers, np.ndarray) and papers.dtype == bool:
            if papers.shape != (self.n_papers,):
                raise InvalidRecord("paper mask must have one entry per paper")
            keep = papers
        else:
            keep = np.zeros(self.n_papers, dtype=bool)
            keep[[self.paper_index(k) for k in papers]] = True
        new_index = np.cumsum(keep) - 1
        cited, citing = self.edges()
        e = keep[cited] & keep[citing]
        authors, owned = self.authorship_pairs()
        a = keep[owned]
        return CitationGraph(
            [k for k, flag in zip(self.paper_keys, keep.tolist()) if flag],
            self.years[keep],
            new_index[cited[e]],
            new_index[citing[e]],
            author_keys=self.author_keys,
            authorship_pairs=(authors[a], new_index[owned[a]]),
            venue_keys=self.venue_keys,
            paper_venue=self.paper_venue[keep],
        )

    def __repr__(self):
        return (
            f"CitationGraph(papers={self.n_papers}, citations={self.n_citations}, "
            f"authors={self.n_authors}, venues={self.n_venues})"
        )


def _row_starts(m):
    """Mask over ``diff(indices)`` that is True where a new row begins."""
    starts = np.zeros(max(len(m.indices) - 1, 0), dtype=bool)
    boundaries = m.indptr[1:-1]
    boundaries = boundaries[(boundaries > 0) & (boundaries < len(m.indices))]
    starts[boundaries - 1] = True
    return starts


def _as_record(row) -> PaperRecord:
    if isinstance(row, PaperRecord):
        return row
    row = tuple(row)
    if len(row) == 2:
        return PaperRecord(row[0], row[1], None)
    return PaperRecord(row[0], row[1], row[2])


def build_graph(
    papers: Iterable,
    citations: Iterable = (),
    authorships: Iterable = (),
    *,
    mode: str = STRICT,
    year_range: Sequence[int] = DEFAULT_YEAR_RANGE,
    undated_year: int = UNDATED_YEAR,
) -> CitationGraph:
    """Build a :class:`CitationGraph` from keyed records.

    ``papers`` holds :class:`PaperRecord` objects or ``(key, year[, venue])``
    tuples; ``citations`` holds ``(cited_key, citing_key)`` pairs and
    ``authorships`` ``(paper_key, author_key)`` pairs. Indices follow
    first-seen order. Self-loops and duplicate edges are dropped and counted
    in ``graph.stats``.

    In strict mode an edge naming an unknown paper raises :class:`UnknownKey`
    and a bad or missing year raises :class:`InvalidRecord`. In lenient mode
    such edges are skipped, out-of-range papers are rejected, and undated
    papers receive ``undated_year``.
    """
    if mode not in (STRICT, LENIENT):
        raise ValueError(f"mode must be 'strict' or 'lenient', got {mode!r}")
    strict = mode == STRICT
    lo, hi = year_range

    paper_index = {}
    paper_keys, years, venue_of = [], [], []
    venue_index = {}
    duplicate_papers = rejected = undated = 0
    for row in papers:
        rec = _as_record(row)
        if not rec.key:
            raise InvalidRecord("empty paper key")
        if rec.key in paper_index:
            duplicate_papers += 1
            continue
        year = rec.year
        if year is None:
            if strict:
                raise InvalidRecord(f"paper {rec.key!r} has no publication year")
            year = undated_year
            undated += 1
        elif not lo <= year <= hi:
            if strict:
                raise InvalidRecord(f"paper {rec.key!r} has year {year} outside [{lo}, {hi}]")
            rejected += 1
            continue
        paper_index[rec.key] = len(paper_keys)
        paper_keys.append(rec.key)
        years.append(year)
        if rec.venue:
            venue_of.append(venue_index.setdefault(rec.venue, len(venue_index)))
        else:
            venue_of.append(-1)
    if len(paper_keys) > INDEX_LIMIT:
        raise CapacityExceeded(f"{len(paper_keys)} papers exceed the int32 index range")

    cited_idx, citing_idx = [], []
    unknown_cit = 0
    for cited_key, citing_key in citations:
        try:
            cited_idx.append(paper_index[cited_key])
            citing_idx.append(paper_index[citing_key])
        except KeyError as exc:
            if len(cited_idx) > len(citing_idx):
                cited_idx.pop()
            if strict:
                raise UnknownKey(f"citation references unknown paper {exc.args[0]!r}") from None
            unknown_cit += 1
    n = len(paper_keys)
    cited_arr = np.asarray(cited_idx, dtype=np.int64)
    citing_arr = np.asarray(citing_idx, dtype=np.int64)
    selfloop = cited_arr == citing_arr
    n_selfloops = int(selfloop.sum())
    cited_arr, citing_arr = cited_arr[~selfloop], citing_arr[~selfloop]
    codes, first = np.unique(cited_arr * max(n, 1) + citing_arr, return_index=True)
    n_dup_cit = len(cited_arr) - len(codes)
    # keep first-seen order among survivors; storage order is fixed by CSR anyway
    first.sort()
    cited_arr, citing_arr = cited_arr[first], citing_arr[first]

    author_index = {}
    a_rows, a_cols = [], []
    seen_authorship = set()
    unknown_auth = dup_auth = 0
    for paper_key, author_key in authorships:
        if paper_key not in paper_index:
            if strict:
                raise UnknownKey(f"authorship references unknown paper {paper_key!r}")
            unknown_auth += 1
            continue
        if not author_key:
            raise InvalidRecord("empty author key")
        a = author_index.setdefault(author_key, len(author_index))
        p = paper_index[paper_key]
        if (a, p) in seen_authorship:
            dup_auth += 1
            continue
        seen_authorship.add((a, p))
        a_rows.append(a)
        a_cols.append(p)

    stats = BuildStats(
        citations_accepted=len(cited_arr),
        duplicate_citations=n_dup_cit,
        selfloop_citations=n_selfloops,
        unknown_citation_keys=unknown_cit,
        authorships_accepted=len(a_rows),
        duplicate_authorships=dup_auth,
        unknown_authorship_keys=unknown_auth,
        duplicate_papers=duplicate_papers,
        rejected_papers=rejected,
        undated_papers=undated,
    )
    return CitationGraph(
        paper_keys,
        years,
        cited_arr,
        citing_arr,
        author_keys=list(author_index),
        authorship_pairs=(np.asarray(a_rows, dtype=np.int64), np.asarray(a_cols, dtype=np.int64)),
        venue_keys=list(venue_index),
        paper_venue=venue_of,
        stats=stats,
    )


def induce_temporal(graph: CitationGraph, window: TemporalWindow) -> CitationGraph:
    """Keep citation edges whose citing paper was published inside ``window``.

    Node sets and author/venue incidences are untouched. The unbounded window
    returns ``graph`` itself.
    """
    if not window.bounded:
        return graph
    keep = window.contains(graph.years[graph.adjacency.indices])
    return graph.filter_citations(keep)
