import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sindex import (
    CitationGraph,
    EntityKind,
    PaperRecord,
    TemporalWindow,
    build_graph,
    induce_temporal,
)
from sindex.exceptions import InvalidRecord, UnknownKey
from sindex.graph import UNDATED_YEAR


def edge_set(graph):
    cited, citing = graph.edges()
    return set(zip(cited.tolist(), citing.tolist()))


def test_figure2_shape(fig2):
    assert fig2.n_papers == 3
    assert fig2.n_citations == 3
    assert np.diff(fig2.adjacency.indptr).tolist() == [2, 1, 0]


def test_single_paper_no_edges():
    g = build_graph([("p1", 2000)])
    assert g.n_papers == 1 and g.n_citations == 0


def test_dedup_and_selfloops_counted():
    g = build_graph([("p1", 2000), ("p2", 2001)], [("p1", "p2"), ("p1", "p2"), ("p1", "p1")])
    assert g.n_citations == 1
    assert g.stats.duplicate_citations == 1
    assert g.stats.selfloop_citations == 1


def test_strict_unknown_key_raises():
    with pytest.raises(UnknownKey):
        build_graph([("p1", 2000)], [("p1", "nope")])


def test_lenient_unknown_key_skipped():
    g = build_graph([("p1", 2000), ("p2", 2001)], [("p1", "nope"), ("p1", "p2")], mode="lenient")
    assert g.n_citations == 1
    assert g.stats.unknown_citation_keys == 1


def test_year_range_and_missing_year():
    with pytest.raises(InvalidRecord):
        build_graph([("p1", 1200)])
    with pytest.raises(InvalidRecord):
        build_graph([("p1", None)])
    g = build_graph([("p1", None), ("p2", 1200), ("p3", 2000)], mode="lenient")
    assert g.paper_keys == ("p1", "p3")
    assert g.years[0] == UNDATED_YEAR
    assert g.stats.rejected_papers == 1 and g.stats.undated_papers == 1
    assert not TemporalWindow(2020, 10**6).contains(g.years[0])


def test_indices_follow_first_seen_order():
    g = build_graph(
        [PaperRecord("z", 2000, "vb"), PaperRecord("a", 2001, "va"), PaperRecord("m", 2002)],
        [],
        [("a", "bob"), ("z", "amy"), ("m", "bob")],
    )
    assert g.paper_keys == ("z", "a", "m")
    assert g.venue_keys == ("vb", "va")
    assert g.author_keys == ("bob", "amy")
    assert g.paper_venue.tolist() == [0, 1, -1]


def test_incidence_counts(fig2):
    assert fig2.authorship.nnz == 3
    assert fig2.venueship.nnz == 3
    assert fig2.papers_of_author(fig2.author_index("alice")).tolist() == [0, 1]
    meta = fig2.paper_meta(1)
    assert meta.year == 2010
    assert meta.venue.external_key == "v2"
    assert [a.external_key for a in meta.authors] == ["alice"]
    assert meta.paper.kind is EntityKind.PAPER


def test_graph_is_immutable(fig2):
    with pytest.raises(ValueError):
        fig2.adjacency.data[0] = 5.0
    with pytest.raises(ValueError):
        fig2.years[0] = 1999


def test_constructor_rejects_dirty_edges():
    with pytest.raises(InvalidRecord):
        CitationGraph(["a", "b"], [2000, 2000], [0, 0], [1, 1])
    with pytest.raises(InvalidRecord):
        CitationGraph(["a", "b"], [2000, 2000], [0], [0])


def test_cycles_are_allowed():
    g = build_graph([("a", 2000), ("b", 2000)], [("a", "b"), ("b", "a")])
    assert g.n_citations == 2


# -- temporal induction -----------------------------------------------------


def test_window_membership():
    w = TemporalWindow(2014, 5)
    assert w.first_year == 2010
    assert w.contains(2010) and w.contains(2014)
    assert not w.contains(2009) and not w.contains(2015)
    assert TemporalWindow.unbounded().contains(UNDATED_YEAR)
    with pytest.raises(ValueError):
        TemporalWindow(2014, 0)
    with pytest.raises(ValueError):
        TemporalWindow(None, 3)


def test_induce_window_keeps_recent_citers(fig2):
    # [2010, 2014] contains every citing paper (p2=2010, p3=2014)
    assert edge_set(induce_temporal(fig2, TemporalWindow(2014, 5))) == {(0, 1), (0, 2), (1, 2)}
    # [2011, 2014] loses the 2010 citation p1 <- p2
    assert edge_set(induce_temporal(fig2, TemporalWindow(2014, 4))) == {(0, 2), (1, 2)}


def test_induce_unbounded_is_identity(fig2):
    g = induce_temporal(fig2, TemporalWindow.unbounded())
    assert np.array_equal(g.adjacency.indptr, fig2.adjacency.indptr)
    assert np.array_equal(g.adjacency.indices, fig2.adjacency.indices)


def test_induce_empty_window(fig2):
    assert induce_temporal(fig2, TemporalWindow(1990, 3)).n_citations == 0


def test_induce_keeps_incidences(fig2):
    g = induce_temporal(fig2, TemporalWindow(2014, 1))
    assert (g.authorship != fig2.authorship).nnz == 0
    assert (g.venueship != fig2.venueship).nnz == 0


edge_lists = st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), max_size=60)


@settings(max_examples=200, deadline=None)
@given(edge_lists)
def test_replay_reproduces_deduplicated_input(pairs):
    papers = [(f"p{i}", 2000 + i) for i in range(12)]
    g = build_graph(papers, [(f"p{a}", f"p{b}") for a, b in pairs])
    assert edge_set(g) == {(a, b) for a, b in pairs if a != b}
    indptr, indices = g.adjacency.indptr, g.adjacency.indices
    assert np.all(np.diff(indptr) >= 0)
    for r in range(g.n_papers):
        assert np.all(np.diff(indices[indptr[r]:indptr[r + 1]]) > 0)


@settings(max_examples=100, deadline=None)
@given(edge_lists, st.integers(2000, 2011))
def test_window_edge_count_monotone_in_span(pairs, ref_year):
    papers = [(f"p{i}", 2000 + i) for i in range(12)]
    g = build_graph(papers, [(f"p{a}", f"p{b}") for a, b in pairs])
    counts = [induce_temporal(g, TemporalWindow(ref_year, r)).n_citations for r in range(1, 14)]
    assert counts == sorted(counts)


def _walks(adj, start, length):
    if length == 0:
        yield [start]
        return
    for nxt in adj[start]:
        for rest in _walks(adj, nxt, length - 1):
            yield [start] + rest


@settings(max_examples=100, deadline=None)
@given(edge_lists, st.integers(1, 12))
def test_temporal_walks_stay_inside_window(pairs, span):
    papers = [(f"p{i}", 2000 + (i * 7) % 12) for i in range(12)]
    g = build_graph(papers, [(f"p{a}", f"p{b}") for a, b in pairs])
    w = TemporalWindow(2011, span)
    gr = induce_temporal(g, w)
    adj = [gr.citers_of(p).tolist() for p in range(gr.n_papers)]
    for start in range(gr.n_papers):
        for k in range(1, 4):
            for walk in _walks(adj, start, k):
                assert all(w.contains(gr.years[q]) for q in walk[1:])


def test_subgraph_keeps_internal_edges_and_authorships(fig2):
    sub = fig2.subgraph(["p2", "p3"])
    assert sub.paper_keys == ("p2", "p3")
    assert [tuple(a.tolist()) for a in sub.edges()] == [(0,), (1,)]
    assert sub.author_keys == fig2.author_keys
    assert sub.papers_of_author(sub.author_index("alice")).tolist() == [0]
    assert sub.years.tolist() == [2010, 2014]
    mask = np.array([True, False, True])
    assert sub.n_citations == 1 and fig2.subgraph(mask).paper_keys == ("p1", "p3")
