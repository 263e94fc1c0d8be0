import json
import math

import numpy as np
import pytest

from sindex import (
    CorpusPaths,
    ScoreVector,
    compute_paper_sindex,
    load_corpus,
    rank_scores,
    read_scores,
    scale_scores,
    write_corpus,
    write_scores,
)
from sindex.exceptions import ParseError
from sindex.graph import UNDATED_YEAR
from sindex.synthetic import preferential_attachment_graph


def test_figure2_files(fig2_files):
    papers, citations, authorships = fig2_files
    g, rep = load_corpus({"papers": papers, "citations": citations, "authorships": authorships})
    assert (g.n_papers, g.n_citations, g.n_authors, g.n_venues) == (3, 3, 2, 2)
    for name, expected in (("papers", 3), ("citations", 3), ("authorships", 3)):
        fr = rep.files[name]
        assert fr.records_accepted == expected
        assert fr.lines_read == expected + 1
        assert fr.reconciles()
    assert compute_paper_sindex(g).values.tolist() == [1.25, 0.5, 0.0]


def test_citations_and_authorships_optional(fig2_files):
    g, rep = load_corpus(CorpusPaths(fig2_files[0]))
    assert g.n_citations == 0 and g.n_authors == 0
    assert set(rep.files) == {"papers"}


def test_empty_citations_file(tmp_path, fig2_files):
    empty = tmp_path / "empty.tsv"
    empty.write_text("")
    g, rep = load_corpus(CorpusPaths(fig2_files[0], empty))
    assert g.n_citations == 0
    assert rep.files["citations"].lines_read == 0


def test_lenient_tallies(tmp_path):
    (tmp_path / "papers.tsv").write_text(
        "paper_id\tyear\tvenue_id\n"
        "p1\t2000\tv\n"
        "p2\t2001\t\n"
        "p2\t2001\t\n"          # duplicate
        "p3\tabc\t\n"           # malformed year
        "p4\t1200\t\n"          # out of range
        "p5\t\t\n"              # undated -> sentinel
        "only-two-fields\t2000\n"
    )
    (tmp_path / "citations.tsv").write_text(
        "cited_id\tciting_id\n"
        "p1\tp2\n"
        "p1\tp2\n"              # duplicate
        "p1\tp1\n"              # self-loop
        "p1\tghost\n"           # unknown
        "p1\n"                  # malformed
        "p1\tp5\n"
    )
    (tmp_path / "authorships.tsv").write_text(
        "paper_id\tauthor_id\n" "p1\ta\n" "p1\ta\n" "ghost\ta\n" "p2\tb\n"
    )
    g, rep = load_corpus(
        CorpusPaths(tmp_path / "papers.tsv", tmp_path / "citations.tsv", tmp_path / "authorships.tsv"),
        mode="lenient",
    )
    p, c, a = rep.files["papers"], rep.files["citations"], rep.files["authorships"]
    assert (p.records_accepted, p.duplicates_dropped, p.malformed_lines, p.undated_records) == (3, 1, 3, 1)
    assert (c.records_accepted, c.duplicates_dropped, c.selfloops_dropped, c.unknown_keys, c.malformed_lines) == (
        2, 1, 1, 1, 1
    )
    assert (a.records_accepted, a.duplicates_dropped, a.unknown_keys) == (2, 1, 1)
    for fr in (p, c, a):
        assert fr.reconciles()
    assert g.paper_keys == ("p1", "p2", "p5")
    assert g.years[2] == UNDATED_YEAR
    assert g.n_citations == 2
    doc = rep.to_dict()
    assert doc["entities"] == {"papers": 3, "authors": 2, "venues": 1, "citations": 2}


@pytest.mark.parametrize(
    "papers, citations, line, column",
    [
        ("paper_id\tyear\tvenue_id\np1\tx\t\n", "cited_id\tciting_id\n", 2, 2),
        ("paper_id\tyear\tvenue_id\np1\t2000\t\n", "cited_id\tciting_id\np1\tghost\n", 2, 2),
        ("paper_id\tyear\tvenue_id\np1\t2000\t\n", "cited_id\tciting_id\np1\n", 2, 2),
        ("paper_id\tyear\tvenue_id\np1\t\t\n", "cited_id\tciting_id\n", 2, 2),
        ("wrong\theader\there\np1\t2000\t\n", "cited_id\tciting_id\n", 1, 1),
    ],
)
def test_strict_parse_errors(tmp_path, papers, citations, line, column):
    (tmp_path / "p.tsv").write_text(papers)
    (tmp_path / "c.tsv").write_text(citations)
    with pytest.raises(ParseError) as info:
        load_corpus(CorpusPaths(tmp_path / "p.tsv", tmp_path / "c.tsv"))
    assert (info.value.line, info.value.column) == (line, column)


def test_unknown_key_in_lenient_mode(tmp_path):
    (tmp_path / "p.tsv").write_text("paper_id\tyear\tvenue_id\np1\t2000\t\n")
    (tmp_path / "c.tsv").write_text("cited_id\tciting_id\np1\tghost\n")
    g, rep = load_corpus(CorpusPaths(tmp_path / "p.tsv", tmp_path / "c.tsv"), mode="lenient")
    assert g.n_citations == 0 and rep.files["citations"].unknown_keys == 1


def test_missing_papers_file(tmp_path):
    with pytest.raises(OSError):
        load_corpus(CorpusPaths(tmp_path / "absent.tsv"))


def test_ingest_twice_is_identical(fig2_files):
    paths = CorpusPaths(*fig2_files)
    g1, r1 = load_corpus(paths)
    g2, r2 = load_corpus(paths)
    assert r1.to_dict() == r2.to_dict()
    for attr in ("data", "indices", "indptr"):
        assert getattr(g1.adjacency, attr).tobytes() == getattr(g2.adjacency, attr).tobytes()
        assert getattr(g1.authorship, attr).tobytes() == getattr(g2.authorship, attr).tobytes()


def test_write_corpus_round_trip(tmp_path):
    g = preferential_attachment_graph(3_000, seed=3, n_authors=100, n_venues=7)
    g2, rep = load_corpus(write_corpus(g, tmp_path))
    assert g2.paper_keys == g.paper_keys
    assert np.array_equal(g2.years, g.years)
    assert (g2.adjacency != g.adjacency).nnz == 0
    assert compute_paper_sindex(g2).values.tobytes() == compute_paper_sindex(g).values.tobytes()


# -- ranking output ---------------------------------------------------------


def table_of(values, keys, scaled=True):
    s = ScoreVector("paper", values, keys)
    return rank_scores(s, scale_scores(s) if scaled else None, metric="sindex")


def test_tsv_layout(tmp_path):
    out = tmp_path / "t.tsv"
    write_scores(table_of([0.5, 1.25], ["b", "a"]), out)
    assert out.read_text().splitlines() == [
        "external_key\traw_score\tscaled_score\trank",
        "a\t1.25\t0.32192809488736235\t1",
        "b\t0.5\t-1\t2",
    ]


def test_empty_table_is_header_only(tmp_path):
    out = tmp_path / "t.tsv"
    write_scores(table_of([], []), out)
    assert out.read_text() == "external_key\traw_score\tscaled_score\trank\n"


def test_tied_rows_ordered_by_key(tmp_path):
    out = tmp_path / "t.tsv"
    write_scores(table_of([1.0, 1.0, 2.0], ["m", "c", "x"]), out)
    assert [line.split("\t")[0] for line in out.read_text().splitlines()[1:]] == ["x", "c", "m"]


@pytest.mark.parametrize("fmt", ["tsv", "json"])
def test_round_trip_exact(tmp_path, fmt):
    rng = np.random.default_rng(0)
    values = np.concatenate([rng.random(50) * 10.0 ** rng.integers(-5, 10, 50), np.zeros(5)])
    table = table_of(values, [f"k{i}" for i in range(55)])
    out = tmp_path / f"t.{fmt}"
    write_scores(table, out, fmt)
    back = read_scores(out)
    assert back.rows == table.rows
    out2 = tmp_path / f"u.{fmt}"
    write_scores(back if fmt == "tsv" else table, out2, fmt)
    assert read_scores(out2).rows == back.rows


def test_undefined_scores_serialize_as_empty(tmp_path):
    s = ScoreVector("venue", [np.nan, 2.0], ["a", "b"], optional=True)
    out = tmp_path / "t.tsv"
    write_scores(rank_scores(s), out)
    assert out.read_text().splitlines()[2] == "a\t\t\t"
    back = read_scores(out)
    assert math.isnan(back.rows[1].raw_score) and back.rows[1].rank is None
    write_scores(rank_scores(s), tmp_path / "t.json", "json")
    doc = json.loads((tmp_path / "t.json").read_text())
    assert doc["rows"][1] == {"external_key": "a", "raw_score": None, "scaled_score": None, "rank": None}
