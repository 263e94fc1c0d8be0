import sys
from pathlib import Path

import pytest

from sindex import PaperRecord, build_graph

sys.path.insert(0, str(Path(__file__).parent))

# Feed-forward loop: p1 is cited by p2 and p3, and p2 is cited by p3.
FIG2_PAPERS = [PaperRecord("p1", 2000, "v1"), PaperRecord("p2", 2010, "v2"), PaperRecord("p3", 2014, "v2")]
FIG2_CITATIONS = [("p1", "p2"), ("p1", "p3"), ("p2", "p3")]
FIG2_AUTHORSHIPS = [("p1", "alice"), ("p2", "alice"), ("p3", "bob")]


@pytest.fixture
def fig2():
    return build_graph(FIG2_PAPERS, FIG2_CITATIONS, FIG2_AUTHORSHIPS)


def write_fixture(directory, papers=FIG2_PAPERS, citations=FIG2_CITATIONS, authorships=FIG2_AUTHORSHIPS):
    directory = Path(directory)
    (directory / "papers.tsv").write_text(
        "paper_id\tyear\tvenue_id\n"
        + "".join(f"{p.key}\t{'' if p.year is None else p.year}\t{p.venue or ''}\n" for p in papers)
    )
    (directory / "citations.tsv").write_text(
        "cited_id\tciting_id\n" + "".join(f"{a}\t{b}\n" for a, b in citations)
    )
    (directory / "authorships.tsv").write_text(
        "paper_id\tauthor_id\n" + "".join(f"{a}\t{b}\n" for a, b in authorships)
    )
    return directory / "papers.tsv", directory / "citations.tsv", directory / "authorships.tsv"


@pytest.fixture
def fig2_files(tmp_path):
    return write_fixture(tmp_path)
