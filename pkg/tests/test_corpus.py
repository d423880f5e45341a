import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llull.corpus import Corpus, filter_records, ingest, sample, to_jsonl
from llull.errors import IngestError

from conftest import FIXTURES


def row(i=1, **over):
    base = {"id": f"p{i}", "title": f"Paper {i}", "abstract": "text",
            "venue": "ACL", "year": 2024}
    base.update(over)
    return json.dumps(base)


def test_single_wellformed_row():
    corpus, rejects = ingest(row())
    assert len(corpus) == 1 and rejects == []
    assert corpus.records[0].id == "p1"


def test_missing_title_rejected():
    with pytest.raises(IngestError):
        ingest(row(title=""))  # zero valid rows overall
    corpus, rejects = ingest(row(1) + "\n" + row(2, title="  "))
    assert len(corpus) == 1
    assert len(rejects) == 1 and rejects[0].reason == "empty title"
    assert rejects[0].line_number == 2


def test_fixture_row_count():
    raw = (FIXTURES / "mini_corpus.jsonl").read_text(encoding="utf-8")
    expected = sum(1 for line in raw.splitlines() if line.strip())
    corpus, rejects = ingest(FIXTURES / "mini_corpus.jsonl")
    assert len(corpus) == expected == 100
    assert rejects == []


def test_duplicate_id_rejected():
    corpus, rejects = ingest(row(1) + "\n" + row(1))
    assert len(corpus) == 1
    assert rejects[0].reason == "duplicate id"


def test_year_bounds_and_bad_json():
    lines = "\n".join([row(1), row(2, year=1900), row(3, year="later"), "not json"])
    corpus, rejects = ingest(lines)
    assert len(corpus) == 1
    assert sorted(r.reason for r in rejects) == [
        "invalid json", "invalid year", "year out of range [1950, 2100]"]


def test_csv_ingest_roundtrip():
    csv_text = ("id,title,abstract,venue,year\n"
                "a,Alpha Title,Some abstract,ACL,2024\n"
                "b,Beta Title,,ICLR,2023\n")
    corpus, rejects = ingest(csv_text, format="csv")
    assert [r.id for r in corpus] == ["a", "b"]
    assert corpus.records[1].abstract == ""
    assert rejects == []


def test_csv_missing_header():
    with pytest.raises(IngestError):
        ingest("id,title\n1,x\n", format="csv")


def test_unknown_format():
    with pytest.raises(IngestError):
        ingest(row(), format="xml")


def test_missing_path_is_unreadable_source():
    with pytest.raises(IngestError, match="unreadable source"):
        ingest("no_such_file.jsonl")


def test_roundtrip_identity(mini_corpus):
    again, rejects = ingest(to_jsonl(mini_corpus))
    assert rejects == []
    assert again.records == mini_corpus.records


def test_sample_identity_when_n_is_size(mini_corpus):
    out = sample(mini_corpus, len(mini_corpus), seed=3)
    assert out.records == mini_corpus.records


def test_sample_deterministic(mini_corpus):
    a = sample(mini_corpus, 10, seed=7)
    b = sample(mini_corpus, 10, seed=7)
    assert a.records == b.records
    assert len(set(a.ids())) == 10


def test_sample_seed_changes_set(mini_corpus):
    # brute-force oracle: compare the two picked id sets directly
    ids7 = set(sample(mini_corpus, 10, seed=7).ids())
    ids8 = set(sample(mini_corpus, 10, seed=8).ids())
    assert ids7 != ids8


def test_sample_preserves_relative_order(mini_corpus):
    picked = sample(mini_corpus, 25, seed=1).ids()
    positions = [mini_corpus.ids().index(i) for i in picked]
    assert positions == sorted(positions)


def test_sample_n_too_large(mini_corpus):
    with pytest.raises(ValueError):
        sample(mini_corpus, len(mini_corpus) + 1, seed=0)


def test_filter_venue_year(mini_corpus):
    # manual count oracle over the fixture file
    expected = [r for r in mini_corpus.records if r.venue == "ACL" and r.year == 2024]
    out = filter_records(mini_corpus, venue="ACL", year=2024)
    assert out.records == expected
    assert len(out) > 0


def test_filter_no_predicates_identity(mini_corpus):
    assert filter_records(mini_corpus).records == mini_corpus.records


def test_filter_absent_venue_empty(mini_corpus):
    assert filter_records(mini_corpus, venue="NOPE").records == []


def test_filter_composition(mini_corpus):
    composed = filter_records(filter_records(mini_corpus, venue="ACL"), year=2024)
    direct = filter_records(mini_corpus, venue="ACL", year=2024)
    assert composed.records == direct.records


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 100))
def test_sample_property_distinct_and_deterministic(seed, n):
    records = [json.loads(row(i)) for i in range(100)]
    corpus = Corpus(records=[__import__("llull.corpus", fromlist=["PaperRecord"])
                             .PaperRecord(**r) for r in records])
    a = sample(corpus, n, seed)
    b = sample(corpus, n, seed)
    assert a.records == b.records
    assert len(set(a.ids())) == n
