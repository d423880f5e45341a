import json

import pytest

from llull._text import normalize
from llull.corpus import Corpus, PaperRecord
from llull.errors import ExtractionParseError
from llull.extraction import (ElementDraft, build_extraction_prompt, extract_corpus,
                              load_drafts, parse_extraction, save_drafts,
                              validate_exclusivity)
from llull.gateway import Gateway, ResponseCache, canonical_key

from conftest import TDATA, make_replay_gateway


def paper(**over):
    base = {"id": "x", "title": "Adaptive Reasoning with Mamba",
            "abstract": "We study things.", "venue": "ACL", "year": 2024}
    base.update(over)
    return PaperRecord(**base)


def test_prompt_contains_title_and_abstract():
    p = paper()
    prompt = build_extraction_prompt(p)
    assert f"Title: {p.title}" in prompt
    assert f"Abstract: {p.abstract}" in prompt


def test_prompt_carries_worked_example():
    prompt = build_extraction_prompt(paper())
    assert ('{"A": ["adaptive"], "B": ["RAG"], "C": ["Large Language Models"], '
            '"Template": ["A1 application of B1 to C1"]}') in prompt
    assert "Thrust: Adaptively Propels Large Language Models" in prompt


def test_prompt_empty_abstract_still_valid():
    prompt = build_extraction_prompt(paper(abstract=""))
    assert "Abstract: \n" in prompt


def test_prompt_golden_file():
    pinned = json.loads((TDATA / "golden_extraction_paper.json").read_text())
    golden = (TDATA / "golden_extraction_prompt.txt").read_text(encoding="utf-8")
    assert build_extraction_prompt(PaperRecord(**pinned)) == golden


def test_parse_plain_annotation():
    response = ('{"A":["few-shot"],"B":["argument mining"],"C":["Mamba"],'
                '"Template":["Comparing C1 and C2 in B1 with A1"]}')
    draft = parse_extraction(response, paper_id="p")
    assert draft.themes == ["few-shot"]
    assert draft.domains == ["argument mining"]
    assert draft.methods == ["Mamba"]
    assert draft.templates == ["Comparing C1 and C2 in B1 with A1"]


def test_parse_fenced_annotation():
    body = '{"A": ["x"], "B": ["y"], "C": ["z"], "Template": ["A1 B1 C1"]}'
    fenced = f"Sure, here you go:\n```json\n{body}\n```\nHope that helps."
    assert parse_extraction(fenced).themes == ["x"]


def test_parse_garbage_fails():
    with pytest.raises(ExtractionParseError):
        parse_extraction("not json at all")


def test_parse_missing_key_fails():
    with pytest.raises(ExtractionParseError):
        parse_extraction('{"A": ["x"], "B": ["y"], "C": ["z"]}')


def test_parse_skips_decoys():
    response = ('ignore {"broken": } then {"other": 1} and finally '
                '{"A": ["a"], "B": ["b"], "C": ["c"], "Template": ["A1, B1, C1"]}')
    assert parse_extraction(response).methods == ["c"]


def test_parse_trims_and_dedupes():
    draft = parse_extraction('{"A": [" x ", "x", ""], "B": ["y"], "C": ["z"], "Template": ["A1"]}')
    assert draft.themes == ["x"]


def test_exclusivity_keeps_method():
    # "retrieval" on both B and C stays on C, removal logged
    draft = ElementDraft(paper_id="p", themes=["adaptive"],
                         domains=["retrieval", "safety"], methods=["Retrieval"],
                         templates=["A1"])
    out = validate_exclusivity(draft)
    assert out.domains == ["safety"]
    assert out.methods == ["Retrieval"]
    assert out.removed == [{"surface": "retrieval", "removed_from": "B", "kept_in": "C"}]


def test_exclusivity_identity_when_clean():
    draft = ElementDraft(paper_id="p", themes=["a"], domains=["b"], methods=["c"],
                         templates=["A1"])
    out = validate_exclusivity(draft)
    assert (out.themes, out.domains, out.methods) == (["a"], ["b"], ["c"])
    assert out.removed == []


def test_exclusivity_triple_keeps_c():
    draft = ElementDraft(paper_id="p", themes=["shared"], domains=["shared"],
                         methods=["shared"], templates=["A1"])
    out = validate_exclusivity(draft)
    assert out.themes == [] and out.domains == [] and out.methods == ["shared"]
    assert {r["removed_from"] for r in out.removed} == {"A", "B"}


def test_exclusivity_invariant_on_replay_drafts(replay_drafts):
    for draft in replay_drafts:
        a = {normalize(s) for s in draft.themes}
        b = {normalize(s) for s in draft.domains}
        c = {normalize(s) for s in draft.methods}
        assert not (a & b) and not (a & c) and not (b & c)


def test_draft_roundtrip(tmp_path):
    drafts = [ElementDraft(paper_id="p1", themes=["A x"], domains=["b"], methods=["c"],
                           templates=["A1 B1"], removed=[{"surface": "b", "removed_from": "A",
                                                          "kept_in": "B"}])]
    save_drafts(drafts, tmp_path / "d.jsonl")
    assert load_drafts(tmp_path / "d.jsonl") == drafts


def test_extract_corpus_replay_full(mini_corpus, replay_drafts):
    assert len(replay_drafts) == len(mini_corpus) == 100
    # byte-identical across runs
    gateway = make_replay_gateway()
    again, failures = extract_corpus(mini_corpus, gateway, "replay")
    assert not failures
    assert [d.to_dict() for d in again] == [d.to_dict() for d in replay_drafts]


def test_extract_corpus_order_matches_corpus(mini_corpus, replay_drafts):
    assert [d.paper_id for d in replay_drafts] == mini_corpus.ids()


def test_extract_empty_corpus(replay_gateway):
    drafts, failures = extract_corpus(Corpus(records=[]), replay_gateway, "replay")
    assert drafts == [] and failures == []


def test_extract_malformed_recorded_response(tmp_path):
    p = paper(id="solo")
    cache = ResponseCache(tmp_path / "cache")
    gw = Gateway(provider=None, cache=cache, model_name="fake-chat")
    request = gw.make_request(build_extraction_prompt(p))
    cache.put(canonical_key(request), "total nonsense, no json here")
    drafts, failures = extract_corpus(Corpus(records=[p]), gw, "replay")
    assert drafts == []
    assert len(failures) == 1
    assert failures[0]["paper_id"] == "solo" and failures[0]["stage"] == "parse"
