import pytest

from llull.errors import RewriteError
from llull.gateway import Gateway, ResponseCache, canonical_key
from llull.machine import basic_template, enumerate_top, instantiate
from llull.rewriting import (IdeaRecord, build_rewrite_prompt, clean_title, rewrite,
                             rewrite_batch, load_records, save_records, save_titles)

from conftest import make_replay_gateway
from test_machine import simple_registries


def idea(text_parts=("hindsight", "debate", "RL")):
    return instantiate(basic_template(),
                       {"A1": text_parts[0], "B1": text_parts[1], "C1": text_parts[2]})


def recorded_gateway(tmp_path, raw, response_text):
    cache = ResponseCache(tmp_path / "cache")
    gw = Gateway(provider=None, cache=cache, model_name="fake-chat")
    request = gw.make_request(build_rewrite_prompt(raw))
    cache.put(canonical_key(request), response_text)
    return gw


def test_prompt_contains_combination():
    raw = idea(("hindsight", "debate", "RL"))
    assert "hindsight, debate, RL" in build_rewrite_prompt(raw)
    raw2 = idea(("emergent", "theory of mind", "variational inference"))
    assert "emergent, theory of mind, variational inference" in build_rewrite_prompt(raw2)


def test_prompt_demands_single_title():
    assert "Please output one title only" in build_rewrite_prompt(idea())


def test_prompt_byte_stable():
    assert build_rewrite_prompt(idea()) == build_rewrite_prompt(idea())


def test_rewrite_recorded_title(tmp_path):
    raw = idea(("emergent", "theory of mind", "variational inference"))
    title = "Emergent Theory of Mind in Disentangled Latent Spaces via Variational Inference"
    gw = recorded_gateway(tmp_path, raw, title)
    record = rewrite(raw, gw, "replay")
    assert record.title == title
    assert record.model_name == "fake-chat"
    assert record.request_digest == canonical_key(gw.make_request(build_rewrite_prompt(raw)))


def test_rewrite_strips_quotes(tmp_path):
    raw = idea()
    gw = recorded_gateway(tmp_path, raw, '"A Quoted Title"')
    assert rewrite(raw, gw, "replay").title == "A Quoted Title"


def test_rewrite_takes_first_nonempty_line(tmp_path):
    raw = idea()
    gw = recorded_gateway(tmp_path, raw, "\n\n**The Real Title**\nAnd some rationale.")
    assert rewrite(raw, gw, "replay").title == "The Real Title"


def test_rewrite_empty_output_errors(tmp_path):
    raw = idea()
    gw = recorded_gateway(tmp_path, raw, "\n\n   \n")
    with pytest.raises(RewriteError):
        rewrite(raw, gw, "replay")


def test_clean_title_unwraps_nested_markup():
    assert clean_title("“*Fancy Title*”") == "Fancy Title"
    assert clean_title("## Heading Title") == "Heading Title"


def test_batch_empty():
    records, failures = rewrite_batch([], make_replay_gateway(), "replay")
    assert records == [] and failures == []


def test_batch_isolates_failures(tmp_path):
    good, bad = idea(("a", "b", "c")), idea(("d", "e", "f"))
    cache = ResponseCache(tmp_path / "cache")
    gw = Gateway(provider=None, cache=cache, model_name="fake-chat")
    cache.put(canonical_key(gw.make_request(build_rewrite_prompt(good))), "Good Title")
    cache.put(canonical_key(gw.make_request(build_rewrite_prompt(bad))), "   \n ")
    records, failures = rewrite_batch([good, bad], gw, "replay")
    assert [r.title for r in records] == ["Good Title"]
    assert len(failures) == 1 and failures[0]["raw_text"] == "d, e, f"


def test_batch_replay_fixture_deterministic(replay_registries):
    gw = make_replay_gateway()
    ideas = list(enumerate_top(replay_registries[("ACL", 2024)], 5, basic_template()))
    first, failures1 = rewrite_batch(ideas, gw, "replay")
    second, failures2 = rewrite_batch(ideas, gw, "replay")
    assert not failures1 and not failures2
    assert len(first) == 125
    assert [r.to_dict() for r in first] == [r.to_dict() for r in second]


def test_titles_single_line_invariant(replay_registries):
    gw = make_replay_gateway()
    ideas = list(enumerate_top(replay_registries[("COLM", 2024)], 3, basic_template()))
    records, _ = rewrite_batch(ideas, gw, "replay")
    assert records
    for rec in records:
        assert "\n" not in rec.title and rec.title.strip()


def test_provenance_closure(replay_registries):
    gw = make_replay_gateway()
    ideas = list(enumerate_top(replay_registries[("ICLR", 2024)], 2, basic_template()))
    records, _ = rewrite_batch(ideas, gw, "replay")
    rec = records[0]
    assert rec.raw.template.source == "A1, B1, C1"
    assert set(rec.raw.bindings) == {"A1", "B1", "C1"}
    assert rec.request_digest and rec.model_name


def test_records_roundtrip(tmp_path, replay_registries):
    gw = make_replay_gateway()
    ideas = list(enumerate_top(replay_registries[("ACL", 2024)], 2, basic_template()))
    records, _ = rewrite_batch(ideas, gw, "replay")
    save_records(records, tmp_path / "r.jsonl")
    loaded = load_records(tmp_path / "r.jsonl")
    assert [r.to_dict() for r in loaded] == [r.to_dict() for r in records]
    save_titles(records, tmp_path / "t.txt")
    lines = (tmp_path / "t.txt").read_text().splitlines()
    assert lines == [r.title for r in records]
