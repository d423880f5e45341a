import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llull.errors import InsufficientElementsError, TemplateParseError
from llull.machine import (RawIdea, basic_template, enumerate_top, instantiate,
                           load_ideas, parse_template, render, sample_random,
                           save_ideas, subsample)
from llull.registry import DiskRegistry, ElementGroup

import oracles


def make_registry(disk, names_with_visits):
    groups = [ElementGroup(canonical=n, members={n}, visits=v, disk=disk)
              for n, v in names_with_visits]
    return DiskRegistry(venue="V", year=2024, disk=disk, groups=groups)


def simple_registries(n_per_disk=30):
    return {disk: make_registry(disk, [(f"{disk.lower()}{i:03d}", n_per_disk - i)
                                       for i in range(n_per_disk)])
            for disk in ("A", "B", "C")}


def test_parse_comparing_template():
    t = parse_template("Comparing C1 and C2 in B1 with A1")
    assert [(s.disk, s.index) for s in t.slots] == [("C", 1), ("C", 2), ("B", 1), ("A", 1)]
    assert t.arity == {"A": 1, "B": 1, "C": 2}


def test_parse_application_template():
    t = parse_template("A1 application of B1 to C1")
    assert t.arity == {"A": 1, "B": 1, "C": 1}


def test_parse_theme_only_template():
    t = parse_template("C1 is all you need")
    assert t.arity == {"A": 0, "B": 0, "C": 1}


def test_parse_lowercase_and_repeats():
    t = parse_template("a1 meets B1, then a1 again")
    assert [(s.disk, s.index) for s in t.slots] == [("A", 1), ("B", 1)]


def test_parse_no_slots_rejected():
    with pytest.raises(TemplateParseError):
        parse_template("no markers at all")
    with pytest.raises(TemplateParseError):
        parse_template("   ")


def test_basic_template_renders_comma_joined():
    idea = instantiate(basic_template(),
                       {"A1": "less is more", "B1": "confidence calibration", "C1": "Mamba"})
    assert idea.text == "less is more, confidence calibration, Mamba"
    assert idea.text.count(",") == 2


def test_instantiate_substitution():
    t = parse_template("C1 is all you need")
    assert instantiate(t, {"C1": "Mamba"}).text == "Mamba is all you need"


def test_instantiate_duplicate_same_disk_rejected():
    t = parse_template("Comparing C1 and C2 in B1 with A1")
    with pytest.raises(ValueError):
        instantiate(t, {"C1": "Mamba", "C2": "Mamba", "B1": "qa", "A1": "few-shot"})


def test_instantiate_missing_binding_rejected():
    with pytest.raises(ValueError):
        instantiate(basic_template(), {"A1": "x", "B1": "y"})


def test_instantiate_hand_substitution():
    t = parse_template("Comparing C1 and C2 in B1 with A1")
    idea = instantiate(t, {"C1": "Mamba", "C2": "RWKV", "B1": "argument mining",
                           "A1": "few-shot"})
    assert idea.text == "Comparing Mamba and RWKV in argument mining with few-shot"


def test_enumerate_k2_basic_is_8():
    ideas = list(enumerate_top(simple_registries(), 2, basic_template()))
    assert len(ideas) == 8


def test_enumerate_matches_bruteforce_oracle():
    regs = simple_registries(5)
    t = parse_template("Comparing C1 and C2 in B1 with A1")
    ideas = list(enumerate_top(regs, 2, t))
    expected = oracles.count_enumeration([2, 2, 2, 2], ["C", "C", "B", "A"])
    assert len(ideas) == expected == 8


def test_enumerate_order_is_deterministic_and_unique():
    regs = simple_registries(4)
    a = [i.text for i in enumerate_top(regs, 3, basic_template())]
    b = [i.text for i in enumerate_top(regs, 3, basic_template())]
    assert a == b
    assert len(set(a)) == len(a) == 27


def test_enumerate_rank_order():
    regs = simple_registries(4)
    first = next(iter(enumerate_top(regs, 2, basic_template())))
    # highest-visited element of each disk comes first
    assert first.bindings == {"A1": "a000", "B1": "b000", "C1": "c000"}


def test_enumerate_insufficient_elements():
    regs = simple_registries(2)
    with pytest.raises(InsufficientElementsError):
        list(enumerate_top(regs, 3, basic_template()))
    with pytest.raises(InsufficientElementsError):
        # k=1 cannot fill two distinct C slots
        list(enumerate_top(simple_registries(5), 1,
                           parse_template("Comparing C1 and C2 in B1 with A1")))


def test_sample_random_uses_every_element_at_batch_size():
    regs = simple_registries(10)
    ideas = sample_random(regs, basic_template(), 10, seed=1)
    consumed = {b for idea in ideas for b in idea.bindings.values()}
    assert len(consumed) == 30  # pigeonhole: all elements of every disk


def test_sample_random_deterministic():
    regs = simple_registries(50)
    a = [i.text for i in sample_random(regs, basic_template(), 20, seed=99)]
    b = [i.text for i in sample_random(regs, basic_template(), 20, seed=99)]
    assert a == b


def test_sample_random_no_reuse_across_batch():
    regs = simple_registries(100)
    ideas = sample_random(regs, basic_template(), 10, seed=5)
    consumed = [b for idea in ideas for b in idea.bindings.values()]
    assert len(consumed) == len(set(consumed)) == 30


def test_sample_random_idea_mode_allows_reuse():
    regs = simple_registries(3)
    ideas = sample_random(regs, basic_template(), 10, seed=2, reuse="idea")
    assert len(ideas) == 10  # would be impossible without reuse
    for idea in ideas:
        values = list(idea.bindings.values())
        assert len(set(values)) == len(values)


def test_sample_random_insufficient():
    regs = simple_registries(5)
    with pytest.raises(InsufficientElementsError):
        sample_random(regs, basic_template(), 6, seed=0)


def test_sample_random_empty_registry():
    regs = {disk: make_registry(disk, []) for disk in ("A", "B", "C")}
    with pytest.raises(InsufficientElementsError):
        sample_random(regs, basic_template(), 1, seed=0)


def test_sample_random_multislot_template():
    regs = simple_registries(12)
    t = parse_template("Comparing C1 and C2 in B1 with A1")
    ideas = sample_random(regs, t, 6, seed=3)
    c_used = [idea.bindings[k] for idea in ideas for k in ("C1", "C2")]
    assert len(c_used) == len(set(c_used)) == 12


@settings(max_examples=40)
@given(st.lists(st.sampled_from(["word", "study", "of", "deep", "x2y"]), min_size=0, max_size=4),
       st.sampled_from(["A1", "B1", "C1", "C2"]))
def test_render_parse_identity_on_non_slot_text(words, marker):
    source = " ".join(words + [marker] + words)
    t = parse_template(source)
    identity = {s.key: s.key for s in t.slots}
    assert render(t, identity) == " ".join(source.split())


def test_subsample_and_dump_roundtrip(tmp_path):
    regs = simple_registries(6)
    ideas = list(enumerate_top(regs, 4, basic_template()))
    sub = subsample(ideas, 10, seed=0)
    assert len(sub) == 10
    texts = [i.text for i in ideas]
    assert [texts.index(i.text) for i in sub] == sorted(texts.index(i.text) for i in sub)
    save_ideas(sub, tmp_path / "ideas.jsonl", venue="V-2024",
               sampling={"mode": "top", "k": 4, "subsample": 10})
    loaded = load_ideas(tmp_path / "ideas.jsonl")
    assert [i.text for i in loaded] == [i.text for i in sub]
    assert [i.bindings for i in loaded] == [dict(i.bindings) for i in sub]


def test_raw_idea_text_matches_render():
    idea = instantiate(parse_template("Towards A1 B1 via C1"),
                       {"A1": "zero-shot", "B1": "safety", "C1": "LoRA"})
    assert idea.text == render(idea.template, idea.bindings)
