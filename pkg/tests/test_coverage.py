import json

import pytest

from llull.corpus import Corpus, PaperRecord
from llull.coverage import (CoverageReport, build_decomposition_prompt,
                            build_reconstruction_prompt, coverage_report,
                            judge_decomposition, judge_reconstruction,
                            parse_candidates, reports_to_csv)
from llull.gateway import Gateway, HttpProvider, ResponseCache
from llull.registry import DiskRegistry, ElementGroup

from conftest import TDATA, make_replay_gateway


def toy_registries():
    out = {}
    for disk, names in (("A", ["adaptive", "few shot", "zero shot"]),
                        ("B", ["reasoning", "safety", "planning"]),
                        ("C", ["mamba", "diffusion", "lora"])):
        groups = [ElementGroup(canonical=n, members={n}, visits=3 - i, disk=disk)
                  for i, n in enumerate(names)]
        out[disk] = DiskRegistry(venue="TOY", year=2024, disk=disk, groups=groups)
    return out


def test_decomposition_prompt_golden():
    golden = (TDATA / "golden_decomposition_prompt.txt").read_text(encoding="utf-8")
    assert build_decomposition_prompt("Adaptive Reasoning with Mamba",
                                      toy_registries()) == golden


def test_decomposition_prompt_preconditions():
    with pytest.raises(ValueError):
        build_decomposition_prompt("  ", toy_registries())
    with pytest.raises(ValueError):
        build_decomposition_prompt("t", {"A": toy_registries()["A"]})


def test_decomposition_prompt_truncates_to_top_visited():
    regs = toy_registries()
    prompt = build_decomposition_prompt("title", regs, max_elements=2)
    assert "adaptive, few shot (truncated to the 2 most visited of 3)" in prompt
    assert "zero shot" not in prompt


def test_judge_decomposition_valid():
    response = json.dumps({"selected_A": ["adaptive"], "selected_B": ["reasoning"],
                           "selected_C": ["mamba"], "confidence": 0.9,
                           "explanation": "fits"})
    result = judge_decomposition(response, toy_registries(), paper_id="p")
    assert result.valid and result.confidence == 0.9


def test_judge_decomposition_empty_disk():
    response = json.dumps({"selected_A": ["adaptive"], "selected_B": [],
                           "selected_C": ["mamba"], "confidence": 0.9})
    result = judge_decomposition(response, toy_registries())
    assert not result.valid and result.reason == "empty disk B"


def test_judge_decomposition_unknown_name():
    response = json.dumps({"selected_A": ["adaptive"], "selected_B": ["reasoning"],
                           "selected_C": ["quantum annealing"], "confidence": 0.5})
    result = judge_decomposition(response, toy_registries())
    assert not result.valid and "quantum annealing" in result.reason


def test_judge_decomposition_member_variant_resolves():
    regs = toy_registries()
    regs["C"].groups[0].members.add("Mamba SSM")
    response = json.dumps({"selected_A": ["Adaptive"], "selected_B": ["reasoning"],
                           "selected_C": ["Mamba SSM"]})
    assert judge_decomposition(response, regs).valid


def test_judge_decomposition_unparseable():
    result = judge_decomposition("total prose, nothing else", toy_registries())
    assert not result.valid and "no JSON object" in result.reason


def test_reconstruction_prompt_golden_and_dedupe():
    golden = (TDATA / "golden_reconstruction_prompt.txt").read_text(encoding="utf-8")
    assert build_reconstruction_prompt(["adaptive"], ["reasoning"], ["mamba"]) == golden
    deduped = build_reconstruction_prompt(["adaptive", "adaptive"], ["reasoning"], ["mamba"])
    assert deduped == golden
    with pytest.raises(ValueError):
        build_reconstruction_prompt(["a"], [], ["c"])


def test_parse_candidates_handles_brackets_and_cap():
    response = "\n".join([f"{i}. [Title number {i}]" for i in range(1, 8)])
    candidates = parse_candidates(response)
    assert len(candidates) == 5
    assert candidates[0] == "Title number 1"


def test_judge_reconstruction_identical():
    result = judge_reconstruction("A Perfect Match", "1. A Perfect Match")
    assert result.best_similarity == 1.0 and result.reconstructible


def test_judge_reconstruction_threshold_fixture():
    # candidate Jaccards vs the original: 0.10, 0.29, 0.31, 0.05, 0.00
    original_tokens = [f"w{i}" for i in range(69)]
    original = " ".join(original_tokens)

    def candidate(shared, extra_tag):
        toks = original_tokens[:shared] + [f"x{extra_tag}{j}" for j in range(31)]
        return " ".join(toks)

    response = "\n".join([
        "1. " + candidate(10, "a"),
        "2. " + candidate(29, "b"),
        "3. " + candidate(31, "c"),
        "4. " + candidate(5, "d"),
        "5. " + " ".join(f"y{j}" for j in range(31)),
    ])
    result = judge_reconstruction(original, response)
    assert result.best_similarity == pytest.approx(0.31, abs=1e-12)
    assert result.reconstructible is True
    sims = sorted(round(len(set(original_tokens) & set(c.split())) /
                        len(set(original_tokens) | set(c.split())), 2)
                  for c in result.candidates)
    assert sims == [0.0, 0.05, 0.1, 0.29, 0.31]


def test_judge_reconstruction_all_disjoint():
    result = judge_reconstruction("alpha beta gamma", "1. delta epsilon\n2. zeta eta")
    assert result.best_similarity == 0.0 and not result.reconstructible


def test_judge_reconstruction_no_candidates():
    result = judge_reconstruction("alpha", "no numbered list at all")
    assert not result.reconstructible and result.reason == "no parseable candidates"


def test_threshold_monotonicity():
    original = "a b c d e f g h i j"
    response = "1. a b c d e z\n2. a b z y x w\n3. z y x\n4. a b c d e f g h"
    flags = []
    for i in range(10):
        threshold = i / 10
        flags.append(judge_reconstruction(original, response, threshold=threshold)
                     .reconstructible)
    assert all(not later or earlier for earlier, later in zip(flags, flags[1:]))
    assert flags[0] is True and flags[-1] is False


def test_coverage_report_all_valid_and_reconstructing(tmp_path):
    regs = toy_registries()
    papers = [PaperRecord(id=f"p{i}", title="adaptive reasoning mamba", abstract="",
                          venue="TOY", year=2024) for i in range(4)]

    def transport(payload):
        prompt = payload["messages"][0]["content"]
        if "taxonomy" in prompt:
            body = json.dumps({"selected_A": ["adaptive"], "selected_B": ["reasoning"],
                               "selected_C": ["mamba"], "confidence": 1.0})
        else:
            body = "1. adaptive reasoning mamba"
        return {"choices": [{"message": {"content": body}}]}

    provider = HttpProvider(endpoint="fake://", model_name="fake-chat", transport=transport)
    gw = Gateway(provider=provider, cache=ResponseCache(tmp_path / "c"),
                 model_name="fake-chat")
    reports, details = coverage_report(Corpus(records=papers), {("TOY", 2024): regs},
                                       gw, "record")
    assert len(reports) == 1
    assert reports[0].decomp_pct == 100.0 and reports[0].recon_pct == 100.0
    assert len(details) == 4
    assert all(d["reconstruction"]["reconstructible"] for d in details)


def test_coverage_report_empty_venue_omitted():
    csv_text = reports_to_csv([CoverageReport(venue="V", year=1, papers=2,
                                              decomposed=1, reconstructed=0)])
    assert "V,1,2,1,50.00,0,0.00" in csv_text
    assert "Overall,,2,1,50.00,0,0.00" in csv_text


def test_coverage_replay_fixture_deterministic(mini_corpus, replay_registries):
    gw = make_replay_gateway()
    reports1, details1 = coverage_report(mini_corpus, replay_registries, gw, "replay")
    reports2, details2 = coverage_report(mini_corpus, replay_registries, gw, "replay")
    assert reports_to_csv(reports1) == reports_to_csv(reports2)
    assert details1 == details2
    venues = {r.venue for r in reports1}
    assert venues == {"ACL", "ICLR", "COLM"}
    for rep in reports1:
        assert 0.0 <= rep.recon_pct <= rep.decomp_pct <= 100.0
