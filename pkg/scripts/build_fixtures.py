#!/usr/bin/env python3
"""Rebuild every bundled fixture: mini corpus, replay cache, golden pins.

Dev tooling, run from the repo root:

    python3 scripts/build_fixtures.py

The rule-based fake provider below is the source of the shipped response
cache; it is a pure function of the prompt text, so rebuilding is
reproducible. Changing it invalidates the cache and all replay goldens.
"""

import hashlib
import json
import random
import re
import shutil
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402

from llull import coverage as coverage_mod  # noqa: E402
from llull import corpus as corpus_mod  # noqa: E402
from llull import extraction, machine, registry, rewriting  # noqa: E402
from llull._text import normalize, tokenize  # noqa: E402
from llull.gateway import Gateway, HttpProvider, ModelRequest, ResponseCache, canonical_key  # noqa: E402
from llull.projection.density import density_grid, pooled_bounds  # noqa: E402
from llull.projection.export import export  # noqa: E402
from llull.projection.tsne import TSNE  # noqa: E402

FIXTURES = ROOT / "fixtures"
TDATA = ROOT / "tests" / "data"
MODEL_NAME = "fake-chat"

# --- element pools -----------------------------------------------------------

THEMES = {
    "adaptive": ["Adaptive", "adaptive", "Adaptability"],
    "less-is-more": ["Less is More"],
    "few-shot": ["Few-Shot", "few-shot"],
    "in-the-wild": ["In-the-Wild"],
    "zero-shot": ["Zero-Shot"],
    "robust": ["Robust", "Robustness"],
    "generalization": ["Generalization", "Generalizability", "Temporal Generalization"],
    "efficient": ["Efficient", "Efficiency"],
    "hierarchical": ["Hierarchical"],
    "self-refine": ["Self-Refine"],
    "alignment": ["Alignment"],
    "compositional": ["Compositional"],
}
DOMAINS = {
    "question answering": ["Question Answering"],
    "machine translation": ["Machine Translation"],
    "reasoning": ["Reasoning"],
    "safety": ["Safety"],
    "calibration": ["Calibration", "Confidence Calibration"],
    "argument mining": ["Argument Mining"],
    "planning": ["Planning"],
    "federated learning": ["Federated Learning"],
    "summarization": ["Summarization", "Text Summarization"],
    "retrieval": ["Retrieval"],
}
METHODS = {
    "mamba": ["Mamba"],
    "rag": ["RAG", "Retrieval Augmented Generation", "Retrieval Augmentation"],
    "transformers": ["Transformers", "Transformer"],
    "diffusion": ["Diffusion", "Diffusion Models"],
    "lora": ["LoRA"],
    "rl": ["Reinforcement Learning", "RL"],
    "kv cache": ["KV Cache"],
    "quantization": ["Quantization"],
    "self-attention": ["Self-Attention"],
    "moe": ["Mixture-of-Experts"],
}

VENUES = {
    ("ACL", 2024): {
        "papers": 40,
        "A": ["adaptive", "less-is-more", "few-shot", "in-the-wild", "zero-shot",
              "generalization", "compositional", "self-refine"],
        "B": ["question answering", "machine translation", "reasoning", "safety",
              "calibration", "argument mining", "summarization", "retrieval"],
        "C": ["mamba", "rag", "transformers", "lora", "self-attention", "diffusion"],
    },
    ("ICLR", 2024): {
        "papers": 35,
        "A": ["robust", "efficient", "generalization", "hierarchical", "alignment",
              "zero-shot", "adaptive"],
        "B": ["planning", "federated learning", "reasoning", "safety", "calibration"],
        "C": ["diffusion", "transformers", "rl", "quantization", "moe", "kv cache"],
    },
    ("COLM", 2024): {
        "papers": 25,
        "A": ["in-the-wild", "alignment", "efficient", "few-shot", "self-refine"],
        "B": ["reasoning", "retrieval", "summarization", "planning", "safety"],
        "C": ["rag", "mamba", "transformers", "kv cache", "lora"],
    },
}

TEMPLATES = (
    ["A1 B1 with C1"] * 4
    + ["Towards A1 B1 via C1"] * 3
    + ["Rethinking B1 with C1"] * 2
    + ["A1 application of B1 to C1"] * 2
    + ["C1 is all you need"]
    + ["Comparing C1 and C2 in B1 with A1"]
)

# normalized surface -> merged group name (the fake model's "semantics")
VARIANT_GROUPS = {
    "rag": "retrieval augmentation",
    "retrieval augmented generation": "retrieval augmentation",
    "retrieval augmentation": "retrieval augmentation",
    "generalization": "generalization",
    "generalizability": "generalization",
    "temporal generalization": "generalization",
    "calibration": "calibration",
    "confidence calibration": "calibration",
    "summarization": "summarization",
    "text summarization": "summarization",
    "transformer": "transformers",
    "transformers": "transformers",
    "diffusion": "diffusion",
    "diffusion models": "diffusion",
    "reinforcement learning": "reinforcement learning",
    "rl": "reinforcement learning",
    "efficient": "efficiency",
    "efficiency": "efficiency",
    "robust": "robustness",
    "robustness": "robustness",
    "adaptive": "adaptive",
    "adaptability": "adaptive",
}

REWRITE_SUFFIXES = [
    "A Systematic Study",
    "Benchmarks and Baselines",
    "An Empirical Analysis",
    "Theory and Practice",
    "A Case Study",
]


def _md5_int(text: str) -> int:
    return int(hashlib.md5(text.encode("utf-8")).hexdigest(), 16)


def build_corpus() -> tuple[list[dict], dict[str, dict]]:
    """Synthetic papers plus the ground-truth annotation per title."""
    rng = random.Random(12345)
    rows = []
    truth: dict[str, dict] = {}
    for (venue, year), spec in VENUES.items():
        for i in range(spec["papers"]):
            pid = f"{venue.lower()}{year % 100}-{i:04d}"
            tmpl = rng.choice(TEMPLATES)
            theme_key = rng.choice(spec["A"])
            domain_key = rng.choice(spec["B"])
            method_keys = rng.sample(spec["C"], 2 if "C2" in tmpl else 1)
            theme = rng.choice(THEMES[theme_key])
            domain = rng.choice(DOMAINS[domain_key])
            methods = [rng.choice(METHODS[k]) for k in method_keys]
            bindings = {"A1": theme, "B1": domain, "C1": methods[0]}
            if len(methods) > 1:
                bindings["C2"] = methods[1]
            title = machine.render(machine.parse_template(tmpl), bindings)
            abstract = (f"We study {domain.lower()} in a {theme.lower()} setting "
                        f"using {' and '.join(m.lower() for m in methods)}. "
                        f"Experiments show consistent gains over strong baselines.")
            if i % 17 == 11:
                abstract = ""
            annotation = {
                "A": [theme],
                "B": [domain],
                "C": list(methods),
                "Template": [tmpl],
            }
            if rng.random() < 0.3:
                extra = rng.choice(spec["A"])
                surface = rng.choice(THEMES[extra])
                if surface not in annotation["A"]:
                    annotation["A"].append(surface)
            if pid == "acl24-0003":
                # cross-disk duplicate on purpose: exclusivity keeps it on C
                annotation["B"].append("Retrieval")
                annotation["C"].append("Retrieval")
            rows.append({"id": pid, "title": title, "abstract": abstract,
                         "venue": venue, "year": year})
            truth[title] = annotation
    return rows, truth


class FakeModel:
    """Rule-based responder, a pure function of the prompt text."""

    def __init__(self, truth: dict[str, dict]):
        self.truth = truth

    def __call__(self, payload: dict) -> dict:
        prompt = payload["messages"][0]["content"]
        return {"choices": [{"message": {"content": self.respond(prompt)}}]}

    def respond(self, prompt: str) -> str:
        if "You are a helpful assistant who annotates the paper" in prompt:
            return self._extraction(prompt)
        if "merges the keywords or phrases" in prompt:
            return self._merge(prompt)
        if "The combination:" in prompt:
            return self._rewrite(prompt)
        if "expert in AI research taxonomy" in prompt:
            return self._decompose(prompt)
        if "generate 5 different realistic paper titles" in prompt:
            return self._reconstruct(prompt)
        raise AssertionError("unrecognized prompt")

    def _extraction(self, prompt: str) -> str:
        match = re.search(r"You task:\n\nTitle: (.*)\n\nAbstract:", prompt)
        title = match.group(1)
        body = json.dumps(self.truth[title])
        if _md5_int(title) % 7 == 0:
            return f"Here is the annotation:\n```json\n{body}\n```\n"
        return body

    def _merge(self, prompt: str) -> str:
        match = re.search(r"for a (\w+):\n(.*?)\n\nRequirements:", prompt, re.DOTALL)
        keywords = [k.strip() for k in match.group(2).split(", ") if k.strip()]
        groups: dict[str, list[str]] = {}
        for kw in keywords:
            name = VARIANT_GROUPS.get(normalize(kw))
            if name:
                groups.setdefault(name, []).append(kw)
        merged = {name: kws for name, kws in groups.items() if len(kws) >= 2}
        return json.dumps(merged)

    def _rewrite(self, prompt: str) -> str:
        combo = prompt.rsplit("The combination: ", 1)[1].strip()
        suffix = REWRITE_SUFFIXES[_md5_int(combo) % len(REWRITE_SUFFIXES)]
        return f'"{combo.title()}: {suffix}"'

    @staticmethod
    def _strip_s(token: str) -> str:
        return token[:-1] if token.endswith("s") else token

    def _matches(self, canonical: str, title_tokens: set) -> bool:
        toks = {self._strip_s(t) for t in tokenize(canonical)}
        return bool(toks & title_tokens)

    def _decompose(self, prompt: str) -> str:
        match = re.search(
            r"THEMES \(A\): (.*)\n\nDOMAINS \(B\): (.*)\n\nMETHODOLOGIES \(C\): (.*)"
            r"\n\nPAPER TITLE: \"(.*)\"", prompt)
        themes, domains, methodologies, title = match.groups()
        title_tokens = {self._strip_s(t) for t in tokenize(title)}
        selected = {}
        for key, listing in (("selected_A", themes), ("selected_B", domains),
                             ("selected_C", methodologies)):
            names = [n.strip() for n in listing.split(", ") if n.strip()]
            selected[key] = [n for n in names if self._matches(n, title_tokens)][:2]
        selected["confidence"] = 0.85
        selected["explanation"] = "token overlap with the title"
        return json.dumps(selected)

    def _reconstruct(self, prompt: str) -> str:
        match = re.search(r"THEMES: (.*)\nDOMAINS: (.*)\nMETHODOLOGIES: (.*)\n\nGenerate",
                          prompt)
        theme = match.group(1).split(", ")[0]
        domain = match.group(2).split(", ")[0]
        method = match.group(3).split(", ")[0]
        titles = [
            f"{theme.title()} {domain.title()} with {method.title()}",
            f"Towards {theme.title()} {domain.title()}: A {method.title()} Approach",
            f"{method.title()} for {domain.title()}: The Role of {theme.title()}",
            f"Revisiting {domain.title()} through {method.title()} under {theme.title()} Conditions",
            f"On the Limits of {method.title()} in {domain.title()}",
        ]
        return "\n".join(f"{i + 1}. {t}" for i, t in enumerate(titles))


def record_pipeline(rows, truth, cache_dir: Path):
    """Run the full pipeline once in record mode against the fake model."""
    provider = HttpProvider(endpoint="fake://", model_name=MODEL_NAME,
                            transport=FakeModel(truth))
    gateway = Gateway(provider=provider, cache=ResponseCache(cache_dir),
                      parallelism=4, model_name=MODEL_NAME)

    corpus, rejects = corpus_mod.ingest("\n".join(json.dumps(r) for r in rows))
    assert not rejects, rejects
    drafts, failures = extraction.extract_corpus(corpus, gateway, "record")
    assert len(drafts) == len(corpus.records), failures

    venue_of = {r.id: (r.venue, r.year) for r in corpus.records}
    grouped: dict[tuple, list] = {}
    for d in drafts:
        grouped.setdefault(venue_of[d.paper_id], []).append(d)

    registries: dict[tuple, dict[str, registry.DiskRegistry]] = {}
    for key in sorted(grouped):
        venue, year = key
        registries[key] = {}
        for disk in registry.DISKS:
            registries[key][disk] = registry.build_registry(
                grouped[key], venue, year, disk, gateway=gateway, mode="record")
    for disk in registry.DISKS:
        registry.build_all_registry([registries[key][disk] for key in sorted(registries)],
                                    gateway=gateway, mode="record")

    records_by_venue = {}
    for key in sorted(registries):
        template = machine.basic_template()
        ideas = list(machine.enumerate_top(registries[key], 5, template))
        records, rw_failures = rewriting.rewrite_batch(ideas, gateway, "record")
        assert not rw_failures, rw_failures
        records_by_venue[key] = records

    reports, details = coverage_mod.coverage_report(corpus, registries, gateway, "record")
    return corpus, registries, records_by_venue, reports


def pin_goldens(corpus, registries):
    TDATA.mkdir(parents=True, exist_ok=True)

    paper = corpus.records[0]
    (TDATA / "golden_extraction_prompt.txt").write_text(
        extraction.build_extraction_prompt(paper), encoding="utf-8")
    (TDATA / "golden_extraction_paper.json").write_text(json.dumps({
        "id": paper.id, "title": paper.title, "abstract": paper.abstract,
        "venue": paper.venue, "year": paper.year}, indent=2) + "\n", encoding="utf-8")

    request = ModelRequest(prompt="spin me a research idea", model_name=MODEL_NAME)
    (TDATA / "canonical_key.json").write_text(json.dumps({
        "request": {
            "prompt": request.prompt, "model_name": request.model_name,
            "max_output_tokens": request.max_output_tokens,
            "temperature": request.temperature, "top_p": request.top_p,
            "top_k": request.top_k,
        },
        "digest": canonical_key(request),
    }, indent=2) + "\n", encoding="utf-8")

    acl_a = registries[("ACL", 2024)]["A"]
    top = registry.top_k(acl_a, 20)
    (TDATA / "golden_topk_ACL_2024_A.json").write_text(json.dumps(
        [{"canonical": g.canonical, "visits": g.visits} for g in top], indent=2) + "\n",
        encoding="utf-8")

    all_regs = [registries[key][disk] for key in sorted(registries) for disk in registry.DISKS]
    paper_counts = {}
    for r in corpus.records:
        paper_counts[(r.venue, r.year)] = paper_counts.get((r.venue, r.year), 0) + 1
    tregs = []
    rows = registry.registry_stats(all_regs, tregs, paper_counts)
    (TDATA / "golden_stats.csv").write_text(registry.stats_to_csv(rows), encoding="utf-8")

    # coverage prompt goldens over three-element toy registries
    toy = {}
    for disk, names in (("A", ["adaptive", "few shot", "zero shot"]),
                        ("B", ["reasoning", "safety", "planning"]),
                        ("C", ["mamba", "diffusion", "lora"])):
        groups = [registry.ElementGroup(canonical=n, members={n}, visits=3 - i, disk=disk)
                  for i, n in enumerate(names)]
        toy[disk] = registry.DiskRegistry(venue="TOY", year=2024, disk=disk, groups=groups)
    (TDATA / "golden_decomposition_prompt.txt").write_text(
        coverage_mod.build_decomposition_prompt("Adaptive Reasoning with Mamba", toy),
        encoding="utf-8")
    (TDATA / "golden_reconstruction_prompt.txt").write_text(
        coverage_mod.build_reconstruction_prompt(["adaptive"], ["reasoning"], ["mamba"]),
        encoding="utf-8")


def pin_bleu_fixture():
    """50 title pairs with reference-scorer values from the rational oracle."""
    rng = random.Random(777)
    vocab = ("adaptive retrieval reasoning mamba diffusion calibration safety "
             "transformers planning summarization alignment zero shot few "
             "learning models for with under towards study analysis robust "
             "efficient language large neural graph attention sparse dense").split()
    pairs = []
    for _ in range(50):
        cand = [rng.choice(vocab) for _ in range(rng.randint(3, 12))]
        if rng.random() < 0.3:
            ref = list(cand)
            for _ in range(rng.randint(0, 3)):
                ref[rng.randrange(len(ref))] = rng.choice(vocab)
        else:
            ref = [rng.choice(vocab) for _ in range(rng.randint(3, 12))]
        pairs.append({"candidate": cand, "reference": ref})
    values = [oracles.reference_bleu(p["candidate"], p["reference"]) for p in pairs]
    with open(TDATA / "bleu_pairs.jsonl", "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p) + "\n")
    (TDATA / "bleu_expected.json").write_text(
        json.dumps([repr(v) for v in values], indent=2) + "\n", encoding="utf-8")


def pin_tsne_fixture():
    """200 points in 4 clusters; pin the seeded embedding and both KLs."""
    rng = np.random.default_rng(2024)
    centers = rng.normal(0.0, 5.0, size=(4, 10))
    points = np.concatenate([
        centers[i] + rng.normal(0.0, 0.3, size=(50, 10)) for i in range(4)
    ])
    model = TSNE(perplexity=30.0, n_iter=1000, seed=0)
    embedding = model.fit_transform(points)
    np.savez(TDATA / "tsne_fixture.npz", points=points, embedding=embedding,
             kl_exaggeration_end=model.kl_exaggeration_end_, kl_final=model.kl_final_)
    print(f"  tsne: kl_exaggeration_end={model.kl_exaggeration_end_:.6f} "
          f"kl_final={model.kl_final_:.6f}")


def pin_svg_golden():
    """Tiny deterministic density export golden."""
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.5], [2.0, 2.0]])
    bounds = pooled_bounds(pts)
    grids = {
        "alpha": density_grid(pts[:2], 8, bounds, 0.5),
        "beta": density_grid(pts[2:], 8, bounds, 0.5),
    }
    points = [(f"alpha:{i}", "alpha", float(p[0]), float(p[1])) for i, p in enumerate(pts[:2])]
    points += [(f"beta:{i}", "beta", float(p[0]), float(p[1])) for i, p in enumerate(pts[2:])]
    out = TDATA / "golden_projection"
    if out.exists():
        shutil.rmtree(out)
    export(points, grids, out, {"resolution": 8, "bandwidth": 0.5})


def main():
    if FIXTURES.exists():
        shutil.rmtree(FIXTURES)
    FIXTURES.mkdir(parents=True)
    TDATA.mkdir(parents=True, exist_ok=True)

    rows, truth = build_corpus()
    with open(FIXTURES / "mini_corpus.jsonl", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"corpus: {len(rows)} papers")

    cache_dir = FIXTURES / "cache"
    corpus, registries, records_by_venue, reports = record_pipeline(rows, truth, cache_dir)
    n_cached = len(ResponseCache(cache_dir))
    print(f"cache: {n_cached} recorded responses")
    for key, records in sorted(records_by_venue.items()):
        print(f"  {key}: {len(records)} rewritten ideas")
    for rep in reports:
        print(f"  coverage {rep.venue} {rep.year}: decomp {rep.decomp_pct:.1f}% "
              f"recon {rep.recon_pct:.1f}%")

    (FIXTURES / "config.json").write_text(json.dumps({
        "model_name": MODEL_NAME,
        "gateway_mode": "replay",
        "cache_dir": str(Path("fixtures") / "cache"),
        # matches the recorded top-5 enumeration so every replay spin can be rewritten
        "spin_top_k": 5,
    }, indent=2) + "\n", encoding="utf-8")

    pin_goldens(corpus, registries)
    pin_bleu_fixture()
    pin_tsne_fixture()
    pin_svg_golden()
    print("fixtures rebuilt")


if __name__ == "__main__":
    main()
