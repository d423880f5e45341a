"""Bijective coverage: decompose real titles into registry elements, then try
to reconstruct them from those elements alone.

A paper decomposes when the model maps its title onto at least one existing
element per disk. It reconstructs when one of five generated candidate titles
reaches the Jaccard threshold (default 0.30) against the original.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import prompts
from ._text import tokenize
from .corpus import Corpus
from .errors import GatewayError
from .gateway import Gateway
from .metrics import jaccard
from .registry import DiskRegistry, top_k

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.30
DEFAULT_MAX_ELEMENTS = 300  # prompt-budget cap per disk, top-visited first
MAX_CANDIDATES = 5


@dataclass
class DecompositionResult:
    paper_id: str
    selected_a: list[str] = field(default_factory=list)
    selected_b: list[str] = field(default_factory=list)
    selected_c: list[str] = field(default_factory=list)
    confidence: float = 0.0  # stored, never used in the validity decision
    valid: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "selected_A": self.selected_a,
            "selected_B": self.selected_b,
            "selected_C": self.selected_c,
            "confidence": self.confidence,
            "valid": self.valid,
            "reason": self.reason,
        }


@dataclass
class ReconstructionResult:
    paper_id: str
    candidates: list[str] = field(default_factory=list)
    best_similarity: float = 0.0
    reconstructible: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "candidates": self.candidates,
            "best_similarity": self.best_similarity,
            "reconstructible": self.reconstructible,
            "reason": self.reason,
        }


@dataclass
class CoverageReport:
    venue: str
    year: int
    papers: int
    decomposed: int
    reconstructed: int

    @property
    def decomp_pct(self) -> float:
        return 100.0 * self.decomposed / self.papers if self.papers else 0.0

    @property
    def recon_pct(self) -> float:
        return 100.0 * self.reconstructed / self.papers if self.papers else 0.0


def _element_lines(registry: DiskRegistry, max_elements: int) -> str:
    groups = top_k(registry, max(len(registry.groups), 1)) if registry.groups else []
    names = [g.canonical for g in groups[:max_elements]]
    listing = ", ".join(names)
    if len(groups) > max_elements:
        listing += f" (truncated to the {max_elements} most visited of {len(groups)})"
    return listing


def build_decomposition_prompt(title: str, registries: dict[str, DiskRegistry],
                               max_elements: int = DEFAULT_MAX_ELEMENTS) -> str:
    if not title.strip():
        raise ValueError("title must be nonempty")
    missing = [d for d in ("A", "B", "C") if d not in registries or not registries[d].groups]
    if missing:
        raise ValueError(f"registries missing or empty for disks: {missing}")
    return prompts.fill(
        prompts.DECOMPOSITION_PROMPT,
        themes=_element_lines(registries["A"], max_elements),
        domains=_element_lines(registries["B"], max_elements),
        methodologies=_element_lines(registries["C"], max_elements),
        title=title,
    )


def _first_object(text: str) -> dict | None:
    decoder = json.JSONDecoder()
    idx = text.find("{")
    while idx != -1:
        try:
            obj, _ = decoder.raw_decode(text, idx)
        except json.JSONDecodeError:
            idx = text.find("{", idx + 1)
            continue
        if isinstance(obj, dict):
            return obj
        idx = text.find("{", idx + 1)
    return None


def _as_str_list(value) -> list[str]:
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list):
        return []
    return [v.strip() for v in value if isinstance(v, str) and v.strip()]


def judge_decomposition(response: str, registries: dict[str, DiskRegistry],
                        paper_id: str = "") -> DecompositionResult:
    """Valid iff the response parses, all three selections are nonempty, and
    every selected name resolves to a registry group (normalized match against
    canonicals or member variants)."""
    obj = _first_object(response)
    if obj is None:
        return DecompositionResult(paper_id=paper_id, reason="no JSON object in response")
    selected = {
        "A": _as_str_list(obj.get("selected_A")),
        "B": _as_str_list(obj.get("selected_B")),
        "C": _as_str_list(obj.get("selected_C")),
    }
    try:
        confidence = float(obj.get("confidence", 0.0))
    except (TypeError, ValueError):
        confidence = 0.0
    result = DecompositionResult(
        paper_id=paper_id,
        selected_a=selected["A"], selected_b=selected["B"], selected_c=selected["C"],
        confidence=confidence,
    )
    for disk in ("A", "B", "C"):
        if not selected[disk]:
            result.reason = f"empty disk {disk}"
            return result
    for disk in ("A", "B", "C"):
        registry = registries[disk]
        for name in selected[disk]:
            if registry.resolve(name) is None:
                result.reason = f"{name!r} not in disk {disk} registry"
                return result
    result.valid = True
    return result


def build_reconstruction_prompt(selected_a: list[str], selected_b: list[str],
                                selected_c: list[str]) -> str:
    def dedupe(values: list[str]) -> list[str]:
        out, seen = [], set()
        for v in values:
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out

    a, b, c = dedupe(selected_a), dedupe(selected_b), dedupe(selected_c)
    if not (a and b and c):
        raise ValueError("need at least one element per disk")
    return prompts.fill(
        prompts.RECONSTRUCTION_PROMPT,
        themes=", ".join(a), domains=", ".join(b), methodologies=", ".join(c),
    )


def parse_candidates(response: str) -> list[str]:
    """Numbered-list titles, at most five, bracket/quote wrapping stripped."""
    candidates = []
    for line in response.splitlines():
        line = line.strip()
        if not line or not line[0].isdigit():
            continue
        body = line.lstrip("0123456789").lstrip(".)").strip()
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1].strip()
        body = body.strip("\"'")
        if body:
            candidates.append(body)
        if len(candidates) == MAX_CANDIDATES:
            break
    return candidates


def judge_reconstruction(original_title: str, response: str, paper_id: str = "",
                         threshold: float = DEFAULT_THRESHOLD) -> ReconstructionResult:
    candidates = parse_candidates(response)
    if not candidates:
        return ReconstructionResult(paper_id=paper_id, reason="no parseable candidates")
    original = tokenize(original_title)
    best = max(jaccard(tokenize(c), original) for c in candidates)
    return ReconstructionResult(
        paper_id=paper_id,
        candidates=candidates,
        best_similarity=best,
        reconstructible=best >= threshold,
    )


def coverage_report(corpus: Corpus, registries: dict[tuple[str, int], dict[str, DiskRegistry]],
                    gateway: Gateway, mode: str, threshold: float = DEFAULT_THRESHOLD,
                    max_elements: int = DEFAULT_MAX_ELEMENTS
                    ) -> tuple[list[CoverageReport], list[dict]]:
    """Per-venue coverage percentages plus per-paper detail rows.

    Reconstruction runs only on validly decomposed papers, feeding their
    selected elements forward. Gateway or parse failures count as negative
    outcomes for the affected paper; both percentages are over all papers of
    the venue.
    """
    details: list[dict | None] = [None] * len(corpus.records)
    counts: dict[tuple[str, int], list[int]] = {}

    def work(i: int, paper):
        key = (paper.venue, paper.year)
        venue_regs = registries.get(key)
        detail = {"paper_id": paper.id, "venue": paper.venue, "year": paper.year}
        if venue_regs is None:
            detail["decomposition"] = DecompositionResult(
                paper_id=paper.id, reason=f"no registries for {key}").to_dict()
            details[i] = detail
            return
        try:
            prompt = build_decomposition_prompt(paper.title, venue_regs, max_elements)
            response = gateway.complete(gateway.make_request(prompt), mode)
            decomp = judge_decomposition(response.text, venue_regs, paper_id=paper.id)
        except (GatewayError, ValueError) as exc:
            decomp = DecompositionResult(paper_id=paper.id, reason=str(exc))
        detail["decomposition"] = decomp.to_dict()
        if decomp.valid:
            try:
                prompt = build_reconstruction_prompt(decomp.selected_a, decomp.selected_b,
                                                     decomp.selected_c)
                response = gateway.complete(gateway.make_request(prompt), mode)
                recon = judge_reconstruction(paper.title, response.text,
                                             paper_id=paper.id, threshold=threshold)
            except (GatewayError, ValueError) as exc:
                recon = ReconstructionResult(paper_id=paper.id, reason=str(exc))
            detail["reconstruction"] = recon.to_dict()
        details[i] = detail

    if corpus.records:
        with ThreadPoolExecutor(max_workers=gateway.parallelism) as pool:
            list(pool.map(lambda args: work(*args), enumerate(corpus.records)))

    for paper, detail in zip(corpus.records, details):
        key = (paper.venue, paper.year)
        row = counts.setdefault(key, [0, 0, 0])
        row[0] += 1
        if detail and detail.get("decomposition", {}).get("valid"):
            row[1] += 1
            if detail.get("reconstruction", {}).get("reconstructible"):
                row[2] += 1

    reports = [CoverageReport(venue=v, year=y, papers=c[0], decomposed=c[1], reconstructed=c[2])
               for (v, y), c in sorted(counts.items())]
    return reports, [d for d in details if d is not None]


def reports_to_csv(reports: list[CoverageReport]) -> str:
    lines = ["venue,year,papers,decomposed,decomp_pct,reconstructed,recon_pct"]
    total = [0, 0, 0]
    for r in reports:
        total[0] += r.papers
        total[1] += r.decomposed
        total[2] += r.reconstructed
        lines.append(f"{r.venue},{r.year},{r.papers},{r.decomposed},{r.decomp_pct:.2f},"
                     f"{r.reconstructed},{r.recon_pct:.2f}")
    if total[0]:
        lines.append(f"Overall,,{total[0]},{total[1]},{100.0 * total[1] / total[0]:.2f},"
                     f"{total[2]},{100.0 * total[2] / total[0]:.2f}")
    return "\n".join(lines) + "\n"
