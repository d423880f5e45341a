"""Per-paper element extraction: prompt building, response parsing, exclusivity.

Each paper's (title, abstract) goes through the extraction prompt; the model
answers with an annotation object {"A": [...], "B": [...], "C": [...],
"Template": [...]}. Parsing tolerates surrounding prose and code fences.
After validation no string may sit on more than one disk.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import prompts
from ._text import normalize
from .corpus import Corpus, PaperRecord
from .errors import ExtractionParseError, GatewayError
from .gateway import Gateway

log = logging.getLogger(__name__)

DISK_KEYS = ("A", "B", "C", "Template")


@dataclass
class ElementDraft:
    paper_id: str
    themes: list[str] = field(default_factory=list)      # disk A
    domains: list[str] = field(default_factory=list)     # disk B
    methods: list[str] = field(default_factory=list)     # disk C
    templates: list[str] = field(default_factory=list)   # mined title patterns
    removed: list[dict] = field(default_factory=list)    # exclusivity removals

    def disk(self, label: str) -> list[str]:
        return {"A": self.themes, "B": self.domains, "C": self.methods}[label]

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "A": self.themes,
            "B": self.domains,
            "C": self.methods,
            "Template": self.templates,
            "removed_duplicates": self.removed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ElementDraft":
        return cls(
            paper_id=data["paper_id"],
            themes=list(data.get("A", [])),
            domains=list(data.get("B", [])),
            methods=list(data.get("C", [])),
            templates=list(data.get("Template", [])),
            removed=list(data.get("removed_duplicates", [])),
        )


def build_extraction_prompt(paper: PaperRecord) -> str:
    if not paper.title.strip():
        raise ValueError("paper title must be nonempty")
    return prompts.fill(prompts.EXTRACTION_PROMPT, title=paper.title, abstract=paper.abstract)


def _clean_list(values) -> list[str]:
    """Trim, drop empties, and collapse exact repeats while keeping order."""
    out: list[str] = []
    seen: set[str] = set()
    if isinstance(values, str):
        values = [values]
    for v in values:
        if not isinstance(v, str):
            continue
        v = v.strip()
        if v and v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _first_annotation_object(text: str) -> dict:
    decoder = json.JSONDecoder()
    idx = text.find("{")
    while idx != -1:
        try:
            obj, _ = decoder.raw_decode(text, idx)
        except json.JSONDecodeError:
            idx = text.find("{", idx + 1)
            continue
        if isinstance(obj, dict) and all(k in obj for k in DISK_KEYS):
            return obj
        idx = text.find("{", idx + 1)
    raise ExtractionParseError("no annotation object found in response")


def parse_extraction(response: str, paper_id: str = "") -> ElementDraft:
    """Pull the first well-formed annotation object out of a model response.

    Surface forms are preserved (trimming only); exact repeats within one list
    are collapsed. Raises ExtractionParseError when no object with all of
    A/B/C/Template can be decoded.
    """
    obj = _first_annotation_object(response)
    missing = [k for k in DISK_KEYS if k not in obj]
    if missing:
        raise ExtractionParseError(f"annotation missing keys: {missing}")
    return ElementDraft(
        paper_id=paper_id,
        themes=_clean_list(obj["A"]),
        domains=_clean_list(obj["B"]),
        methods=_clean_list(obj["C"]),
        templates=_clean_list(obj["Template"]),
    )


def validate_exclusivity(draft: ElementDraft) -> ElementDraft:
    """Resolve cross-disk duplicates with precedence C > B > A.

    A normalized string appearing on several disks is kept on the highest
    precedence disk only; each removal is recorded on the draft.
    """
    norm_c = {normalize(s) for s in draft.methods}
    removed = list(draft.removed)

    domains: list[str] = []
    for s in draft.domains:
        if normalize(s) in norm_c:
            removed.append({"surface": s, "removed_from": "B", "kept_in": "C"})
        else:
            domains.append(s)
    norm_b = {normalize(s) for s in domains}

    themes: list[str] = []
    for s in draft.themes:
        n = normalize(s)
        if n in norm_c:
            removed.append({"surface": s, "removed_from": "A", "kept_in": "C"})
        elif n in norm_b:
            removed.append({"surface": s, "removed_from": "A", "kept_in": "B"})
        else:
            themes.append(s)

    return ElementDraft(
        paper_id=draft.paper_id,
        themes=themes,
        domains=domains,
        methods=list(draft.methods),
        templates=list(draft.templates),
        removed=removed,
    )


def extract_corpus(corpus: Corpus, gateway: Gateway, mode: str
                   ) -> tuple[list[ElementDraft], list[dict]]:
    """Extract every paper; per-paper failures never abort the batch.

    Returns (drafts, failures); drafts follow corpus order, failures are
    {paper_id, stage, reason} dicts. In replay mode the result is a pure
    function of (corpus, cache).
    """
    results: list[ElementDraft | None] = [None] * len(corpus.records)
    failures: list[tuple[int, dict]] = []

    def work(i: int, paper: PaperRecord):
        request = gateway.make_request(build_extraction_prompt(paper))
        try:
            response = gateway.complete(request, mode)
        except GatewayError as exc:
            failures.append((i, {"paper_id": paper.id, "stage": "gateway", "reason": str(exc)}))
            return
        try:
            draft = parse_extraction(response.text, paper_id=paper.id)
        except ExtractionParseError as exc:
            failures.append((i, {"paper_id": paper.id, "stage": "parse", "reason": str(exc)}))
            return
        results[i] = validate_exclusivity(draft)

    if corpus.records:
        with ThreadPoolExecutor(max_workers=gateway.parallelism) as pool:
            list(pool.map(lambda args: work(*args), enumerate(corpus.records)))

    drafts = [d for d in results if d is not None]
    ordered_failures = [f for _, f in sorted(failures, key=lambda x: x[0])]
    return drafts, ordered_failures


def save_drafts(drafts: list[ElementDraft], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in drafts:
            fh.write(json.dumps(d.to_dict(), ensure_ascii=False) + "\n")


def load_drafts(path) -> list[ElementDraft]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(ElementDraft.from_dict(json.loads(line)))
    return out


def save_failures(failures: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for f in failures:
            fh.write(json.dumps(f, ensure_ascii=False) + "\n")
