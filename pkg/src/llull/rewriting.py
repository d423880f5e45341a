"""Raw idea -> polished candidate title, with provenance kept end to end."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import prompts
from .errors import GatewayError, RewriteError
from .gateway import Gateway, canonical_key
from .machine import RawIdea, parse_template

log = logging.getLogger(__name__)

_QUOTE_CHARS = "\"'“”‘’`"


@dataclass
class IdeaRecord:
    title: str
    raw: RawIdea
    model_name: str
    request_digest: str

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "raw": self.raw.to_dict(),
            "model_name": self.model_name,
            "request_digest": self.request_digest,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IdeaRecord":
        raw = data["raw"]
        idea = RawIdea(template=parse_template(raw["template_source"]),
                       bindings=raw["bindings"], text=raw["text"])
        return cls(title=data["title"], raw=idea, model_name=data["model_name"],
                   request_digest=data["request_digest"])


def build_rewrite_prompt(raw: RawIdea) -> str:
    if not raw.text.strip():
        raise ValueError("raw idea text must be nonempty")
    return prompts.REWRITE_PROMPT + "\n\nThe combination: " + raw.text


def clean_title(response: str) -> str:
    """First nonempty line, stripped of surrounding quotes and markup."""
    for line in response.splitlines():
        line = line.strip()
        if not line:
            continue
        prev = None
        while prev != line:
            prev = line
            line = line.strip(_QUOTE_CHARS + "*#_ \t")
        return line
    return ""


def rewrite(raw: RawIdea, gateway: Gateway, mode: str) -> IdeaRecord:
    request = gateway.make_request(build_rewrite_prompt(raw))
    response = gateway.complete(request, mode)
    title = clean_title(response.text)
    if not title:
        raise RewriteError(f"empty rewrite output for {raw.text!r}")
    return IdeaRecord(title=title, raw=raw, model_name=request.model_name,
                      request_digest=canonical_key(request))


def rewrite_batch(raws: list[RawIdea], gateway: Gateway, mode: str
                  ) -> tuple[list[IdeaRecord], list[dict]]:
    """Order-preserving batch rewrite; per-item failures are isolated."""
    results: list[IdeaRecord | None] = [None] * len(raws)
    failures: list[tuple[int, dict]] = []

    def work(i: int, raw: RawIdea):
        try:
            results[i] = rewrite(raw, gateway, mode)
        except (GatewayError, RewriteError) as exc:
            failures.append((i, {"raw_text": raw.text, "reason": str(exc)}))

    if raws:
        with ThreadPoolExecutor(max_workers=gateway.parallelism) as pool:
            list(pool.map(lambda args: work(*args), enumerate(raws)))

    records = [r for r in results if r is not None]
    ordered = [f for _, f in sorted(failures, key=lambda x: x[0])]
    return records, ordered


def save_records(records: list[IdeaRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")


def load_records(path) -> list[IdeaRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(IdeaRecord.from_dict(json.loads(line)))
    return out


def save_titles(records: list[IdeaRecord], path) -> None:
    """Plain one-title-per-line export for metric tools and external sets."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.title + "\n")
