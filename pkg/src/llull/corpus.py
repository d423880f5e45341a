"""Paper corpus ingestion, validation, sampling, and persistence.

A corpus is an ordered, immutable list of paper records loaded from JSONL
(one object per line) or CSV with header ``id,title,abstract,venue,year``.
Invalid rows are never dropped silently; they come back as a rejects report.
"""

import csv
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IngestError

YEAR_MIN = 1950
YEAR_MAX = 2100

FIELDS = ("id", "title", "abstract", "venue", "year")


@dataclass(frozen=True)
class PaperRecord:
    id: str
    title: str
    abstract: str
    venue: str
    year: int


@dataclass
class Reject:
    line_number: int
    reason: str

    def to_dict(self) -> dict:
        return {"line_number": self.line_number, "reason": self.reason}


@dataclass
class Corpus:
    records: list[PaperRecord] = field(default_factory=list)
    source: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def ids(self) -> list[str]:
        return [r.id for r in self.records]


def _validate_row(row: dict, line_number: int, seen_ids: set) -> PaperRecord | Reject:
    rid = str(row.get("id") or "").strip()
    if not rid:
        return Reject(line_number, "empty id")
    if rid in seen_ids:
        return Reject(line_number, "duplicate id")
    title = str(row.get("title") or "").strip()
    if not title:
        return Reject(line_number, "empty title")
    raw_year = row.get("year")
    try:
        year = int(raw_year)
    except (TypeError, ValueError):
        return Reject(line_number, "invalid year")
    if not YEAR_MIN <= year <= YEAR_MAX:
        return Reject(line_number, f"year out of range [{YEAR_MIN}, {YEAR_MAX}]")
    abstract = str(row.get("abstract") or "").strip()
    venue = str(row.get("venue") or "").strip()
    return PaperRecord(id=rid, title=title, abstract=abstract, venue=venue, year=year)


def ingest(source, format: str = "jsonl") -> tuple[Corpus, list[Reject]]:
    """Load a corpus from a path, file object, or literal string.

    Returns (corpus, rejects). Raises IngestError if the source is unreadable,
    the format is unknown, or no row survives validation.
    """
    if format not in ("jsonl", "csv"):
        raise IngestError(f"unknown format: {format!r}")
    label = ""
    looks_like_path = (isinstance(source, Path)
                       or (isinstance(source, str) and "\n" not in source
                           and not source.lstrip().startswith(("{", "id,"))))
    if looks_like_path:
        label = str(source)
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"unreadable source: {exc}") from exc
    elif hasattr(source, "read"):
        text = source.read()
        label = getattr(source, "name", "<stream>")
    else:
        text = str(source)
        label = "<inline>"

    records: list[PaperRecord] = []
    rejects: list[Reject] = []
    seen: set[str] = set()

    if format == "jsonl":
        for line_number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                rejects.append(Reject(line_number, "invalid json"))
                continue
            if not isinstance(row, dict):
                rejects.append(Reject(line_number, "row is not an object"))
                continue
            out = _validate_row(row, line_number, seen)
            if isinstance(out, Reject):
                rejects.append(out)
            else:
                seen.add(out.id)
                records.append(out)
    else:
        reader = csv.DictReader(io.StringIO(text))
        header = set(reader.fieldnames or ())
        missing = set(FIELDS) - header
        if missing:
            raise IngestError(f"csv header missing fields: {sorted(missing)}")
        for row in reader:
            out = _validate_row(row, reader.line_num, seen)
            if isinstance(out, Reject):
                rejects.append(out)
            else:
                seen.add(out.id)
                records.append(out)

    if not records:
        raise IngestError("zero valid rows")
    return Corpus(records=records, source=label), rejects


def to_jsonl(corpus: Corpus) -> str:
    """Serialize for round-trip persistence; ingest(to_jsonl(c)) reproduces c."""
    lines = []
    for r in corpus.records:
        lines.append(json.dumps(
            {"id": r.id, "title": r.title, "abstract": r.abstract,
             "venue": r.venue, "year": r.year},
            ensure_ascii=False))
    return "\n".join(lines) + "\n"


def save(corpus: Corpus, path) -> None:
    Path(path).write_text(to_jsonl(corpus), encoding="utf-8")


def write_rejects(rejects: list[Reject], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rej in rejects:
            fh.write(json.dumps(rej.to_dict()) + "\n")


def sample(corpus: Corpus, n: int, seed: int) -> Corpus:
    """Uniform sample without replacement, deterministic per seed.

    Uses CPython's Mersenne Twister via random.Random(seed). Relative input
    order is preserved.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if n > len(corpus.records):
        raise ValueError(f"n={n} exceeds corpus size {len(corpus.records)}")
    rng = random.Random(seed)
    picked = sorted(rng.sample(range(len(corpus.records)), n))
    return Corpus(records=[corpus.records[i] for i in picked],
                  source=f"{corpus.source}#sample(n={n},seed={seed})")


def filter_records(corpus: Corpus, venue: str | None = None,
                   year: int | None = None) -> Corpus:
    """Records matching all supplied predicates, order preserved."""
    out = [r for r in corpus.records
           if (venue is None or r.venue == venue)
           and (year is None or r.year == year)]
    return Corpus(records=out, source=corpus.source)
