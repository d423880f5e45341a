"""Canonical per-venue disks: merging element drafts into grouped registries.

Merging is two-stage: a deterministic pass collapses exact normalized
duplicates, then a model round regroups semantically similar keywords.
Visit counts are conserved by every merge; the fine-granularity member
variants are kept alongside each group.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import prompts
from ._text import normalize, tokenize
from .errors import GatewayError
from .extraction import ElementDraft
from .gateway import Gateway

log = logging.getLogger(__name__)

DISKS = ("A", "B", "C")
DISK_LABELS = {"A": "theme", "B": "domain", "C": "method"}

DEFAULT_CHUNK_SIZE = 200
DEFAULT_MIN_VISITS = 2  # pooled-registry filter; a guess, surfaced in config


@dataclass
class ElementGroup:
    canonical: str
    members: set[str]
    visits: int
    disk: str

    def to_dict(self) -> dict:
        return {
            "canonical": self.canonical,
            "members": sorted(self.members),
            "visits": self.visits,
        }


@dataclass
class DiskRegistry:
    venue: str
    year: int
    disk: str
    groups: list[ElementGroup] = field(default_factory=list)

    def total_visits(self) -> int:
        return sum(g.visits for g in self.groups)

    def canonicals(self) -> list[str]:
        return [g.canonical for g in self.groups]

    def resolve(self, name: str) -> ElementGroup | None:
        """Find the group whose canonical or member matches, normalized."""
        target = normalize(name)
        for g in self.groups:
            if normalize(g.canonical) == target:
                return g
        for g in self.groups:
            if any(normalize(m) == target for m in g.members):
                return g
        return None


@dataclass
class TemplateRegistry:
    venue: str
    year: int
    templates: list[tuple[str, int]] = field(default_factory=list)  # (source, visits)


def merge_deterministic(drafts: list[ElementDraft], disk: str) -> list[ElementGroup]:
    """Group surfaces by exact normalized equality; visits = total occurrences."""
    if disk not in DISKS:
        raise ValueError(f"unknown disk: {disk!r}")
    groups: dict[str, ElementGroup] = {}
    for draft in drafts:
        for surface in draft.disk(disk):
            key = normalize(surface)
            if not key:
                continue
            g = groups.get(key)
            if g is None:
                groups[key] = ElementGroup(canonical=key, members={surface}, visits=1, disk=disk)
            else:
                g.members.add(surface)
                g.visits += 1
    return [groups[k] for k in sorted(groups)]


def chunk_keywords(keywords: list[str], chunk_size: int = DEFAULT_CHUNK_SIZE) -> list[list[str]]:
    """Deterministic chunking: sorted keywords split into fixed-size runs."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    ordered = sorted(keywords)
    return [ordered[i:i + chunk_size] for i in range(0, len(ordered), chunk_size)]


def build_merge_prompt(disk_label: str, keywords: list[str]) -> str:
    if not keywords:
        raise ValueError("keywords must be nonempty")
    return prompts.fill(prompts.MERGE_PROMPT, domain=disk_label, keywords=", ".join(keywords))


def _first_mapping(text: str) -> dict:
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
    raise ValueError("no JSON mapping in merge response")


def apply_merge_response(groups: list[ElementGroup], response: str) -> list[ElementGroup]:
    """Reassign groups according to a name -> [keywords] mapping.

    Keywords absent from the response stay as they are; a keyword claimed by
    two response groups goes to the first one. Total visits are conserved.
    """
    mapping = _first_mapping(response)
    by_norm = {normalize(g.canonical): g for g in groups}
    consumed: set[str] = set()
    merged: list[ElementGroup] = []

    for name, keywords in mapping.items():
        if not isinstance(keywords, list):
            log.warning("merge response group %r is not a list; skipped", name)
            continue
        name = str(name).strip()
        if not name:
            continue
        sources: list[ElementGroup] = []
        for kw in keywords:
            if not isinstance(kw, str):
                continue
            key = normalize(kw)
            if key in consumed:
                log.warning("keyword %r assigned twice; first assignment wins", kw)
                continue
            g = by_norm.get(key)
            if g is None:
                log.warning("merge response keyword %r matches no group; ignored", kw)
                continue
            consumed.add(key)
            sources.append(g)
        # a group named like an unconsumed existing group absorbs it
        name_key = normalize(name)
        if name_key in by_norm and name_key not in consumed:
            consumed.add(name_key)
            sources.append(by_norm[name_key])
            log.info("merge group name %r absorbed the existing group of the same name", name)
        if not sources:
            continue
        disk = sources[0].disk
        merged.append(ElementGroup(
            canonical=name,
            members=set().union(*(g.members for g in sources)),
            visits=sum(g.visits for g in sources),
            disk=disk,
        ))

    untouched = [g for key, g in by_norm.items() if key not in consumed]
    out = merged + untouched
    out.sort(key=lambda g: normalize(g.canonical))
    return out


def merge_with_model(groups: list[ElementGroup], disk: str, gateway: Gateway, mode: str,
                     chunk_size: int = DEFAULT_CHUNK_SIZE) -> list[ElementGroup]:
    """One model-assisted merge round per keyword chunk, applied sequentially.

    An unparseable response skips that round with a log; the deterministic
    pass output is never lost.
    """
    if not groups:
        return []
    for chunk in chunk_keywords([g.canonical for g in groups], chunk_size):
        prompt = build_merge_prompt(DISK_LABELS.get(disk, disk), chunk)
        request = gateway.make_request(prompt)
        try:
            response = gateway.complete(request, mode)
        except GatewayError as exc:
            log.warning("merge round failed for disk %s: %s", disk, exc)
            continue
        try:
            groups = apply_merge_response(groups, response.text)
        except ValueError as exc:
            log.warning("merge round skipped (unparseable response): %s", exc)
    return groups


def build_registry(drafts: list[ElementDraft], venue: str, year: int, disk: str,
                   gateway: Gateway | None = None, mode: str = "replay",
                   chunk_size: int = DEFAULT_CHUNK_SIZE) -> DiskRegistry:
    """Deterministic pass, then the model merge round when a gateway is given."""
    groups = merge_deterministic(drafts, disk)
    if gateway is not None and groups:
        groups = merge_with_model(groups, disk, gateway, mode, chunk_size)
    return DiskRegistry(venue=venue, year=year, disk=disk, groups=groups)


def build_template_registry(drafts: list[ElementDraft], venue: str, year: int,
                            is_valid=None) -> TemplateRegistry:
    """Count mined template strings; unparseable ones are dropped with a log."""
    counts: dict[str, int] = {}
    for draft in drafts:
        for t in draft.templates:
            t = t.strip()
            if not t:
                continue
            counts[t] = counts.get(t, 0) + 1
    templates: list[tuple[str, int]] = []
    for source in sorted(counts):
        if is_valid is not None and not is_valid(source):
            log.info("template %r dropped: no recognizable slots", source)
            continue
        templates.append((source, counts[source]))
    templates.sort(key=lambda sv: (-sv[1], sv[0]))
    return TemplateRegistry(venue=venue, year=year, templates=templates)


def top_k(registry: DiskRegistry, k: int) -> list[ElementGroup]:
    """Top-visited groups; total order is visits desc then canonical asc."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ordered = sorted(registry.groups, key=lambda g: (-g.visits, g.canonical))
    return ordered[:k]


def disk_jaccard(r1: DiskRegistry, r2: DiskRegistry) -> float:
    """Token-level Jaccard between two registries' canonical vocabularies."""
    if r1.disk != r2.disk:
        raise ValueError(f"disk mismatch: {r1.disk} vs {r2.disk}")
    t1 = {tok for g in r1.groups for tok in tokenize(g.canonical)}
    t2 = {tok for g in r2.groups for tok in tokenize(g.canonical)}
    union = t1 | t2
    if not union:
        return 1.0
    return len(t1 & t2) / len(union)


def pool_registries(registries: list[DiskRegistry], venue: str = "All",
                    year: int = 0) -> DiskRegistry:
    """Exact-normalized union of same-disk registries (no model round)."""
    disks = {r.disk for r in registries}
    if len(disks) != 1:
        raise ValueError("pooled registries must share one disk")
    disk = disks.pop()
    pooled: dict[str, ElementGroup] = {}
    for r in registries:
        for g in r.groups:
            key = normalize(g.canonical)
            cur = pooled.get(key)
            if cur is None:
                pooled[key] = ElementGroup(canonical=g.canonical, members=set(g.members),
                                           visits=g.visits, disk=disk)
            else:
                cur.members |= g.members
                cur.visits += g.visits
    groups = [pooled[k] for k in sorted(pooled)]
    return DiskRegistry(venue=venue, year=year, disk=disk, groups=groups)


def build_all_registry(registries: list[DiskRegistry], gateway: Gateway | None = None,
                       mode: str = "replay", min_visits: int = DEFAULT_MIN_VISITS,
                       chunk_size: int = DEFAULT_CHUNK_SIZE) -> DiskRegistry:
    """Cross-venue union: pool, one model merge round, filter rare groups."""
    pooled = pool_registries(registries)
    groups = pooled.groups
    if gateway is not None and groups:
        groups = merge_with_model(groups, pooled.disk, gateway, mode, chunk_size)
    groups = [g for g in groups if g.visits >= min_visits]
    return DiskRegistry(venue="All", year=0, disk=pooled.disk, groups=groups)


def registry_stats(registries: list[DiskRegistry],
                   template_registries: list[TemplateRegistry],
                   paper_counts: dict[tuple[str, int], int] | None = None) -> list[dict]:
    """Per-(venue, year) counts of papers, A/B/C groups, and templates."""
    keys = {(r.venue, r.year) for r in registries}
    keys |= {(t.venue, t.year) for t in template_registries}
    by_disk = {(r.venue, r.year, r.disk): len(r.groups) for r in registries}
    by_templ = {(t.venue, t.year): len(t.templates) for t in template_registries}
    rows = []
    for venue, year in sorted(keys):
        rows.append({
            "venue": venue,
            "year": year,
            "papers": (paper_counts or {}).get((venue, year), 0),
            "themes": by_disk.get((venue, year, "A"), 0),
            "domains": by_disk.get((venue, year, "B"), 0),
            "methods": by_disk.get((venue, year, "C"), 0),
            "templates": by_templ.get((venue, year), 0),
        })
    return rows


def stats_to_csv(rows: list[dict]) -> str:
    header = "venue,year,papers,themes,domains,methods,templates"
    lines = [header]
    for r in rows:
        lines.append(f"{r['venue']},{r['year']},{r['papers']},{r['themes']},"
                     f"{r['domains']},{r['methods']},{r['templates']}")
    return "\n".join(lines) + "\n"


# -- persistence ------------------------------------------------------------

def _slug(venue: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in venue)


def registry_filename(venue: str, year: int, disk: str) -> str:
    return f"{_slug(venue)}_{year}_{disk}.json"


def registry_to_dict(registry: DiskRegistry) -> dict:
    return {
        "venue": registry.venue,
        "year": registry.year,
        "disk": registry.disk,
        "groups": [g.to_dict() for g in sorted(registry.groups,
                                               key=lambda g: normalize(g.canonical))],
    }


def registry_from_dict(data: dict) -> DiskRegistry:
    groups = [ElementGroup(canonical=g["canonical"], members=set(g["members"]),
                           visits=g["visits"], disk=data["disk"])
              for g in data["groups"]]
    return DiskRegistry(venue=data["venue"], year=data["year"], disk=data["disk"],
                        groups=groups)


def save_registry(registry: DiskRegistry, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / registry_filename(registry.venue, registry.year, registry.disk)
    path.write_text(json.dumps(registry_to_dict(registry), indent=2,
                               sort_keys=True, ensure_ascii=False) + "\n",
                    encoding="utf-8")
    return path


def load_registry(path) -> DiskRegistry:
    return registry_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_template_registry(registry: TemplateRegistry, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{_slug(registry.venue)}_{registry.year}_T.json"
    payload = {
        "venue": registry.venue,
        "year": registry.year,
        "templates": [{"source": s, "visits": v} for s, v in registry.templates],
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                    encoding="utf-8")
    return path


def load_template_registry(path) -> TemplateRegistry:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return TemplateRegistry(venue=data["venue"], year=data["year"],
                            templates=[(t["source"], t["visits"]) for t in data["templates"]])


def load_registry_dir(directory) -> tuple[list[DiskRegistry], list[TemplateRegistry]]:
    """Load every registry document in a directory, sorted by filename."""
    disks: list[DiskRegistry] = []
    templates: list[TemplateRegistry] = []
    for path in sorted(Path(directory).glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        if "groups" in data:
            disks.append(registry_from_dict(data))
        elif "templates" in data:
            templates.append(TemplateRegistry(
                venue=data["venue"], year=data["year"],
                templates=[(t["source"], t["visits"]) for t in data["templates"]]))
    return disks, templates
