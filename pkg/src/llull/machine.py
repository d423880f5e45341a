"""The combinatorial core: slotted templates spun over the three disks.

A template is a title pattern with typed slots (markers like A1, B1, C2 on
word boundaries). Raw ideas come out of two regimes: exhaustive enumeration
of the top-visited elements, or seeded random sampling where no element is
reused across the batch.
"""

import json
import random
import re
from dataclasses import dataclass, field

from .errors import InsufficientElementsError, TemplateParseError
from .registry import DiskRegistry, top_k

SLOT_RE = re.compile(r"\b([ABCabc])([0-9]+)\b")

BASIC_TEMPLATE_SOURCE = "A1, B1, C1"


@dataclass(frozen=True)
class Slot:
    disk: str   # "A" | "B" | "C"
    index: int

    @property
    def key(self) -> str:
        return f"{self.disk}{self.index}"


@dataclass(frozen=True)
class Template:
    source: str
    slots: tuple[Slot, ...]            # unique, in order of first appearance

    @property
    def arity(self) -> dict[str, int]:
        counts = {"A": 0, "B": 0, "C": 0}
        for slot in self.slots:
            counts[slot.disk] += 1
        return counts

    def slot_keys(self) -> list[str]:
        return [s.key for s in self.slots]


@dataclass(frozen=True)
class RawIdea:
    template: Template
    bindings: dict  # slot key -> element canonical
    text: str

    def to_dict(self) -> dict:
        return {"text": self.text, "template_source": self.template.source,
                "bindings": dict(self.bindings)}


def parse_template(source: str) -> Template:
    """Parse slot markers out of a mined template string.

    Markers are letter+digits on word boundaries, case-insensitive; repeated
    markers count once. A string with zero slots is rejected.
    """
    if not source or not source.strip():
        raise TemplateParseError("empty template string")
    slots: list[Slot] = []
    seen: set[str] = set()
    for match in SLOT_RE.finditer(source):
        slot = Slot(disk=match.group(1).upper(), index=int(match.group(2)))
        if slot.key not in seen:
            seen.add(slot.key)
            slots.append(slot)
    if not slots:
        raise TemplateParseError(f"no recognizable slots in {source!r}")
    return Template(source=source, slots=tuple(slots))


def is_parseable(source: str) -> bool:
    try:
        parse_template(source)
        return True
    except TemplateParseError:
        return False


def basic_template() -> Template:
    """The plain three-element pattern, rendered comma-joined."""
    return parse_template(BASIC_TEMPLATE_SOURCE)


def render(template: Template, bindings: dict) -> str:
    """Substitute canonicals for markers, then collapse whitespace."""
    def repl(match: re.Match) -> str:
        key = f"{match.group(1).upper()}{match.group(2)}"
        return bindings[key]

    return " ".join(SLOT_RE.sub(repl, template.source).split())


def instantiate(template: Template, bindings: dict) -> RawIdea:
    """Bind every slot and render; same-disk slots must bind distinct elements."""
    missing = [k for k in template.slot_keys() if k not in bindings]
    if missing:
        raise ValueError(f"missing bindings for slots: {missing}")
    per_disk: dict[str, list[str]] = {}
    for slot in template.slots:
        per_disk.setdefault(slot.disk, []).append(bindings[slot.key])
    for disk, values in per_disk.items():
        if len(set(values)) != len(values):
            raise ValueError(f"duplicate element across distinct {disk} slots")
    chosen = {k: bindings[k] for k in template.slot_keys()}
    return RawIdea(template=template, bindings=chosen, text=render(template, chosen))


def _pools(registries: dict[str, DiskRegistry], template: Template, k: int) -> dict[str, list[str]]:
    pools: dict[str, list[str]] = {}
    for disk, arity in template.arity.items():
        if arity == 0:
            continue
        reg = registries.get(disk)
        if reg is None:
            raise InsufficientElementsError(f"no registry for disk {disk}")
        if len(reg.groups) < max(k, arity):
            raise InsufficientElementsError(
                f"disk {disk} has {len(reg.groups)} groups; need >= {max(k, arity)}")
        if k < arity:
            raise InsufficientElementsError(
                f"top-{k} pool cannot fill {arity} distinct {disk} slots")
        pools[disk] = [g.canonical for g in top_k(reg, k)]
    return pools


def enumerate_top(registries: dict[str, DiskRegistry], k: int, template: Template):
    """Cartesian product of per-slot top-k pools, same-disk distinctness applied.

    Yields RawIdea in lexicographic order over (slot order, top-k rank); for a
    1/1/1 template this is exactly k**3 ideas.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pools = _pools(registries, template, k)
    slots = list(template.slots)

    def walk(i: int, chosen: dict):
        if i == len(slots):
            yield instantiate(template, chosen)
            return
        slot = slots[i]
        used = {chosen[s.key] for s in slots[:i] if s.disk == slot.disk}
        for canonical in pools[slot.disk]:
            if canonical in used:
                continue
            chosen[slot.key] = canonical
            yield from walk(i + 1, chosen)
            del chosen[slot.key]

    yield from walk(0, {})


def sample_random(registries: dict[str, DiskRegistry], template: Template, n: int,
                  seed: int, reuse: str = "batch") -> list[RawIdea]:
    """Seeded uniform sampling without element reuse.

    reuse="batch" (default): a disk element appears in at most one idea of the
    whole batch. reuse="idea": the weaker per-idea reading, elements may recur
    across ideas. Population order is the top-k total order, so batches are
    reproducible per (registries, template, n, seed).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if reuse not in ("batch", "idea"):
        raise ValueError("reuse must be 'batch' or 'idea'")
    rng = random.Random(seed)
    arity = template.arity
    populations: dict[str, list[str]] = {}
    for disk, a in arity.items():
        if a == 0:
            continue
        reg = registries.get(disk)
        if reg is None or not reg.groups:
            raise InsufficientElementsError(f"no elements for disk {disk}")
        populations[disk] = [g.canonical for g in top_k(reg, len(reg.groups))]
        need = n * a if reuse == "batch" else a
        if len(populations[disk]) < need:
            raise InsufficientElementsError(
                f"disk {disk} has {len(populations[disk])} elements; need >= {need}")

    slots_by_disk: dict[str, list[Slot]] = {}
    for slot in template.slots:
        slots_by_disk.setdefault(slot.disk, []).append(slot)

    ideas: list[RawIdea] = []
    if reuse == "batch":
        draws = {disk: rng.sample(pop, n * arity[disk]) for disk, pop in populations.items()}
        for i in range(n):
            bindings: dict[str, str] = {}
            for disk, slots in slots_by_disk.items():
                a = arity[disk]
                picks = draws[disk][i * a:(i + 1) * a]
                for slot, canonical in zip(slots, picks):
                    bindings[slot.key] = canonical
            ideas.append(instantiate(template, bindings))
    else:
        for _ in range(n):
            bindings = {}
            for disk, slots in slots_by_disk.items():
                picks = rng.sample(populations[disk], arity[disk])
                for slot, canonical in zip(slots, picks):
                    bindings[slot.key] = canonical
            ideas.append(instantiate(template, bindings))
    return ideas


def subsample(ideas: list[RawIdea], n: int, seed: int) -> list[RawIdea]:
    """Uniform order-preserving subsample (figure-replication helper)."""
    if n > len(ideas):
        raise ValueError(f"n={n} exceeds {len(ideas)} ideas")
    rng = random.Random(seed)
    picked = sorted(rng.sample(range(len(ideas)), n))
    return [ideas[i] for i in picked]


def save_ideas(ideas: list[RawIdea], path, venue: str = "", sampling: dict | None = None) -> None:
    """Raw-idea JSONL dump with provenance."""
    with open(path, "w", encoding="utf-8") as fh:
        for idea in ideas:
            row = idea.to_dict()
            row["venue"] = venue
            row["sampling"] = sampling or {}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_ideas(path) -> list[RawIdea]:
    ideas = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            template = parse_template(row["template_source"])
            ideas.append(RawIdea(template=template, bindings=row["bindings"], text=row["text"]))
    return ideas
