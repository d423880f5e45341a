"""Human-written starter disks, usable before any corpus has been mined."""

import json
from importlib import resources

from ._text import normalize
from .registry import DiskRegistry, ElementGroup


def seed_communities() -> dict:
    """Raw seed element lists keyed by community label."""
    data = resources.files("llull.data").joinpath("seed_elements.json")
    return json.loads(data.read_text(encoding="utf-8"))


def seed_registries(community: str, year: int = 0) -> dict[str, DiskRegistry]:
    """Seed disks as registries (visits 1 each) for the given community."""
    communities = seed_communities()
    if community not in communities:
        raise KeyError(f"unknown community {community!r}; have {sorted(communities)}")
    out: dict[str, DiskRegistry] = {}
    for disk, surfaces in communities[community].items():
        groups = [ElementGroup(canonical=normalize(s), members={s}, visits=1, disk=disk)
                  for s in surfaces]
        groups.sort(key=lambda g: g.canonical)
        out[disk] = DiskRegistry(venue=community, year=year, disk=disk, groups=groups)
    return out
