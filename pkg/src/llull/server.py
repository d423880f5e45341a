"""HTTP API backing the explorer UI: disks, templates, spinning, rewriting,
projections, favorites.

Registry data is immutable shared state; favorites writes are serialized.
Every error response carries a machine-readable body
{"error": {"code", "message"}}.
"""

import json
import random
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import GatewayError, TemplateParseError
from .gateway import Gateway, canonical_key
from .machine import RawIdea, basic_template, instantiate, parse_template
from .registry import DiskRegistry, TemplateRegistry, load_registry_dir, top_k
from .rewriting import build_rewrite_prompt, clean_title


class SpinRequest(BaseModel):
    venue: str
    template_source: str = "basic"
    locks: dict[str, str] = {}
    seed: int | None = None
    wild: bool = False


class RewriteRequest(BaseModel):
    text: str
    template_source: str = "basic"
    bindings: dict[str, str] = {}


class FavoriteRequest(BaseModel):
    session: str = "default"
    record: dict


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


class FavoritesStore:
    """Single JSON document keyed by session label; writes serialized."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def _load(self) -> dict:
        if self.path.exists():
            return json.loads(self.path.read_text(encoding="utf-8"))
        return {"sessions": {}}

    def items(self, session: str) -> list[dict]:
        return self._load()["sessions"].get(session, [])

    def add(self, session: str, record: dict) -> list[dict]:
        with self._lock:
            data = self._load()
            data["sessions"].setdefault(session, []).append(record)
            self.path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n",
                                 encoding="utf-8")
            return data["sessions"][session]


def create_app(registry_dir=None, registries: list[DiskRegistry] | None = None,
               template_registries: list[TemplateRegistry] | None = None,
               gateway: Gateway | None = None, gateway_mode: str = "replay",
               favorites_path="favorites.json", projection_dir=None,
               spin_top_k: int = 20, cors_origins: list[str] | None = None) -> FastAPI:
    if registry_dir is not None:
        registries, template_registries = load_registry_dir(registry_dir)
    registries = registries or []
    template_registries = template_registries or []

    venues: dict[str, dict] = {}
    disks: dict[tuple[str, str], DiskRegistry] = {}
    templates: dict[str, TemplateRegistry] = {}
    for reg in registries:
        key = f"{reg.venue}-{reg.year}"
        venues.setdefault(key, {"key": key, "venue": reg.venue, "year": reg.year})
        disks[(key, reg.disk)] = reg
    for treg in template_registries:
        templates[f"{treg.venue}-{treg.year}"] = treg

    favorites = FavoritesStore(favorites_path)
    app = FastAPI(title="llull explorer API")
    app.add_middleware(CORSMiddleware, allow_origins=cors_origins or ["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(_ApiError)
    async def api_error_handler(request: Request, exc: _ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"error": {"code": exc.code, "message": exc.message}})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": {"code": "invalid_request",
                                               "message": str(exc.errors())}})

    def _venue_disks(key: str) -> dict[str, DiskRegistry]:
        if key not in venues:
            raise _ApiError(400, "unknown_venue", f"unknown venue {key!r}")
        out = {}
        for disk in ("A", "B", "C"):
            reg = disks.get((key, disk))
            if reg is None:
                raise _ApiError(404, "missing_disk", f"no disk {disk} for {key}")
            out[disk] = reg
        return out

    @app.get("/api/venues")
    def get_venues():
        return {"venues": [venues[k] for k in sorted(venues)]}

    @app.get("/api/disks")
    def get_disks(venue: str, disk: str, k: int = 20):
        if disk not in ("A", "B", "C"):
            raise _ApiError(400, "invalid_disk", f"disk must be A, B, or C, got {disk!r}")
        if k < 1:
            raise _ApiError(400, "invalid_k", "k must be >= 1")
        regs = _venue_disks(venue)
        groups = top_k(regs[disk], k)
        return {"venue": venue, "disk": disk,
                "elements": [{"canonical": g.canonical, "visits": g.visits} for g in groups]}

    @app.get("/api/templates")
    def get_templates(venue: str):
        if venue not in venues:
            raise _ApiError(400, "unknown_venue", f"unknown venue {venue!r}")
        treg = templates.get(venue)
        items = treg.templates if treg else []
        return {"venue": venue,
                "templates": [{"source": s, "visits": v} for s, v in items]}

    @app.post("/api/spin")
    def spin(req: SpinRequest):
        regs = _venue_disks(req.venue)
        try:
            template = (basic_template() if req.template_source == "basic"
                        else parse_template(req.template_source))
        except TemplateParseError as exc:
            raise _ApiError(400, "invalid_template", str(exc))
        slot_keys = set(template.slot_keys())
        bindings: dict[str, str] = {}
        for slot_key, name in req.locks.items():
            slot_key = slot_key.upper()
            if slot_key not in slot_keys:
                raise _ApiError(400, "unknown_slot",
                                f"template has no slot {slot_key!r}")
            group = regs[slot_key[0]].resolve(name)
            if group is None:
                raise _ApiError(400, "unknown_element",
                                f"{name!r} not in disk {slot_key[0]} for {req.venue}")
            bindings[slot_key] = group.canonical
        rng = random.Random(req.seed) if req.seed is not None else random.Random()
        for slot in template.slots:
            if slot.key in bindings:
                continue
            reg = regs[slot.disk]
            pool_k = len(reg.groups) if req.wild else min(spin_top_k, len(reg.groups))
            pool = [g.canonical for g in top_k(reg, pool_k)]
            used = {bindings[s.key] for s in template.slots
                    if s.disk == slot.disk and s.key in bindings}
            pool = [c for c in pool if c not in used]
            if not pool:
                raise _ApiError(400, "insufficient_elements",
                                f"no free elements left on disk {slot.disk}")
            bindings[slot.key] = rng.choice(pool)
        try:
            idea = instantiate(template, bindings)
        except ValueError as exc:
            raise _ApiError(400, "invalid_spin", str(exc))
        return idea.to_dict()

    @app.post("/api/rewrite")
    def rewrite_idea(req: RewriteRequest):
        if gateway is None:
            raise _ApiError(502, "gateway_failure", "no gateway configured")
        if not req.text.strip():
            raise _ApiError(400, "invalid_request", "idea text must be nonempty")
        try:
            template = (basic_template() if req.template_source == "basic"
                        else parse_template(req.template_source))
        except TemplateParseError as exc:
            raise _ApiError(400, "invalid_template", str(exc))
        raw = RawIdea(template=template, bindings=req.bindings, text=req.text)
        request = gateway.make_request(build_rewrite_prompt(raw))
        try:
            response = gateway.complete(request, gateway_mode)
        except GatewayError as exc:
            raise _ApiError(502, "gateway_failure", str(exc))
        title = clean_title(response.text)
        if not title:
            raise _ApiError(502, "gateway_failure", "model produced no title")
        return {"title": title, "raw": raw.to_dict(),
                "model_name": request.model_name,
                "request_digest": canonical_key(request)}

    @app.get("/api/projection")
    def get_projection(run: str):
        if projection_dir is None:
            raise _ApiError(404, "missing_projection", "no projection directory configured")
        safe = Path(run).name
        csv_path = Path(projection_dir) / safe / "projection.csv"
        if not csv_path.exists():
            raise _ApiError(404, "missing_projection", f"no projection run {run!r}")
        points = []
        lines = csv_path.read_text(encoding="utf-8").splitlines()
        for line in lines[1:]:
            ref, venue, x, y = line.split(",")
            points.append({"idea_ref": ref, "venue": venue, "x": float(x), "y": float(y)})
        return {"run": run, "points": points}

    @app.get("/api/favorites")
    def get_favorites(session: str = "default"):
        return {"session": session, "favorites": favorites.items(session)}

    @app.post("/api/favorites")
    def post_favorite(req: FavoriteRequest):
        stored = favorites.add(req.session, req.record)
        return {"session": req.session, "favorites": stored}

    return app
