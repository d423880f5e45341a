"""Provider-agnostic chat-completion access with a record/replay cache.

Three modes:
  live    - call the provider, nothing cached
  record  - serve from the cache when possible, otherwise call and cache
  replay  - cache only; a miss is an error and no network is ever touched

The cache is content-addressed: key = sha256 of the canonicalized request,
stored as one UTF-8 response file per entry plus an ``index`` JSONL file.
With a fixed cache, every downstream pipeline run in replay mode is
bit-deterministic.
"""

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import CacheMissError, GatewayError, MalformedPayloadError, ProviderError

log = logging.getLogger(__name__)

MODES = ("live", "record", "replay")

# Decoding defaults reused by every pipeline stage; overridable per run.
DEFAULT_MAX_OUTPUT_TOKENS = 8192
DEFAULT_TEMPERATURE = 0.7
DEFAULT_TOP_P = 0.7
DEFAULT_TOP_K = 50


@dataclass(frozen=True)
class ModelRequest:
    prompt: str
    model_name: str = "default"
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P
    top_k: int = DEFAULT_TOP_K

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be nonempty")
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError("temperature must be in [0, 1]")
        if not 0.0 <= self.top_p <= 1.0:
            raise ValueError("top_p must be in [0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


@dataclass(frozen=True)
class ModelResponse:
    text: str
    cached: bool
    latency: float


def canonical_key(request: ModelRequest) -> str:
    """Stable digest of a request; insensitive to field ordering."""
    payload = json.dumps(
        {
            "model_name": request.model_name,
            "prompt": request.prompt,
            "max_output_tokens": request.max_output_tokens,
            "temperature": request.temperature,
            "top_p": request.top_p,
            "top_k": request.top_k,
        },
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    """Directory-backed cache: ``index`` (JSONL key -> filename) + response files.

    Entries are immutable once written; writes are serialized through a lock.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._index_path = self.directory / "index"
        self._index: dict[str, str] = {}
        self._lock = threading.Lock()
        if self._index_path.exists():
            for line in self._index_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                entry = json.loads(line)
                self._index[entry["key"]] = entry["file"]

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return len(self._index)

    def get(self, key: str) -> str | None:
        name = self._index.get(key)
        if name is None:
            return None
        return (self.directory / name).read_text(encoding="utf-8")

    def put(self, key: str, text: str) -> None:
        with self._lock:
            if key in self._index:
                return  # entries are immutable
            name = key + ".txt"
            (self.directory / name).write_text(text, encoding="utf-8")
            entry = {"key": key, "file": name, "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
            with open(self._index_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry) + "\n")
            self._index[key] = name


class HttpProvider:
    """Generic chat-completion HTTP adapter (OpenAI-style wire contract).

    Provider choice, endpoint, and credentials come from configuration; the
    ``transport`` hook (payload dict -> parsed response dict) exists for tests.
    """

    def __init__(self, endpoint: str, api_key: str = "", model_name: str = "default",
                 timeout: float = 120.0, transport=None):
        self.endpoint = endpoint
        self.api_key = api_key
        self.model_name = model_name
        self.timeout = timeout
        self._transport = transport

    def complete(self, request: ModelRequest) -> str:
        payload = {
            "model": request.model_name,
            "messages": [{"role": "user", "content": request.prompt}],
            "max_tokens": request.max_output_tokens,
            "temperature": request.temperature,
            "top_p": request.top_p,
            "top_k": request.top_k,
        }
        if self._transport is not None:
            data = self._transport(payload)
        else:
            import httpx

            headers = {"Content-Type": "application/json"}
            if self.api_key:
                headers["Authorization"] = f"Bearer {self.api_key}"
            try:
                resp = httpx.post(self.endpoint, json=payload, headers=headers,
                                  timeout=self.timeout)
                resp.raise_for_status()
                data = resp.json()
            except httpx.HTTPError as exc:
                raise ProviderError(f"provider call failed: {exc}") from exc
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedPayloadError(f"cannot find completion in payload: {exc}") from exc
        if not isinstance(text, str):
            raise MalformedPayloadError("completion is not text")
        return text


class Gateway:
    """complete() front end with retries, a parallelism bound, and the cache.

    Safe for concurrent callers: provider calls are gated by a semaphore and
    cache writes are serialized inside ResponseCache.
    """

    def __init__(self, provider=None, cache: ResponseCache | None = None,
                 parallelism: int = 4, max_retries: int = 3,
                 backoff_seconds: float = 1.0, sleep=time.sleep,
                 model_name: str | None = None,
                 max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS,
                 temperature: float = DEFAULT_TEMPERATURE,
                 top_p: float = DEFAULT_TOP_P,
                 top_k: int = DEFAULT_TOP_K):
        if parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        self.provider = provider
        self.cache = cache
        self.parallelism = parallelism
        self.max_retries = max_retries
        self.backoff_seconds = backoff_seconds
        self._sleep = sleep
        self._sem = threading.BoundedSemaphore(parallelism)
        self.model_name = model_name or getattr(provider, "model_name", None) or "default"
        self.decoding = {
            "max_output_tokens": max_output_tokens,
            "temperature": temperature,
            "top_p": top_p,
            "top_k": top_k,
        }

    def make_request(self, prompt: str, **overrides) -> ModelRequest:
        """Request with the gateway's configured model and decoding params."""
        params = {"model_name": self.model_name, **self.decoding, **overrides}
        return ModelRequest(prompt=prompt, **params)

    def _call_provider(self, request: ModelRequest) -> str:
        if self.provider is None:
            raise ProviderError("no provider configured")
        last: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                with self._sem:
                    return self.provider.complete(request)
            except MalformedPayloadError:
                raise
            except Exception as exc:  # transport-level failures are retryable
                last = exc
                if attempt < self.max_retries - 1:
                    self._sleep(self.backoff_seconds * (2 ** attempt))
        raise ProviderError(f"provider failed after {self.max_retries} attempts: {last}") from last

    def complete(self, request: ModelRequest, mode: str) -> ModelResponse:
        if mode not in MODES:
            raise ValueError(f"unknown mode: {mode!r}")
        start = time.perf_counter()
        key = canonical_key(request)

        if mode == "replay":
            if self.cache is None:
                raise CacheMissError("replay mode requires a cache")
            text = self.cache.get(key)
            if text is None:
                raise CacheMissError(f"no cached response for key {key}")
            return ModelResponse(text=text, cached=True, latency=time.perf_counter() - start)

        if mode == "record":
            if self.cache is None:
                raise GatewayError("record mode requires a cache")
            text = self.cache.get(key)
            if text is not None:
                # cache-first so large corpus runs are resumable
                return ModelResponse(text=text, cached=True, latency=time.perf_counter() - start)
            text = self._call_provider(request)
            self.cache.put(key, text)
            return ModelResponse(text=text, cached=False, latency=time.perf_counter() - start)

        text = self._call_provider(request)
        return ModelResponse(text=text, cached=False, latency=time.perf_counter() - start)
