"""Run configuration: provider settings, gateway mode, paths, knob defaults.

Credentials never live in code or config values; the config names the
environment variable holding the API key.
"""

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError
from .gateway import (DEFAULT_MAX_OUTPUT_TOKENS, DEFAULT_TEMPERATURE, DEFAULT_TOP_K,
                      DEFAULT_TOP_P, Gateway, HttpProvider, MODES, ResponseCache)


@dataclass
class RunConfig:
    endpoint: str = ""
    model_name: str = "default"
    api_key_env: str = "LLULL_API_KEY"
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P
    top_k: int = DEFAULT_TOP_K
    parallelism: int = 4
    max_retries: int = 3
    backoff_seconds: float = 1.0
    gateway_mode: str = "replay"
    cache_dir: str = "cache"
    spin_top_k: int = 20
    coverage_threshold: float = 0.30
    all_min_visits: int = 2  # pooled-registry filter; unverified guess, keep visible
    similarity_aggregate: str = "max"
    merge_chunk_size: int = 200

    def validate(self) -> "RunConfig":
        if self.gateway_mode not in MODES:
            raise ConfigError(f"gateway_mode must be one of {MODES}")
        if not 0.0 <= self.temperature <= 1.0 or not 0.0 <= self.top_p <= 1.0:
            raise ConfigError("temperature and top_p must be in [0, 1]")
        if self.top_k < 1 or self.parallelism < 1 or self.max_retries < 1:
            raise ConfigError("top_k, parallelism, and max_retries must be >= 1")
        if not 0.0 <= self.coverage_threshold <= 1.0:
            raise ConfigError("coverage_threshold must be in [0, 1]")
        if self.similarity_aggregate not in ("max", "mean"):
            raise ConfigError("similarity_aggregate must be 'max' or 'mean'")
        if self.merge_chunk_size < 1 or self.spin_top_k < 1:
            raise ConfigError("merge_chunk_size and spin_top_k must be >= 1")
        return self


def load_config(path=None) -> RunConfig:
    if path is None:
        return RunConfig().validate()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**data).validate()


def build_gateway(config: RunConfig, cache_dir=None, transport=None) -> Gateway:
    api_key = os.environ.get(config.api_key_env, "")
    provider = None
    if config.endpoint or transport is not None:
        provider = HttpProvider(endpoint=config.endpoint, api_key=api_key,
                                model_name=config.model_name, transport=transport)
    cache = ResponseCache(cache_dir or config.cache_dir)
    return Gateway(
        provider=provider,
        cache=cache,
        parallelism=config.parallelism,
        max_retries=config.max_retries,
        backoff_seconds=config.backoff_seconds,
        model_name=config.model_name,
        max_output_tokens=config.max_output_tokens,
        temperature=config.temperature,
        top_p=config.top_p,
        top_k=config.top_k,
    )
