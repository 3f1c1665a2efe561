"""Model client contract and the chat-completions HTTP implementation."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import requests

from ..errors import ModelTransportError

logger = logging.getLogger(__name__)

API_KEY_ENV = "SENSELOOP_API_KEY"
ENDPOINT_ENV = "SENSELOOP_MODEL_ENDPOINT"
MODEL_ENV = "SENSELOOP_MODEL"


@runtime_checkable
class ModelClient(Protocol):
    """complete(prompt) is the only capability callers may rely on."""

    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class ModelConfig:
    endpoint: str = ""
    model: str = "gpt-4o-mini"
    api_key: str = ""
    temperature: float = 0.0
    timeout_s: float = 60.0
    retries: int = 2

    @classmethod
    def from_env(cls, **overrides) -> "ModelConfig":
        base = {
            "endpoint": os.environ.get(ENDPOINT_ENV, ""),
            "model": os.environ.get(MODEL_ENV, cls.model),
            "api_key": os.environ.get(API_KEY_ENV, ""),
        }
        base.update(overrides)
        return cls(**base)


class HttpModelClient:
    """Chat-completions style endpoint: POST {model, temperature, messages}."""

    def __init__(self, config: ModelConfig):
        if not config.endpoint:
            raise ValueError("HttpModelClient needs a non-empty endpoint "
                             f"(set {ENDPOINT_ENV} or the config file)")
        self.config = config
        self.retries = config.retries

    def complete(self, prompt: str) -> str:
        cfg = self.config
        headers = {"Content-Type": "application/json"}
        if cfg.api_key:
            headers["Authorization"] = f"Bearer {cfg.api_key}"
        payload = {
            "model": cfg.model,
            "temperature": cfg.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        # The key travels only in the Authorization header, so the logged
        # request body never contains it.
        logger.debug("model request endpoint=%s auth=%s body=%s",
                     cfg.endpoint, "redacted" if cfg.api_key else "none",
                     payload)
        try:
            response = requests.post(cfg.endpoint, json=payload,
                                     headers=headers, timeout=cfg.timeout_s)
        except requests.RequestException as exc:
            raise ModelTransportError(f"model endpoint unreachable: {exc}") from exc
        if response.status_code != 200:
            raise ModelTransportError(
                f"model endpoint returned HTTP {response.status_code}: "
                f"{response.text[:500]}")
        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ModelTransportError(f"malformed completion response: {exc}") from exc
        logger.debug("model response body=%s", body)
        return content
