"""Streaming chat-completions client for one request."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import httpx


@dataclass
class RequestLog:
    """Raw observations for one dispatched request, run-clock timestamps."""

    request_id: str
    prompt: str
    arrival: float
    first_chunk_at: float | None = None
    last_chunk_at: float | None = None
    chunks: int = 0
    usage_tokens: int | None = None
    text: str = ""
    failed: bool = False
    parts: list = field(default_factory=list, repr=False)

    @property
    def output_tokens(self) -> int:
        # server-reported totals win over chunk counting
        if self.usage_tokens is not None:
            return self.usage_tokens
        return self.chunks


def _note_chunk(log: RequestLog, payload: dict, now: float) -> None:
    choices = payload.get("choices") or []
    delta = (choices[0].get("delta") or {}) if choices else {}
    content = delta.get("content")
    if content:
        if log.first_chunk_at is None:
            log.first_chunk_at = now
        log.last_chunk_at = now
        log.chunks += 1
        log.parts.append(content)
    usage = payload.get("usage") or {}
    if isinstance(usage.get("completion_tokens"), int):
        log.usage_tokens = usage["completion_tokens"]


async def stream_one(client: httpx.AsyncClient, endpoint: str, model: str,
                     prompt: str, request_id: str, arrival: float, clock,
                     timeout_s: float) -> RequestLog:
    """Send one streaming completion and timestamp its chunks.

    Any transport error, bad status, or timeout marks the record failed;
    observations collected up to that point are kept.
    """
    log = RequestLog(request_id=request_id, prompt=prompt, arrival=arrival)
    body = {
        "model": model,
        "messages": [{"role": "user", "content": prompt}],
        "stream": True,
    }
    try:
        async with client.stream("POST", endpoint, json=body,
                                 timeout=timeout_s) as response:
            if response.status_code != 200:
                log.failed = True
                return log
            async for line in response.aiter_lines():
                if not line.startswith("data:"):
                    continue
                payload = line[len("data:"):].strip()
                if payload == "[DONE]":
                    break
                try:
                    _note_chunk(log, json.loads(payload), clock.now())
                except (json.JSONDecodeError, AttributeError, IndexError):
                    continue  # malformed frame: skip, keep streaming
    except Exception:
        log.failed = True
    log.text = "".join(log.parts)
    return log
