"""Post-hoc response scoring against an external service.

Scoring runs after the serving window closes so the scorer's load cannot
perturb the measurements. Protocol: POST {"prompt": ..., "response": ...}
returns {"score": <real>}.
"""

from __future__ import annotations

import httpx

from .client import RequestLog


async def score_responses(records: list[RequestLog], scorer_url: str,
                          timeout_s: float = 10.0) -> dict[str, float]:
    """One scalar per scoreable response, keyed by request id.

    Failed requests and empty responses are skipped; a scorer error or
    timeout on one item leaves that id absent and moves on.
    """
    scores: dict[str, float] = {}
    async with httpx.AsyncClient() as client:
        for record in records:
            if record.failed or not record.text:
                continue
            try:
                response = await client.post(
                    scorer_url,
                    json={"prompt": record.prompt, "response": record.text},
                    timeout=timeout_s)
                response.raise_for_status()
                scores[record.request_id] = float(response.json()["score"])
            except Exception:
                continue
    return scores
