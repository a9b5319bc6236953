"""HTTP plumbing shared by the remote correction backend and remote scorers.

Failures are mapped onto three typed errors so callers can decide what is
worth retrying: timeouts and connection/server failures are retryable,
malformed requests or responses are not.
"""

from __future__ import annotations

import httpx

from .errors import GerkitError


class RemoteError(GerkitError):
    retryable = False


class RemoteTimeoutError(RemoteError):
    retryable = True


class ConnectionFailureError(RemoteError):
    retryable = True


class MalformedResponseError(RemoteError):
    retryable = False


def post_json(url: str, payload: dict, timeout_s: float) -> dict:
    """POST ``payload`` as JSON and return the decoded JSON object."""
    try:
        response = httpx.post(url, json=payload, timeout=timeout_s)
    except httpx.TimeoutException as exc:
        raise RemoteTimeoutError(f"timeout after {timeout_s}s calling {url}: {exc}") from exc
    except httpx.HTTPError as exc:
        raise ConnectionFailureError(f"request to {url} failed: {exc}") from exc
    if response.status_code >= 500:
        raise ConnectionFailureError(f"{url} returned {response.status_code}")
    if response.status_code != 200:
        raise MalformedResponseError(
            f"{url} returned {response.status_code}: {response.text[:200]}"
        )
    try:
        obj = response.json()
    except ValueError as exc:
        raise MalformedResponseError(f"{url} returned non-JSON body") from exc
    if not isinstance(obj, dict):
        raise MalformedResponseError(f"{url} returned a non-object JSON value")
    return obj
