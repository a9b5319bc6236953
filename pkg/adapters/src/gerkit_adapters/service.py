"""Request plumbing shared by the two services.

Error bodies are always ``{"error": message}``: 400 for anything wrong with
the request, 500 with a diagnostic when the model itself fails.
"""

from __future__ import annotations

from fastapi import Request
from fastapi.responses import JSONResponse


class BadRequestError(ValueError):
    """Client-side problem; maps to HTTP 400."""


def error_response(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


async def json_object_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception as exc:
        raise BadRequestError("request body must be valid JSON") from exc
    if not isinstance(body, dict):
        raise BadRequestError("request body must be a JSON object")
    return body


def optional_int(body: dict, field: str, default: int, minimum: int = 1) -> int:
    value = body.get(field, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadRequestError(f"'{field}' must be an integer")
    if value < minimum:
        raise BadRequestError(f"'{field}' must be >= {minimum}, got {value}")
    return value
