"""Uniform access to the service routes, in process or over HTTP.

The CLI talks only to a ServiceClient.  Without a server URL the call
goes straight through the route table; with one it becomes a POST to a
running server.  Both paths validate through the same pydantic models,
so a command behaves identically either way.
"""

from __future__ import annotations

from .errors import NonConvergenceError
from .service.app import ROUTES


class ServiceError(Exception):
    """A route refused the request.  kind is "input" or "nonconvergence"."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


class ServiceClient:
    def __init__(self, base_url: str = None, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/") if base_url else None
        self._http = None
        if self.base_url:
            import httpx
            self._http = httpx.Client(base_url=self.base_url, timeout=timeout)

    def close(self):
        if self._http is not None:
            self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def call(self, path: str, payload: dict) -> dict:
        if self._http is not None:
            return self._call_remote(path, payload)
        return self._call_local(path, payload)

    def _call_local(self, path: str, payload: dict) -> dict:
        if path not in ROUTES:
            raise ServiceError("input", f"unknown route {path}")
        req_model, handler = ROUTES[path]
        try:
            body = req_model(**payload)
        except Exception as exc:  # pydantic ValidationError
            raise ServiceError("input", str(exc)) from exc
        try:
            result = handler(body)
        except NonConvergenceError as exc:
            raise ServiceError("nonconvergence", str(exc)) from exc
        except ValueError as exc:
            raise ServiceError("input", str(exc)) from exc
        return result.model_dump(mode="json")

    def _call_remote(self, path: str, payload: dict) -> dict:
        resp = self._http.post(path, json=payload)
        if resp.status_code == 200:
            return resp.json()
        try:
            detail = resp.json()
        except ValueError:
            detail = {}
        if resp.status_code == 400:
            raise ServiceError(detail.get("kind", "input"),
                               detail.get("detail", resp.text))
        if resp.status_code == 422:
            raise ServiceError("input", str(detail.get("detail", resp.text)))
        raise ServiceError("input",
                           f"server error {resp.status_code}: {resp.text}")
