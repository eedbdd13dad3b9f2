"""HTTP client for the six backend roles.

One shared :class:`BackendClient` validates every request and reply
against the v1 schemas, retries a call once on transport errors (never
on protocol errors) and logs latency plus byte counts per call. A
:class:`RoleHandle` binds the client to one role so module code can
stay ignorant of endpoint wiring.
"""

from __future__ import annotations

import json
import logging
import time

import httpx

from ..errors import BackendError, ConfigError, ProtocolError
from .roles import BackendRole, REQUEST_SCHEMA_BY_PATH, RESPONSE_SCHEMA_BY_PATH
from . import schemas

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0


class BackendClient:
    """Thread-safe JSON-over-HTTP client bound to a role -> base-URL map."""

    def __init__(
        self,
        endpoints: dict[str | BackendRole, str],
        timeout: float = DEFAULT_TIMEOUT,
        bearer_token: str | None = None,
    ):
        self.endpoints: dict[BackendRole, str] = {}
        for role, url in endpoints.items():
            self.endpoints[BackendRole(role)] = url.rstrip("/")
        headers = {}
        if bearer_token:
            headers["Authorization"] = f"Bearer {bearer_token}"
        self._http = httpx.Client(timeout=timeout, headers=headers)

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "BackendClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def has_role(self, role: str | BackendRole) -> bool:
        return BackendRole(role) in self.endpoints

    def handle(self, role: str | BackendRole) -> "RoleHandle":
        role = BackendRole(role)
        if role not in self.endpoints:
            raise ConfigError(f"role {role.value} unbound")
        return RoleHandle(self, role)

    def call(
        self,
        role: str | BackendRole,
        path: str,
        payload: dict,
        response_key: str | None = None,
    ) -> dict:
        role = BackendRole(role)
        if role not in self.endpoints:
            raise ConfigError(f"role {role.value} unbound")
        request_key = REQUEST_SCHEMA_BY_PATH.get(path)
        if request_key is None:
            raise ProtocolError(f"unknown endpoint path {path!r}", role=role.value)
        schemas.validate(request_key, payload, role=role.value)

        url = self.endpoints[role] + path
        body = json.dumps(payload).encode("utf-8")
        response = self._post_with_retry(role, url, body)

        if response.status_code >= 500:
            raise BackendError(
                f"{role.value} {path} returned {response.status_code}",
                role=role.value,
                body=response.text[:4000],
            )
        if response.status_code >= 400:
            raise ProtocolError(
                f"{role.value} {path} rejected the request ({response.status_code})",
                role=role.value,
                body=response.text[:4000],
            )
        try:
            reply = response.json()
        except ValueError as exc:
            raise ProtocolError(
                f"{role.value} {path} returned non-JSON",
                role=role.value,
                body=response.text[:4000],
            ) from exc
        schemas.validate(response_key or RESPONSE_SCHEMA_BY_PATH[path], reply, role=role.value)
        return reply

    def _post_with_retry(self, role: BackendRole, url: str, body: bytes) -> httpx.Response:
        headers = {"Content-Type": "application/json"}
        started = time.perf_counter()
        try:
            response = self._http.post(url, content=body, headers=headers)
        except httpx.TransportError as exc:
            log.warning("%s transport error (%s); retrying once", url, exc)
            try:
                response = self._http.post(url, content=body, headers=headers)
            except httpx.TransportError as exc2:
                raise BackendError(
                    f"transport failure calling {url}: {exc2}", role=role.value
                ) from exc2
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        log.info(
            "call role=%s url=%s status=%d ms=%.1f sent=%dB received=%dB",
            role.value,
            url,
            response.status_code,
            elapsed_ms,
            len(body),
            len(response.content),
        )
        return response


class RoleHandle:
    """A BackendClient view fixed to one role; what the engine ops consume."""

    def __init__(self, client: BackendClient, role: BackendRole):
        self.client = client
        self.role = role

    def call(self, path: str, payload: dict, response_key: str | None = None) -> dict:
        return self.client.call(self.role, path, payload, response_key=response_key)
