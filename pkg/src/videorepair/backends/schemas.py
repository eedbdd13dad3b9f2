"""Loader and validator for the versioned wire-protocol schemas (v1 frozen)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from jsonschema import Draft202012Validator
from jsonschema.exceptions import ValidationError
from referencing import Registry, Resource

from ..errors import ProtocolError

SCHEMA_VERSION = "v1"


@lru_cache(maxsize=1)
def _schema_documents() -> dict[str, dict]:
    root = resources.files("videorepair") / "schemas" / SCHEMA_VERSION
    docs: dict[str, dict] = {}
    for entry in root.iterdir():
        if entry.name.endswith(".json"):
            docs[entry.name[: -len(".json")]] = json.loads(entry.read_text(encoding="utf-8"))
    return docs


@lru_cache(maxsize=1)
def _registry() -> Registry:
    resources_ = [
        (f"{name}.json", Resource.from_contents(doc))
        for name, doc in _schema_documents().items()
    ]
    return Registry().with_resources(resources_)


@lru_cache(maxsize=64)
def validator_for(name: str) -> Draft202012Validator:
    docs = _schema_documents()
    if name not in docs:
        raise ProtocolError(f"no schema named {name!r} in protocol {SCHEMA_VERSION}")
    return Draft202012Validator(docs[name], registry=_registry())


def validate(name: str, doc, *, role: str | None = None) -> None:
    """Raise :class:`ProtocolError` when ``doc`` violates schema ``name``."""
    try:
        validator_for(name).validate(doc)
    except ValidationError as exc:
        raise ProtocolError(
            f"document violates schema {name!r}: {exc.message}",
            role=role,
            body=json.dumps(doc)[:2000] if isinstance(doc, (dict, list)) else str(doc)[:2000],
        ) from exc


def is_valid(name: str, doc) -> bool:
    return validator_for(name).is_valid(doc)
