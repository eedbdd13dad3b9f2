"""Wire-level helpers: tensor transport, canonical JSON, fingerprints.

Tensors travel inside JSON either as base64-encoded container bytes
(payloads up to 1 MiB) or as a path to a container file on shared
storage. Request fingerprints — used by the scripted mock servers —
hash the canonicalized request after stripping volatile fields such as
rendered instructions and tensor payloads.
"""

from __future__ import annotations

import base64
import hashlib
import json
import uuid
from pathlib import Path

import numpy as np

from .. import container
from ..errors import ProtocolError

INLINE_THRESHOLD = 1 << 20  # 1 MiB of container bytes


def tensor_payload(array: np.ndarray, workdir: str | Path | None = None) -> dict:
    """Wrap ``array`` for transport: inline base64 when small, file ref otherwise."""
    blob = container.encode(array)
    if len(blob) <= INLINE_THRESHOLD:
        return {"b64": base64.b64encode(blob).decode("ascii")}
    if workdir is None:
        raise ProtocolError(
            f"tensor of {len(blob)} bytes exceeds the inline threshold and no "
            "working directory is available for a file reference"
        )
    path = Path(workdir) / f"wire_{uuid.uuid4().hex}.vrtc"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(blob)
    return {"path": str(path)}


def decode_tensor_field(field: dict) -> np.ndarray:
    """Read a tensor back from a {"b64": ...} or {"path": ...} wire field."""
    if not isinstance(field, dict):
        raise ProtocolError(f"tensor field must be an object, got {type(field).__name__}")
    if "b64" in field:
        try:
            blob = base64.b64decode(field["b64"], validate=True)
        except Exception as exc:
            raise ProtocolError(f"bad base64 tensor payload: {exc}") from exc
        return container.decode(blob)
    if "path" in field:
        return container.read(field["path"])
    raise ProtocolError("tensor field needs either 'b64' or 'path'")


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def strip_volatile(doc, volatile: frozenset[str] | set[str]):
    """Recursively drop keys named in ``volatile`` anywhere in the document."""
    if isinstance(doc, dict):
        return {
            key: strip_volatile(value, volatile)
            for key, value in doc.items()
            if key not in volatile
        }
    if isinstance(doc, list):
        return [strip_volatile(item, volatile) for item in doc]
    return doc


def fingerprint(doc, volatile: frozenset[str] | set[str] = frozenset()) -> str:
    """Stable request hash: sha256 of the canonical JSON minus volatile fields."""
    pruned = strip_volatile(doc, volatile)
    return hashlib.sha256(canonical_json(pruned).encode("utf-8")).hexdigest()
