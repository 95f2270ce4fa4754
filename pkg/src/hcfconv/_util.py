"""Small shared helpers: canonical hashing and delimited-table output."""

from __future__ import annotations

import dataclasses
import hashlib


def canonical_text(obj) -> str:
    """Deterministic text form of nested dataclasses and plain values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        items = sorted(
            (f.name, canonical_text(getattr(obj, f.name)))
            for f in dataclasses.fields(obj)
        )
        body = ",".join(f"{k}={v}" for k, v in items)
        return f"{type(obj).__name__}({body})"
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, (tuple, list)):
        return "[" + ",".join(canonical_text(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(f"{k}:{canonical_text(v)}" for k, v in sorted(obj.items())) + "}"
    return repr(obj)


def canonical_hash(obj) -> str:
    """SHA-256 over the canonical text; stable across runs and processes."""
    return hashlib.sha256(canonical_text(obj).encode()).hexdigest()


def format_float(x: float) -> str:
    """Shortest round-trip decimal form, identical on every run."""
    return repr(float(x))
