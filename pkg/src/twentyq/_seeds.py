"""Deterministic seed derivation for independent RNG streams."""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *tags: object) -> int:
    """Derive a child seed from a root seed and a tag path.

    Stable across processes and platforms (unlike hash()), so transcripts
    replay byte-identically.
    """
    key = ":".join([str(root)] + [str(t) for t in tags])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
