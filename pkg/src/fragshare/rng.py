"""Stable seed derivation.

Every stage RNG is derived from the single pipeline seed with a content
hash, never from Python's salted ``hash()`` or system entropy, so runs are
reproducible across processes and machines.
"""

from __future__ import annotations

import hashlib


def derive_seed(seed: int, purpose: str) -> int:
    digest = hashlib.sha256(f"{seed}:{purpose}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
