"""Stable seed derivation for schedule-independent determinism.

Every randomized stage derives its own RNG seed from the global seed plus a
stable identifier (template id, sentence id, training step).  Parallel
scheduling therefore never changes any output, and any unit of work can be
replayed in isolation.
"""

from __future__ import annotations

import hashlib


def derive_seed(*parts: int | str) -> int:
    """Derive a 64-bit seed from the given parts.

    Uses SHA-256 rather than ``hash()`` because the builtin is salted per
    process and would break cross-run determinism.
    """
    key = "\x1f".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "little")
