"""Deterministic fan-out of one root seed into independent child seeds.

Child seeds are derived by hashing the root seed together with a label
path (e.g. ``("trial", 17)``), so adding new consumers never shifts the
streams of existing ones.
"""

from __future__ import annotations

import hashlib


def child_seed(root: int, *path) -> int:
    """Return a 63-bit seed derived from ``root`` and a label path."""
    key = repr((int(root),) + tuple(path)).encode()
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "little") >> 1
