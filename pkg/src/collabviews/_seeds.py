"""Stable 64-bit seed derivation.

Every seed in the package is derived from a user-supplied integer through
BLAKE2b with an 8-byte digest, read little-endian.  Byte layouts:

* ``pair_seed(seed, i, j)``: ``b"pair" + pack("<QQQ", seed, min(i, j), max(i, j))``
* ``derive_seed(seed, name)``: ``b"derive" + pack("<Q", seed) + name.encode("utf-8")``

Seeds are reduced modulo 2**64 before packing, so negative seeds are accepted.
"""

from __future__ import annotations

import hashlib
import struct

_MASK = (1 << 64) - 1


def _digest(payload: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def pair_seed(seed: int, i: int, j: int) -> int:
    lo, hi = (i, j) if i <= j else (j, i)
    return _digest(b"pair" + struct.pack("<QQQ", seed & _MASK, lo, hi))


def derive_seed(seed: int, name: str) -> int:
    return _digest(b"derive" + struct.pack("<Q", seed & _MASK) + name.encode("utf-8"))


def fingerprint(obj: object) -> str:
    """Short hex digest of a JSON-serialisable object (keys sorted)."""
    import json

    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
