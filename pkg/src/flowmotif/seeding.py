"""Stable seed derivation so parallel work never depends on schedule.

Every randomized task gets its own seed hashed from the master seed plus
a context path (match id, replicate index, restart index, ...). Results
are then a pure function of (inputs, master seed), whatever the thread
count or execution order.
"""

from __future__ import annotations

import hashlib
import struct

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, *context: object) -> int:
    """Hash (master_seed, context...) into a 64-bit unsigned seed."""
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<Q", master_seed & _MASK64))
    for part in context:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")
