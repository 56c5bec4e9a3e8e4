"""Deterministic randomness from SHAKE-256.

Every random draw in the library goes through a ``random.Random`` instance
passed in by the caller.  ``ShakeRandom`` is a drop-in subclass whose bit
stream is SHAKE-256 in counter mode, so key generation and experiments are
reproducible from a byte seed.
"""
from __future__ import annotations

import hashlib
import os
import random

_DOMAIN = b"miranda/rng/v1"
_BLOCK = 1 << 12


class ShakeRandom(random.Random):
    """random.Random driven by SHAKE-256(domain || seed || counter)."""

    def __init__(self, seed: bytes | str | int | None = None, domain: bytes = _DOMAIN):
        self._domain = domain
        self._buf = b""
        self._pos = 0
        self._counter = 0
        self._seed_bytes = b""
        super().__init__(seed)

    def seed(self, a=None, version=2):  # noqa: D401 - signature fixed by random.Random
        if a is None:
            a = os.urandom(32)
        if isinstance(a, str):
            a = a.encode()
        elif isinstance(a, int):
            a = a.to_bytes(max(1, (a.bit_length() + 7) // 8), "little")
        self._seed_bytes = bytes(a)
        self._buf = b""
        self._pos = 0
        self._counter = 0

    def _refill(self) -> None:
        h = hashlib.shake_256()
        h.update(self._domain)
        h.update(len(self._seed_bytes).to_bytes(4, "little"))
        h.update(self._seed_bytes)
        h.update(self._counter.to_bytes(8, "little"))
        self._counter += 1
        self._buf = self._buf[self._pos:] + h.digest(_BLOCK)
        self._pos = 0

    def randbytes(self, n: int) -> bytes:
        while len(self._buf) - self._pos < n:
            self._refill()
        out = self._buf[self._pos:self._pos + n]
        self._pos += n
        return out

    def getrandbits(self, k: int) -> int:
        if k < 0:
            raise ValueError("number of bits must be non-negative")
        if k == 0:
            return 0
        v = int.from_bytes(self.randbytes((k + 7) // 8), "little")
        return v & ((1 << k) - 1)

    def random(self) -> float:
        return self.getrandbits(53) / 9007199254740992.0

    def getstate(self):
        return (self._domain, self._seed_bytes, self._counter, self._buf, self._pos)

    def setstate(self, state):
        self._domain, self._seed_bytes, self._counter, self._buf, self._pos = state

    def fork(self, label: bytes | str) -> "ShakeRandom":
        """Independent child stream, seeded from this stream and a label."""
        if isinstance(label, str):
            label = label.encode()
        return ShakeRandom(self.randbytes(32) + label, domain=self._domain)


def make_rng(seed: bytes | str | int | None = None) -> random.Random:
    """ShakeRandom for a given seed, or the OS generator when seed is None."""
    if seed is None:
        return random.SystemRandom()
    return ShakeRandom(seed)
