"""Seeded Gaussian random streams.

Every stochastic step in this package consumes standard-normal variates from a
:class:`RandomStream`, one variate per sampled quantity and in a documented
order. Variates are generated in blocks by a numpy ``Generator`` (PCG64) and
handed out sequentially, so the sequence a consumer sees depends only on the
seed, never on how the requests were batched.
"""

from __future__ import annotations

import hashlib

import numpy as np

_BLOCK = 8192


class RandomStream:
    """Sequential source of standard-normal variates."""

    def __init__(self, seed: int | None = None, block: int = _BLOCK) -> None:
        self.seed = seed
        self._block = int(block)
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._buf = np.empty(0)
        self._pos = 0
        self.consumed = 0

    def _refill(self, need: int) -> None:
        rest = self._buf[self._pos:]
        fresh = self._gen.standard_normal(max(self._block, need))
        self._buf = np.concatenate([rest, fresh]) if rest.size else fresh
        self._pos = 0

    def normals(self, k: int) -> np.ndarray:
        """Next ``k`` standard-normal variates (a read-only view)."""
        if self._pos + k > self._buf.size:
            self._refill(k)
        out = self._buf[self._pos:self._pos + k]
        self._pos += k
        self.consumed += k
        return out

    def normal(self) -> float:
        """Next standard-normal variate as a Python float."""
        if self._pos >= self._buf.size:
            self._refill(1)
        z = float(self._buf[self._pos])
        self._pos += 1
        self.consumed += 1
        return z


def child_seed(master_seed: int, *labels: object) -> int:
    """Deterministic 64-bit seed derived from a master seed and labels.

    The seed is the first 8 bytes (little endian) of the SHA-256 digest of
    ``"<master_seed>/<label>/<label>..."``, so it is identical on every
    platform and Python version.
    """
    key = "/".join([str(int(master_seed))] + [str(x) for x in labels])
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "little")
