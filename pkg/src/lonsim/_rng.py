"""Counter-based random streams.

Every random draw in the toolkit is a pure function of a 64-bit stream key
and a per-stream counter::

    draw(key, c) = mix64(key + (c + 1) * GOLDEN)      (mod 2**64)

where ``mix64`` is the SplitMix64 finalizer (a bijection on 64-bit words).
Child streams are derived with::

    derive(key, i) = mix64(mix64(key ^ DERIVE_SALT) + (i + 1) * GOLDEN)

which is injective in ``i`` for a fixed parent key.  Because no stream shares
state with another, work split across processes (or vectorised across numpy
lanes) reproduces the scalar sequence exactly.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
DERIVE_SALT = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def fnv1a64(text: str) -> int:
    """64-bit FNV-1a hash of the UTF-8 encoding of ``text``."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & MASK64
    return h


def derive(key: int, index: int | str) -> int:
    """Key of child stream ``index`` of ``key``; string indices are FNV-hashed."""
    if isinstance(index, str):
        index = fnv1a64(index)
    return mix64(mix64(key ^ DERIVE_SALT) + (index + 1) * GOLDEN)


def derive_path(key: int, *path: int | str) -> int:
    for part in path:
        key = derive(key, part)
    return key


class Stream:
    """Scalar random stream over a 64-bit key.

    Parameters
    ----------
    key : int
        Stream key, usually obtained from :func:`derive`.
    counter : int, default=0
        Number of draws already consumed.
    """

    __slots__ = ("key", "counter")

    def __init__(self, key: int, counter: int = 0):
        self.key = int(key) & MASK64
        self.counter = int(counter)

    def __repr__(self) -> str:
        return f"Stream(key={self.key:#018x}, counter={self.counter})"

    def spawn(self, index: int | str) -> "Stream":
        return Stream(derive(self.key, index))

    def u64(self) -> int:
        self.counter += 1
        return mix64(self.key + self.counter * GOLDEN)

    def below(self, k: int) -> int:
        """Uniform integer in ``[0, k)`` by multiply-high; ``k`` must be positive."""
        if k <= 0:
            raise ValueError("k must be positive")
        return (self.u64() * k) >> 64

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 random bits."""
        return (self.u64() >> 11) * _INV_2_53

    def bits(self, n: int) -> int:
        """``n`` uniform random bits as an integer."""
        out = 0
        remaining = n
        while remaining > 0:
            take = min(64, remaining)
            out = (out << take) | (self.u64() >> (64 - take))
            remaining -= take
        return out


def as_stream(rng) -> Stream:
    """Accept a :class:`Stream` or an integer seed."""
    if isinstance(rng, Stream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return Stream(derive(int(rng) & MASK64, 0))
    raise TypeError(f"expected Stream or int seed, got {type(rng).__name__}")


# -- vectorised counterparts ---------------------------------------------------
# numpy uint64 arithmetic wraps modulo 2**64, matching the masked integer code.

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_U32 = np.uint64(32)
_LO32 = np.uint64(0xFFFFFFFF)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U30)) * np.uint64(_M1)
        z = (z ^ (z >> _U27)) * np.uint64(_M2)
    return z ^ (z >> _U31)


def u64_array(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Next draw of each lane; ``counters`` is incremented in place."""
    counters += 1
    with np.errstate(over="ignore"):
        state = keys + counters.astype(np.uint64) * np.uint64(GOLDEN)
    return mix64_array(state)


def below_array(keys: np.ndarray, counters: np.ndarray, k) -> np.ndarray:
    """Lane-wise uniform integers in ``[0, k)``; requires ``k < 2**32``.

    Computes the high word of the 64x32-bit product exactly, so each lane
    agrees with :meth:`Stream.below`.
    """
    u = u64_array(keys, counters)
    k = np.asarray(k, dtype=np.uint64)
    hi = u >> _U32
    lo = u & _LO32
    with np.errstate(over="ignore"):
        out = (hi * k + ((lo * k) >> _U32)) >> _U32
    return out.astype(np.int64)


def random_array(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    return (u64_array(keys, counters) >> _U11).astype(np.float64) * _INV_2_53


def derive_array(key: int, indices: np.ndarray) -> np.ndarray:
    """Vectorised :func:`derive` over integer indices."""
    base = np.uint64(mix64(key ^ DERIVE_SALT))
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64_array(base + (idx + np.uint64(1)) * np.uint64(GOLDEN))


def derive_keys(keys: np.ndarray, index: int) -> np.ndarray:
    """Vectorised :func:`derive` of one index over many parent keys."""
    keys = np.asarray(keys, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64_array(mix64_array(keys ^ np.uint64(DERIVE_SALT)) + np.uint64((index + 1) * GOLDEN & MASK64))


_FNV_OFFSET = np.uint64(0xCBF29CE484222325)
_FNV_PRIME = np.uint64(0x100000001B3)


def fnv1a64_many(texts: list[str]) -> np.ndarray:
    """:func:`fnv1a64` of many strings at once (column-wise over padded bytes)."""
    raw = [t.encode("utf-8") for t in texts]
    if not raw:
        return np.zeros(0, dtype=np.uint64)
    lengths = np.array([len(r) for r in raw])
    width = int(lengths.max())
    buf = np.zeros((len(raw), max(width, 1)), dtype=np.uint8)
    for i, r in enumerate(raw):
        buf[i, : len(r)] = np.frombuffer(r, dtype=np.uint8)
    h = np.full(len(raw), _FNV_OFFSET, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for col in range(width):
            live = lengths > col
            upd = (h ^ buf[:, col].astype(np.uint64)) * _FNV_PRIME
            h = np.where(live, upd, h)
    return h
