"""Exact hash table from variable-length int64 keys to integer ids.

Keys are stored verbatim and compared word by word on every probe, so two
different keys never share an id no matter how their hashes collide.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_EMPTY = -1


@njit(cache=True)
def _hash(buf, lo, hi):
    h = np.uint64(0x9E3779B97F4A7C15) ^ np.uint64(hi - lo)
    for i in range(lo, hi):
        h ^= np.uint64(buf[i])
        h *= np.uint64(0xBF58476D1CE4E5B9)
        h ^= h >> np.uint64(31)
    return h


@njit(cache=True)
def _lookup_or_insert(buf, offsets, data, starts, ids, size, slots, next_id, out):
    mask = np.uint64(len(slots) - 1)
    used = starts[size]
    for q in range(len(offsets) - 1):
        lo, hi = offsets[q], offsets[q + 1]
        width = hi - lo
        pos = np.int64(_hash(buf, lo, hi) & mask)
        while True:
            e = slots[pos]
            if e == _EMPTY:
                data[used:used + width] = buf[lo:hi]
                used += width
                ids[size] = next_id
                slots[pos] = size
                size += 1
                starts[size] = used
                out[q] = next_id
                next_id += 1
                break
            s = starts[e]
            if starts[e + 1] - s == width:
                same = True
                for i in range(width):
                    if data[s + i] != buf[lo + i]:
                        same = False
                        break
                if same:
                    out[q] = ids[e]
                    break
            pos = np.int64((np.uint64(pos) + np.uint64(1)) & mask)
    return size, next_id


@njit(cache=True)
def _rehash(data, starts, size, slots):
    mask = np.uint64(len(slots) - 1)
    for e in range(size):
        pos = np.int64(_hash(data, starts[e], starts[e + 1]) & mask)
        while slots[pos] != _EMPTY:
            pos = np.int64((np.uint64(pos) + np.uint64(1)) & mask)
        slots[pos] = e


def _grown(a: np.ndarray, need: int) -> np.ndarray:
    if need <= len(a):
        return a
    out = np.empty(max(need, 2 * len(a)), dtype=a.dtype)
    out[:len(a)] = a
    return out


class KeyTable:
    """Append-only map ``key -> id``; unseen keys take ids from the caller's counter."""

    def __init__(self):
        self.size = 0
        self.data = np.empty(1024, dtype=np.int64)
        self.starts = np.zeros(257, dtype=np.int64)
        self.ids = np.empty(256, dtype=np.int64)
        self.slots = np.full(512, _EMPTY, dtype=np.int64)

    def __len__(self):
        return self.size

    def _reserve(self, keys: int, words: int) -> None:
        self.data = _grown(self.data, int(self.starts[self.size]) + words)
        self.starts = _grown(self.starts, self.size + keys + 1)
        self.ids = _grown(self.ids, self.size + keys)
        # load factor stays below one half
        if 2 * (self.size + keys) > len(self.slots):
            cap = len(self.slots)
            while 2 * (self.size + keys) > cap:
                cap *= 2
            self.slots = np.full(cap, _EMPTY, dtype=np.int64)
            _rehash(self.data, self.starts, self.size, self.slots)

    def assign(self, buf: np.ndarray, offsets: np.ndarray, next_id: int) -> tuple[np.ndarray, int]:
        """Ids of the keys ``buf[offsets[i]:offsets[i+1]]`` and the advanced counter."""
        buf = np.ascontiguousarray(buf, dtype=np.int64)
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        count = len(offsets) - 1
        out = np.empty(max(count, 0), dtype=np.int64)
        if count <= 0:
            return out, next_id
        self._reserve(count, len(buf))
        self.size, next_id = _lookup_or_insert(buf, offsets, self.data, self.starts, self.ids,
                                               self.size, self.slots, next_id, out)
        return out, int(next_id)

    def items(self):
        for e in range(self.size):
            yield self.data[self.starts[e]:self.starts[e + 1]].copy(), int(self.ids[e])
