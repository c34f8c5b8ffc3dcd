"""Helpers for bit strings such as ``"011011"``.

Bit strings are the public currency for messages, keys, codewords and masks.
Positions are 0-based, leftmost character first.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import InvalidArgumentError


def check_bits(bits: str, length: int | None = None, name: str = "bits") -> str:
    if not isinstance(bits, str) or any(ch not in "01" for ch in bits):
        raise InvalidArgumentError(f"{name} must be a string of 0/1 characters, got {bits!r}")
    if length is not None and len(bits) != length:
        raise InvalidArgumentError(f"{name} must have length {length}, got {len(bits)}")
    return bits


def to_array(bits: str) -> np.ndarray:
    return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")


def from_array(arr: Iterable[int]) -> str:
    return "".join("1" if int(b) & 1 else "0" for b in arr)


def xor(a: str, b: str) -> str:
    if len(a) != len(b):
        raise InvalidArgumentError(f"length mismatch: {len(a)} vs {len(b)}")
    return from_array(to_array(a) ^ to_array(b))


def hamming(a: str, b: str) -> int:
    if len(a) != len(b):
        raise InvalidArgumentError(f"length mismatch: {len(a)} vs {len(b)}")
    return int(np.count_nonzero(to_array(a) != to_array(b)))


def diff_positions(a: str, b: str) -> list[int]:
    if len(a) != len(b):
        raise InvalidArgumentError(f"length mismatch: {len(a)} vs {len(b)}")
    return [i for i, (x, y) in enumerate(zip(a, b)) if x != y]


def mask_from_positions(n: int, positions: Iterable[int]) -> str:
    out = ["0"] * n
    for p in positions:
        if not 0 <= p < n:
            raise InvalidArgumentError(f"position {p} outside 0..{n - 1}")
        out[p] = "1"
    return "".join(out)


def positions_of_ones(mask: str) -> list[int]:
    return [i for i, ch in enumerate(mask) if ch == "1"]


def random_bits(n: int, rng: np.random.Generator) -> str:
    return from_array(rng.integers(0, 2, size=n))
