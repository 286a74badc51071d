"""Bitstring/basis-index conventions shared by all modules.

The convention is big-endian throughout: bit 0 of a bitstring is the
leftmost character and corresponds to the most significant bit of the
basis index, i.e. index = sum_j bits[j] * 2**(n - 1 - j).
"""

from __future__ import annotations

from typing import Sequence, Union

Bits = Union[str, Sequence[int]]


def as_bit_tuple(bits: Bits) -> tuple[int, ...]:
    """Normalize a bitstring ("0101") or 0/1 sequence to a tuple of ints."""
    if isinstance(bits, str):
        out = tuple(int(ch) for ch in bits)
    else:
        out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"not a bitstring: {bits!r}")
    return out


def bits_to_index(bits: Bits) -> int:
    """Basis index of a bitstring (big-endian)."""
    idx = 0
    for b in as_bit_tuple(bits):
        idx = (idx << 1) | b
    return idx


def index_to_bits(index: int, n: int) -> str:
    """Bitstring of length n for a basis index (big-endian)."""
    if not 0 <= index < (1 << n):
        raise ValueError(f"index {index} out of range for {n} bits")
    return format(index, f"0{n}b")
