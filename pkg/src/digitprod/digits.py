"""Exact base-B digit expansions and the digit statistics built from them.

Zero is represented by the empty digit string, so every statistic is 0 at
n = 0.  Digits are kept least-significant-first; rendering most-significant
-first is an I/O concern.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = [
    "check_base",
    "digits_of",
    "from_digits",
    "DigitStat",
    "digit_stat",
    "digit_stat_block",
    "thue_morse",
    "thue_morse_block",
]


def check_base(base: int) -> int:
    if not isinstance(base, (int, np.integer)) or base < 2:
        raise ValidationError(f"base must be an integer >= 2, got {base!r}")
    return int(base)


def digits_of(n: int, base: int) -> list[int]:
    """Digits of n in the given base, least significant first; 0 -> []."""
    base = check_base(base)
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n}")
    out = []
    n = int(n)
    while n > 0:
        n, d = divmod(n, base)
        out.append(d)
    return out


def from_digits(digits: list[int], base: int) -> int:
    """Inverse of digits_of (least significant first)."""
    base = check_base(base)
    n = 0
    for d in reversed(digits):
        n = n * base + d
    return n


@dataclass(frozen=True)
class DigitStat:
    """A statistic of the digit string: a count, the digit sum, or the length.

    kind is one of "count" (occurrences of any digit in `digits`),
    "digit_sum", or "length".
    """

    kind: str
    digits: frozenset[int] = field(default_factory=frozenset)

    @staticmethod
    def count(digit: int) -> "DigitStat":
        return DigitStat("count", frozenset({int(digit)}))

    @staticmethod
    def count_set(digits) -> "DigitStat":
        js = frozenset(int(j) for j in digits)
        if not js:
            raise ValidationError("digit set must be nonempty")
        return DigitStat("count", js)

    @staticmethod
    def digit_sum() -> "DigitStat":
        return DigitStat("digit_sum")

    @staticmethod
    def length() -> "DigitStat":
        return DigitStat("length")

    def check_for_base(self, base: int) -> None:
        if self.kind == "count":
            bad = [j for j in self.digits if not 0 <= j < base]
            if bad:
                raise ValidationError(
                    f"digits {sorted(bad)} out of range for base {base}"
                )

    def describe(self) -> str:
        if self.kind == "count":
            return "count{%s}" % ",".join(str(j) for j in sorted(self.digits))
        return self.kind


def digit_stat(n: int, stat: DigitStat, base: int) -> int:
    """Evaluate a digit statistic at a single n.  All statistics are 0 at n = 0."""
    base = check_base(base)
    stat.check_for_base(base)
    ds = digits_of(n, base)
    if stat.kind == "count":
        return sum(1 for d in ds if d in stat.digits)
    if stat.kind == "digit_sum":
        return sum(ds)
    if stat.kind == "length":
        return len(ds)
    raise ValidationError(f"unknown digit statistic {stat.kind!r}")


def digit_stat_block(ns: np.ndarray, stat: DigitStat, base: int) -> np.ndarray:
    """Vectorized digit_stat over an int64 array of nonnegative n."""
    base = check_base(base)
    stat.check_for_base(base)
    x = np.asarray(ns, dtype=np.int64).copy()
    out = np.zeros(x.shape, dtype=np.int64)
    if stat.kind == "count":
        member = np.zeros(base, dtype=bool)
        for j in stat.digits:
            member[j] = True
        while True:
            active = x > 0
            if not active.any():
                break
            out += member[x % base] & active
            x //= base
    elif stat.kind == "digit_sum":
        while (x > 0).any():
            out += x % base
            x //= base
    elif stat.kind == "length":
        while True:
            active = x > 0
            if not active.any():
                break
            out += active
            x //= base
    else:
        raise ValidationError(f"unknown digit statistic {stat.kind!r}")
    return out


def thue_morse(n: int) -> int:
    """+1 or -1 according to the parity of the number of ones in binary n."""
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n}")
    return -1 if int(n).bit_count() % 2 else 1


_BYTE_PARITY = np.array(
    [bin(i).count("1") % 2 for i in range(256)], dtype=np.int64
)


def thue_morse_block(ns: np.ndarray) -> np.ndarray:
    """Vectorized thue_morse over an int64 array of nonnegative n."""
    x = np.asarray(ns, dtype=np.int64)
    parity = np.zeros(x.shape, dtype=np.int64)
    for shift in range(0, 64, 8):
        parity ^= _BYTE_PARITY[(x >> shift) & 0xFF]
    return 1 - 2 * parity
