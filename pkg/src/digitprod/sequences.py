"""Exponent sequences: constructors, evaluation, and structural checks.

Four families are supported.  All of them evaluate pointwise to complex
numbers and in vectorized blocks for the product and summatory machinery:

* ``StronglyMultiplicative``: u(0) = 1 and u(B*n + k) = u(n) * u(k), so the
  value at n is the product of table values over the base-B digits of n.
* ``DigitStatPower``: u(n) = w ** stat(n) for a digit statistic, with
  0**0 := 1.
* ``PeriodicPower``: u(n) = omega**n for omega = exp(2*pi*i*p/q), computed
  as exp(2*pi*i*p*(n mod q)/q) so that periodicity is exact.
* ``SignedResidue``: u(n) = signs[n mod period], a plain periodic table.

``recursion_profile`` extracts the data (v(0..B-1), n0) of the weak digit
recursion u(B*n + k) = u(n) * v(k) for n >= 1, verifies it on a range, and
derives the partial sums of v and the growth exponent used by the tail
models downstream.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import cached_property
from math import log

import numpy as np

from .digits import DigitStat, check_base, digit_stat, digit_stat_block
from .errors import (
    ConvergenceHypothesisViolated,
    HypothesisFailed,
    NoNonzeroSeed,
    ValidationError,
)

__all__ = [
    "StronglyMultiplicative",
    "DigitStatPower",
    "PeriodicPower",
    "SignedResidue",
    "ExponentSeq",
    "thue_morse_seq",
    "RecursionProfile",
    "recursion_profile",
    "StrongMultReport",
    "verify_strong_mult",
]

CHECK_TOL = 1e-12


def _as_complex_tuple(values) -> tuple[complex, ...]:
    return tuple(complex(v) for v in values)


def _int_power_table(w: complex, m_max: int, real: bool) -> np.ndarray:
    """Powers w**0 .. w**m_max by iterated multiplication (no branch cuts)."""
    if real:
        out = np.empty(m_max + 1, dtype=np.float64)
        out[0] = 1.0
        wr = w.real
        for m in range(1, m_max + 1):
            out[m] = out[m - 1] * wr
    else:
        out = np.empty(m_max + 1, dtype=np.complex128)
        out[0] = 1.0
        for m in range(1, m_max + 1):
            out[m] = out[m - 1] * w
    return out


def _int_power(w: complex, m: int, real: bool) -> complex:
    acc = 1.0 if real else complex(1.0)
    base = w.real if real else w
    for _ in range(m):
        acc = acc * base
    return complex(acc)


@dataclass(frozen=True)
class StronglyMultiplicative:
    """Sequence defined by a table u(1), ..., u(B-1); u(0) = 1 is implicit."""

    base: int
    values: tuple[complex, ...]

    def __init__(self, base: int, values):
        object.__setattr__(self, "base", check_base(base))
        vals = _as_complex_tuple(values)
        if len(vals) != self.base - 1:
            raise ValidationError(
                f"table needs {self.base - 1} values for base {self.base}, "
                f"got {len(vals)}"
            )
        object.__setattr__(self, "values", vals)

    @cached_property
    def is_real(self) -> bool:
        return all(v.imag == 0.0 for v in self.values)

    @cached_property
    def _table(self) -> np.ndarray:
        dtype = np.float64 if self.is_real else np.complex128
        full = np.ones(self.base, dtype=dtype)
        for k, v in enumerate(self.values, start=1):
            full[k] = v.real if self.is_real else v
        return full

    def value(self, n: int) -> complex:
        out = complex(1.0)
        n = int(n)
        while n > 0:
            n, d = divmod(n, self.base)
            if d:
                out *= self.values[d - 1]
        return out

    def block(self, ns: np.ndarray) -> np.ndarray:
        x = np.asarray(ns, dtype=np.int64).copy()
        out = np.ones(x.shape, dtype=self._table.dtype)
        while (x > 0).any():
            out *= self._table[x % self.base]
            x //= self.base
        return out

    def describe(self) -> str:
        return f"table(base={self.base})"


@dataclass(frozen=True)
class DigitStatPower:
    """u(n) = w ** stat(n) for a digit statistic in the sequence's base."""

    base: int
    w: complex
    stat: DigitStat

    def __init__(self, base: int, w, stat: DigitStat):
        object.__setattr__(self, "base", check_base(base))
        object.__setattr__(self, "w", complex(w))
        stat.check_for_base(self.base)
        object.__setattr__(self, "stat", stat)

    @cached_property
    def is_real(self) -> bool:
        return self.w.imag == 0.0

    def _powers_up_to(self, m_max: int) -> np.ndarray:
        return _int_power_table(self.w, m_max, self.is_real)

    def value(self, n: int) -> complex:
        return _int_power(self.w, digit_stat(n, self.stat, self.base), self.is_real)

    def block(self, ns: np.ndarray) -> np.ndarray:
        stats = digit_stat_block(ns, self.stat, self.base)
        table = self._powers_up_to(int(stats.max(initial=0)))
        return table[stats]

    def describe(self) -> str:
        return f"{self.w}^{self.stat.describe()}(base={self.base})"


@dataclass(frozen=True)
class PeriodicPower:
    """u(n) = omega**n with omega = exp(2*pi*i*p/q)."""

    base: int
    q: int
    p: int

    def __init__(self, base: int, q: int, p: int):
        object.__setattr__(self, "base", check_base(base))
        q, p = int(q), int(p)
        if not q > p > 0:
            raise ValidationError(f"need q > p > 0, got q={q}, p={p}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @cached_property
    def is_real(self) -> bool:
        return 2 * self.p == self.q  # omega = -1

    @cached_property
    def _table(self) -> np.ndarray:
        rs = np.arange(self.q)
        tab = np.exp(2j * np.pi * self.p * rs / self.q)
        if self.is_real:
            return np.where(rs % 2 == 0, 1.0, -1.0)
        return tab

    def value(self, n: int) -> complex:
        r = int(n) % self.q
        if self.is_real:
            return complex(1.0 if r % 2 == 0 else -1.0)
        return cmath.exp(2j * cmath.pi * self.p * r / self.q)

    def block(self, ns: np.ndarray) -> np.ndarray:
        return self._table[np.asarray(ns, dtype=np.int64) % self.q]

    def describe(self) -> str:
        return f"exp(2*pi*i*{self.p}*n/{self.q})(base={self.base})"


@dataclass(frozen=True)
class SignedResidue:
    """u(n) = signs[n mod period]; covers hand-written periodic exponents."""

    base: int
    signs: tuple[complex, ...]

    def __init__(self, base: int, signs):
        object.__setattr__(self, "base", check_base(base))
        vals = _as_complex_tuple(signs)
        if not vals:
            raise ValidationError("signs table must be nonempty")
        object.__setattr__(self, "signs", vals)

    @property
    def period(self) -> int:
        return len(self.signs)

    @cached_property
    def is_real(self) -> bool:
        return all(v.imag == 0.0 for v in self.signs)

    @cached_property
    def _table(self) -> np.ndarray:
        dtype = np.float64 if self.is_real else np.complex128
        return np.array(
            [v.real if self.is_real else v for v in self.signs], dtype=dtype
        )

    def value(self, n: int) -> complex:
        return self.signs[int(n) % self.period]

    def block(self, ns: np.ndarray) -> np.ndarray:
        return self._table[np.asarray(ns, dtype=np.int64) % self.period]

    def describe(self) -> str:
        return f"period{list(self.signs)}(base={self.base})"


ExponentSeq = StronglyMultiplicative | DigitStatPower | PeriodicPower | SignedResidue


def thue_morse_seq() -> DigitStatPower:
    """The +-1 sequence (-1)**(number of binary ones of n)."""
    return DigitStatPower(2, -1, DigitStat.count(1))


@dataclass(frozen=True)
class StrongMultReport:
    passed: bool
    checked: int
    max_deviation: float
    first_failure: tuple[int, int] | None  # (n, k), lexicographically first

    def __bool__(self) -> bool:
        return self.passed


def verify_strong_mult(seq: ExponentSeq, limit: int) -> StrongMultReport:
    """Check u(0) = 1 and u(B*n + k) = u(n) * u(k) for all B*n + k <= limit.

    A failing check is a report, not an error.
    """
    base = seq.base
    if limit < base:
        raise ValidationError(f"limit must be >= base, got {limit} < {base}")
    u = seq.block(np.arange(limit + 1, dtype=np.int64))
    failures: list[tuple[int, int, float]] = []
    dev0 = abs(u[0] - 1.0)
    if dev0 > CHECK_TOL:
        failures.append((0, 0, float(dev0)))
    max_dev = float(dev0)
    n_max = limit // base
    ns = np.arange(0, n_max + 1, dtype=np.int64)
    for k in range(base):
        idx = base * ns + k
        sel = idx <= limit
        dev = np.abs(u[idx[sel]] - u[ns[sel]] * u[k])
        if dev.size == 0:
            continue
        max_dev = max(max_dev, float(dev.max()))
        bad = np.nonzero(dev > CHECK_TOL)[0]
        if bad.size:
            n_bad = int(ns[sel][bad[0]])
            failures.append((n_bad, k, float(dev[bad[0]])))
    if failures:
        # lexicographically first (n, k)
        n, k, _ = min(failures)
        return StrongMultReport(False, limit, max_dev, (n, k))
    return StrongMultReport(True, limit, max_dev, None)


@dataclass(frozen=True)
class RecursionProfile:
    """Verified data of the digit recursion u(B*n + k) = u(n) * v(k), n >= 1.

    ``v_prefix`` holds the partial sums (0, v(0), v(0)+v(1), ...); its last
    entry is the full sum, whose modulus must stay below ``base`` for the
    products downstream to converge.  ``alpha`` is the growth exponent of the
    partial sums of u: 1/2 when |sum v| <= 1, else log|sum v| / log base.
    """

    base: int
    v: tuple[complex, ...]
    n0: int
    v_prefix: tuple[complex, ...]
    alpha: float
    u_bounded: bool
    v_bounded: bool
    checked: int

    @property
    def v_total(self) -> complex:
        return self.v_prefix[-1]

    def require_unit_bounds(self) -> None:
        if not self.u_bounded:
            raise ValidationError("sequence values exceed modulus 1")
        if not self.v_bounded:
            raise ValidationError("recursion multipliers v(k) exceed modulus 1")


def recursion_profile(
    seq: ExponentSeq,
    limit: int = 4096,
    base: int | None = None,
    seed_start: int | None = None,
) -> RecursionProfile:
    """Extract and verify the digit recursion profile of ``seq``.

    ``base`` defaults to the sequence's own base but may differ (a sequence
    can satisfy the recursion in a higher base as well).  Raises
    NoNonzeroSeed when every candidate seed value vanishes, HypothesisFailed
    when the recursion breaks, and ConvergenceHypothesisViolated when
    |sum v(k)| >= base.
    """
    b = check_base(base if base is not None else seq.base)
    limit = int(limit)
    if limit < b * b:
        raise ValidationError(f"limit must be >= base**2, got {limit} < {b * b}")
    # reading v(0..B-1) off a seed n0 >= B needs values up to B*n0 + B - 1
    limit = max(limit, b * (b + 1))

    u = seq.block(np.arange(limit + 1, dtype=np.int64))

    lo = max(b, int(seed_start) if seed_start is not None else b)
    hi = min((limit - b + 1) // b, b + 64 * b)
    n0 = None
    for cand in range(lo, hi + 1):
        if abs(u[cand]) > CHECK_TOL:
            n0 = cand
            break
    if n0 is None:
        raise NoNonzeroSeed(
            f"no nonzero value in seed window [{lo}, {hi}] "
            "(sequence may be 1, 0, 0, ... or the window too short)"
        )

    v = tuple(complex(u[b * n0 + k] / u[n0]) for k in range(b))

    n_max = limit // b
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    worst: tuple[int, int, float] | None = None
    for k in range(b):
        idx = b * ns + k
        sel = idx <= limit
        dev = np.abs(u[idx[sel]] - u[ns[sel]] * v[k])
        bad = np.nonzero(dev > CHECK_TOL)[0]
        if bad.size:
            n_bad = int(ns[sel][bad[0]])
            if worst is None or (n_bad, k) < worst[:2]:
                worst = (n_bad, k, float(dev[bad[0]]))
    if worst is not None:
        raise HypothesisFailed(*worst)

    u_bounded = bool(np.abs(u).max() <= 1.0 + CHECK_TOL)
    v_bounded = all(abs(val) <= 1.0 + CHECK_TOL for val in v)

    prefix = [complex(0.0)]
    for val in v:
        prefix.append(prefix[-1] + val)
    total = prefix[-1]
    if abs(total) >= b - 1e-9:
        raise ConvergenceHypothesisViolated(
            f"|sum of v(k)| = {abs(total):.6g} >= base {b}; "
            "the associated products may diverge"
        )
    alpha = 0.5 if abs(total) <= 1.0 else log(abs(total)) / log(b)

    return RecursionProfile(
        base=b,
        v=v,
        n0=n0,
        v_prefix=tuple(prefix),
        alpha=float(alpha),
        u_bounded=u_bounded,
        v_bounded=v_bounded,
        checked=limit,
    )
