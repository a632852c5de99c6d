"""Partial sums F(N) = sum_{n < N} u(n): direct, recursive, and growth checks.

The recursive evaluator peels base-B digits using the identity

    F(B*M + b) = F(B) + (F(M) - u(0)) * S + u(M) * G(b),

where S is the full sum of the recursion multipliers v(k) and G(b) their
partial sum below b.  F(B) and u(0) come from direct evaluation since the
recursion constrains only n >= 1.  Cost is O(log^2 N).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .errors import ProfileMismatch, ValidationError
from .sequences import ExponentSeq, RecursionProfile

__all__ = [
    "partial_sum_direct",
    "partial_sum_recursive",
    "GrowthReport",
    "growth_check",
]

_BLOCK = 1 << 19


def partial_sum_direct(seq: ExponentSeq, n: int) -> complex:
    """F(n) by direct summation, O(n) with vectorized blocks."""
    n = int(n)
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n}")
    total = complex(0.0)
    for s in range(0, n, _BLOCK):
        e = min(s + _BLOCK, n)
        total += complex(seq.block(np.arange(s, e, dtype=np.int64)).sum())
    return total


def _spot_check(profile: RecursionProfile, seq: ExponentSeq, n: int) -> None:
    b = profile.base
    for m in {profile.n0, profile.n0 + 1, max(1, n // b), max(1, n // (b * b))}:
        um = seq.value(m)
        for k in (0, b - 1):
            dev = abs(seq.value(b * m + k) - um * profile.v[k])
            if dev > 1e-9:
                raise ProfileMismatch(
                    f"recursion fails at n={m}, k={k} (deviation {dev:.3e})"
                )


def partial_sum_recursive(
    profile: RecursionProfile, seq: ExponentSeq, n: int
) -> complex:
    """F(n) via the digit-peeling recursion; equals partial_sum_direct."""
    n = int(n)
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n}")
    b = profile.base
    _spot_check(profile, seq, n)
    u0 = seq.value(0)
    fb = complex(sum(seq.value(k) for k in range(b)))
    s_total = profile.v_total
    g = profile.v_prefix

    def rec(m: int) -> complex:
        if m < b:
            return complex(sum(seq.value(i) for i in range(m)))
        mq, r = divmod(m, b)
        return fb + (rec(mq) - u0) * s_total + seq.value(mq) * g[r]

    return rec(n)


@dataclass(frozen=True)
class GrowthReport:
    """Empirical constants for the growth bound |F(N)| < C * N**alpha."""

    alpha: float
    c_est: float
    passed: bool
    ratios: tuple[float, ...]
    c_log_est: float | None  # max |F(N)| / log N, only when |sum v| <= 1

    def __bool__(self) -> bool:
        return self.passed


def growth_check(
    profile: RecursionProfile,
    seq: ExponentSeq,
    checkpoints,
    slack: float = 1.25,
) -> GrowthReport:
    """Check |F(N)| / N**alpha stays bounded along increasing checkpoints.

    The bound is asymptotic, so the envelope is judged after the first
    quartile of checkpoints: no later ratio may exceed the early envelope by
    more than ``slack``.
    """
    pts = [int(p) for p in checkpoints]
    if not pts or any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValidationError("checkpoints must be nonempty and increasing")
    alpha = profile.alpha
    fs = [abs(partial_sum_recursive(profile, seq, p)) for p in pts]
    ratios = tuple(f / p**alpha for f, p in zip(fs, pts))
    c_log = None
    if abs(profile.v_total) <= 1.0:
        c_log = max(f / log(p) for f, p in zip(fs, pts) if p > 1)
    q1 = max(1, len(pts) // 4)
    early = max(ratios[:q1])
    late = max(ratios[q1:]) if len(ratios) > q1 else early
    c_est = max(late, early)
    passed = late <= slack * early
    return GrowthReport(
        alpha=alpha, c_est=c_est, passed=passed, ratios=ratios, c_log_est=c_log
    )
