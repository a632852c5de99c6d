"""Numerical evaluation of products of (B*n+k)/(B*n+k+1) factors.

A ``ProductSpec`` bundles a base B, a set of residue factors (k, multiplier,
start index) and one exponent sequence u; it denotes

    prod_k prod_{n >= start_k} ((B*n + k) / (B*n + k + 1)) ** (c_k * u(n)).

Each factor's log-series is summed over blocks with all logs taken of
positive rationals, so complex exponents only ever multiply real logs and no
branch cuts arise.  Two summation paths are provided:

* ``evaluate_direct``: plain truncation of the log-series.
* ``evaluate_abel``: summation by parts.  The partial sums F(n) of the
  exponent sequence turn the series into decaying-difference form and the
  boundary term F(N)*a_N yields an error estimate.  Optionally the tail is
  fitted from the partial sums one digit level apart (N/B and N): it
  contracts by the ratio lambda = sum(v)/B per level, with modulus
  B**(alpha - 1), or by 1/B when the partial sums stay bounded; the fitted
  tail is subtracted.

Truncation indices are rounded up to a multiple of B so every residue class
sees the same number of blocks.  Block sums are reduced in a fixed order
with exact float summation, so results are bit-reproducible regardless of
the thread count.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import fsum, log1p
from os import cpu_count

import numpy as np

from .digits import check_base
from .errors import DomainError, ValidationError
from .sequences import ExponentSeq, RecursionProfile, recursion_profile

__all__ = [
    "Factor",
    "ProductSpec",
    "EvalResult",
    "log_ratio_term",
    "evaluate_direct",
    "evaluate_abel",
    "TelescopeReport",
    "telescoping_check",
    "SplitReport",
    "residue_split_check",
]

_BLOCK = 1 << 19


def _fsum_c(values) -> complex:
    vals = [complex(v) for v in values]
    return complex(fsum(v.real for v in vals), fsum(v.imag for v in vals))


def log_ratio_term(base: int, residue: int, n: int) -> float:
    """log((B*n + k) / (B*n + k + 1)), always negative, accurate for large n."""
    x = base * n + residue
    if x < 1:
        raise DomainError(f"B*n + k = {x} < 1 (base={base}, k={residue}, n={n})")
    return -log1p(1.0 / x)


def _log_ratio_block(base: int, residue: int, ns: np.ndarray) -> np.ndarray:
    return -np.log1p(1.0 / (base * ns + residue))


@dataclass(frozen=True)
class Factor:
    """One residue class k with exponent multiplier c_k and start index.

    The start index defaults to 1 for k = 0 (the n = 0 numerator vanishes)
    and 0 otherwise; explicit overrides are allowed for exotic products but
    never below 1 when k = 0.
    """

    residue: int
    multiplier: complex = 1.0
    start: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "residue", int(self.residue))
        object.__setattr__(self, "multiplier", complex(self.multiplier))
        start = self.start
        if start is None:
            start = 1 if self.residue == 0 else 0
        start = int(start)
        if self.residue == 0 and start < 1:
            raise ValidationError("residue-0 factors must start at n >= 1")
        if start < 0:
            raise ValidationError(f"start must be nonnegative, got {start}")
        object.__setattr__(self, "start", start)


@dataclass(frozen=True)
class ProductSpec:
    base: int
    factors: tuple[Factor, ...]
    seq: ExponentSeq

    def __init__(self, base: int, factors, seq: ExponentSeq):
        object.__setattr__(self, "base", check_base(base))
        fs = tuple(
            f if isinstance(f, Factor) else Factor(*f) for f in factors
        )
        if not fs:
            raise ValidationError("a product needs at least one factor")
        residues = [f.residue for f in fs]
        if len(set(residues)) != len(residues):
            raise ValidationError(f"duplicate residues in {residues}")
        for f in fs:
            if not 0 <= f.residue < self.base:
                raise ValidationError(
                    f"residue {f.residue} out of range for base {self.base}"
                )
        object.__setattr__(self, "factors", fs)
        object.__setattr__(self, "seq", seq)


@dataclass(frozen=True)
class EvalResult:
    log_value: complex
    value: complex
    err_est: float
    terms: int
    method: str

    def to_json_dict(self) -> dict:
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "log_re": self.log_value.real,
            "log_im": self.log_value.imag,
            "err_est": self.err_est,
            "terms": self.terms,
            "method": self.method,
        }


def _round_up_terms(n_terms: int, base: int) -> int:
    # balanced truncation: same number of blocks per residue class
    if n_terms < base:
        return n_terms
    return -(-n_terms // base) * base


def _block_edges(n_terms: int, snapshot: int | None) -> list[int]:
    edges = {1, n_terms}
    edges.update(range(_BLOCK, n_terms, _BLOCK))
    # keep a distinct trailing block so last-block error estimates mean something
    edges.add(max(1, n_terms - max(n_terms // 8, 1)))
    if snapshot is not None and 1 < snapshot < n_terms:
        edges.add(snapshot)
    return sorted(edges)


def _map_blocks(worker, spans, threads: int):
    if threads == 0:
        threads = min(8, cpu_count() or 1)
    if threads <= 1 or len(spans) <= 1:
        return [worker(s, e) for s, e in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda se: worker(*se), spans))


@dataclass
class _FactorTotals:
    sum_at: dict[int, complex]  # truncation index -> factor log-sum
    last_a: dict[int, float]  # truncation index -> a_{N-1}
    last_block: complex = 0.0  # final block's direct contribution (naive mode)


@dataclass
class _EngineOut:
    totals: list[_FactorTotals]
    f_at: dict[int, complex]  # truncation index -> F(index)
    f_edge_max: float


def _engine(spec: ProductSpec, n_terms: int, snapshot: int | None,
            abel: bool, threads: int) -> _EngineOut:
    """Per-factor log-sums over [start_k, N), optionally also at a snapshot."""
    base, seq, factors = spec.base, spec.seq, spec.factors
    u0 = seq.value(0)
    marks = [n_terms] if snapshot is None else [snapshot, n_terms]

    # scalar corrections: the n = 0 term for start-0 factors, and removal of
    # n in [1, start) for factors that begin later
    def corrections(upto: int) -> list[complex]:
        out = []
        for f in factors:
            c = complex(0.0)
            if f.start == 0 and upto > 0:
                c += u0 * log_ratio_term(base, f.residue, 0)
            for n in range(1, min(f.start, upto)):
                c -= seq.value(n) * log_ratio_term(base, f.residue, n)
            out.append(c)
        return out

    if n_terms <= 1:
        totals = [
            _FactorTotals({m: corr for m in marks}, {m: 0.0 for m in marks}, corr)
            for corr in corrections(n_terms)
        ]
        f1 = u0 if n_terms >= 1 else complex(0.0)
        return _EngineOut(totals, {m: f1 for m in marks}, abs(f1))

    edges = _block_edges(n_terms, snapshot)
    spans = list(zip(edges[:-1], edges[1:]))

    def worker(s: int, e: int):
        ns = np.arange(s, e, dtype=np.int64)
        u = seq.block(ns)
        usum = complex(u.sum())
        if abel:
            cum = np.cumsum(u)
            shifted = cum - u  # prefix sums within the block, F(n) - F(s)
        per_factor = []
        for f in factors:
            a = _log_ratio_block(base, f.residue, ns)
            if abel:
                d = np.empty_like(a)
                if s == 1:
                    d[0] = 0.0  # n = 1 is handled by the boundary term
                else:
                    d[0] = log_ratio_term(base, f.residue, s - 1) - a[0]
                d[1:] = a[:-1] - a[1:]
                i0 = 1 if s == 1 else 0
                sum_d = complex(d[i0:].sum())
                wsum = complex(np.dot(shifted[i0:], d[i0:]))
                a_first = float(a[0]) if s == 1 else 0.0
                per_factor.append((sum_d, wsum, float(a[-1]), a_first))
            else:
                per_factor.append((complex(np.dot(u, a)), float(a[-1])))
        return usum, per_factor

    results = _map_blocks(worker, spans, threads)
    usums = [r[0] for r in results]

    # F at block edges: F(1) = u(0), then running exact prefix sums
    carries = [complex(u0)]
    for i in range(len(usums)):
        carries.append(_fsum_c([u0, *usums[: i + 1]]))
    f_at = {}
    for m in marks:
        f_at[m] = carries[edges.index(m)]
    f_edge_max = max(abs(c) for c in carries)

    corr_at = {m: corrections(m) for m in marks}
    totals = []
    for j in range(len(factors)):
        sum_at: dict[int, complex] = {}
        last_a: dict[int, float] = {}
        last_block = complex(0.0)
        if abel:
            a1 = results[0][1][j][3]
            contribs = []
            for i, (_, per_factor) in enumerate(results):
                sum_d, wsum, _, _ = per_factor[j]
                contribs.append(carries[i] * sum_d + wsum)
            for m in marks:
                upto = edges.index(m)
                core = _fsum_c(contribs[:upto])
                alast = results[upto - 1][1][j][2]
                sum_at[m] = core - u0 * a1 + f_at[m] * alast + corr_at[m][j]
                last_a[m] = alast
        else:
            dots = [res[1][j][0] for res in results]
            for m in marks:
                upto = edges.index(m)
                sum_at[m] = _fsum_c(dots[:upto]) + corr_at[m][j]
                last_a[m] = results[upto - 1][1][j][1]
            last_block = dots[-1]
        totals.append(_FactorTotals(sum_at, last_a, last_block))
    return _EngineOut(totals, f_at, f_edge_max)


def _combine(spec: ProductSpec, out: _EngineOut, mark: int) -> complex:
    return _fsum_c(
        f.multiplier * t.sum_at[mark] for f, t in zip(spec.factors, out.totals)
    )


def _boundary_scale(spec: ProductSpec, out: _EngineOut, mark: int) -> float:
    fmax = max(out.f_edge_max, abs(out.f_at[mark]))
    return fmax * sum(
        abs(f.multiplier) * abs(t.last_a[mark])
        for f, t in zip(spec.factors, out.totals)
    )


def evaluate_direct(spec: ProductSpec, n_terms: int, threads: int = 1) -> EvalResult:
    """Truncate each factor's log-series at n_terms and exponentiate.

    The error estimate is the magnitude of the final block's contribution;
    for conditionally convergent exponents it is only indicative.
    """
    if n_terms < 0:
        raise ValidationError(f"n_terms must be nonnegative, got {n_terms}")
    n = _round_up_terms(int(n_terms), spec.base)
    out = _engine(spec, n, None, abel=False, threads=threads)
    log_value = _combine(spec, out, n)
    err = abs(
        _fsum_c(
            f.multiplier * t.last_block for f, t in zip(spec.factors, out.totals)
        )
    )
    return EvalResult(log_value, cmath.exp(log_value), err, n, "naive")


def evaluate_abel(
    spec: ProductSpec,
    n_terms: int,
    extrapolate: bool = True,
    threads: int = 1,
    profile: RecursionProfile | None = None,
) -> EvalResult:
    """Evaluate via summation by parts, optionally with tail extrapolation.

    Requires the exponent sequence to admit a recursion profile over the
    product's base with |sum v(k)| < B (raises ConvergenceHypothesisViolated
    otherwise, before any series work).  With ``extrapolate`` the tail is
    modeled as c * N**e, where e = alpha - 1 when |sum v(k)| > 1 and e = -1
    when the partial sums are bounded or grow only logarithmically; the
    fitted tail is subtracted and its magnitude dominates the error estimate.
    """
    base = spec.base
    if n_terms < base:
        raise ValidationError(f"n_terms must be >= base, got {n_terms}")
    if profile is None:
        profile = recursion_profile(
            spec.seq, limit=max(4096, base * (base + 1)), base=base
        )
    elif profile.base != base:
        raise ValidationError(
            f"profile base {profile.base} does not match product base {base}"
        )
    profile.require_unit_bounds()

    n = _round_up_terms(int(n_terms), base)
    # snapshot one digit level below N: the tail contracts by the complex
    # ratio lambda = sum(v)/B per level (modulus B**(alpha-1)); when the
    # partial sums stay bounded or grow only logarithmically the tail is
    # plain c/N and lambda degenerates to 1/B
    prev = (n // (base * base)) * base
    use_extrap = extrapolate and base <= prev < n
    snapshot = prev if use_extrap else None

    out = _engine(spec, n, snapshot, abel=True, threads=threads)
    log_n = _combine(spec, out, n)

    if not use_extrap:
        err = _boundary_scale(spec, out, n)
        return EvalResult(log_n, cmath.exp(log_n), err, n, "abel")

    log_prev = _combine(spec, out, prev)
    g_total = profile.v_total
    lam = g_total / base if abs(g_total) > 1.0 else complex(1.0 / base)
    tail = (log_n - log_prev) * (lam / (1.0 - lam))
    log_value = log_n + tail
    err = abs(tail) + _boundary_scale(spec, out, n)
    return EvalResult(log_value, cmath.exp(log_value), err, n, "abel+extrapolation")


@dataclass(frozen=True)
class TelescopeReport:
    passed: bool
    checked: int
    max_pointwise_dev: float  # sum_k a(n,k) vs log(n/(n+1)), n >= 1
    head_dev: float  # sum_{0<k<B} log(k/(k+1)) vs -log B
    weighted_dev: float  # full u-weighted merge identity

    def __bool__(self) -> bool:
        return self.passed


def telescoping_check(seq: ExponentSeq, n_limit: int, tol: float = 1e-12) -> TelescopeReport:
    """Exact finite telescoping: the B residue logs at each n merge into one.

    Checks, for n in [1, n_limit): sum_k log((Bn+k)/(Bn+k+1)) = log(n/(n+1)),
    and for n = 0 over k >= 1: the sum is -log B.  Also checks the u-weighted
    sum-level consequence.
    """
    base = seq.base
    if n_limit < 1:
        raise ValidationError(f"n_limit must be >= 1, got {n_limit}")
    u_all = seq.block(np.arange(0, base * n_limit, dtype=np.int64))
    if np.abs(u_all).max() > 1.0 + 1e-12:
        raise ValidationError("|u(n)| <= 1 is required on [0, B*n_limit)")

    head = fsum(log_ratio_term(base, k, 0) for k in range(1, base))
    head_dev = abs(head + math.log(base))

    max_dev = 0.0
    weighted_lhs_parts: list[complex] = []
    weighted_rhs_parts: list[complex] = []
    for s in range(1, n_limit, _BLOCK):
        e = min(s + _BLOCK, n_limit)
        ns = np.arange(s, e, dtype=np.int64)
        total = np.zeros(e - s, dtype=np.float64)
        for k in range(base):
            total += _log_ratio_block(base, k, ns)
        rhs = -np.log1p(1.0 / ns)
        max_dev = max(max_dev, float(np.abs(total - rhs).max()))
        un = u_all[s:e]
        weighted_lhs_parts.append(complex(np.dot(un, total)))
        weighted_rhs_parts.append(complex(np.dot(un, rhs)))
    u0 = complex(u_all[0])
    weighted_lhs = _fsum_c(weighted_lhs_parts) + u0 * head
    weighted_rhs = _fsum_c(weighted_rhs_parts) - u0 * math.log(base)
    weighted_dev = abs(weighted_lhs - weighted_rhs)

    passed = max_dev <= tol and head_dev <= tol and weighted_dev <= tol * max(
        1.0, abs(weighted_rhs)
    )
    return TelescopeReport(passed, n_limit, max_dev, head_dev, weighted_dev)


@dataclass(frozen=True)
class SplitReport:
    passed: bool
    checked: int
    split_dev: float  # regrouping by residue class, an exact rearrangement
    substitution_dev: float  # u(B*n + k) vs u(n) * v(k) on the grouped side

    def __bool__(self) -> bool:
        return self.passed


def residue_split_check(
    seq: ExponentSeq,
    n_limit: int,
    base: int | None = None,
    profile: RecursionProfile | None = None,
    tol: float = 1e-12,
) -> SplitReport:
    """Finite form of the mod-B split of sum u(m) log(m/(m+1)).

    Both sides enumerate exactly the same terms, so with exact summation the
    deviation is at float level; the recursion substitution is then checked
    on the grouped side.
    """
    b = check_base(base if base is not None else seq.base)
    if n_limit < 1:
        raise ValidationError(f"n_limit must be >= 1, got {n_limit}")
    if profile is None:
        profile = recursion_profile(
            seq, limit=max(4096, b * (b + 1), b * n_limit // 4), base=b
        )

    u_all = seq.block(np.arange(0, b * n_limit, dtype=np.int64))

    lhs_parts = []
    for s in range(1, b * n_limit, _BLOCK):
        e = min(s + _BLOCK, b * n_limit)
        ms = np.arange(s, e, dtype=np.int64)
        lhs_parts.append(complex(np.dot(u_all[s:e], -np.log1p(1.0 / ms))))
    lhs = _fsum_c(lhs_parts)

    rhs_parts = []
    sub_dev = 0.0
    for k in range(b):
        start = 1 if k == 0 else 0
        ns = np.arange(start, n_limit, dtype=np.int64)
        a = _log_ratio_block(b, k, ns)
        u_grouped = u_all[b * ns + k]
        rhs_parts.append(complex(np.dot(u_grouped, a)))
        ns_pos = ns[ns >= 1]
        dev = np.abs(u_all[b * ns_pos + k] - u_all[ns_pos] * profile.v[k])
        if dev.size:
            sub_dev = max(sub_dev, float(dev.max()))
    rhs = _fsum_c(rhs_parts)

    split_dev = abs(lhs - rhs)
    passed = split_dev <= tol * max(1.0, abs(lhs)) and sub_dev <= tol
    return SplitReport(passed, n_limit, split_dev, sub_dev)
