"""Catalog of closed-form product identities and the verification harness.

Each ``IdentityClaim`` pairs one or more product specifications with a
closed-form right-hand side.  Complex-exponent specifications double as
carriers for sine/cosine exponent pairs: the sine product is a real part of
the complex log-sum and the cosine product an imaginary part, so one
evaluation serves both members of a pair (and their squared variants).

``estimate_qr`` computes the two classical open-valued products over the
+-1 parity-of-binary-ones exponent: Q over (2n)/(2n+1) from n >= 1, and R
over (4n+1)(4n+2)/((4n)(4n+3)).  No closed form is known for either; the
catalogued fact is Q * R = 3/2.
"""

from __future__ import annotations

import cmath
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import fsum
from threading import Lock

import numpy as np

from .digits import DigitStat, thue_morse_block
from .errors import ValidationError
from .gammaproducts import GammaQuotient, alternating_pair_quotient, quotient_limit
from .products import (
    EvalResult,
    Factor,
    ProductSpec,
    evaluate_abel,
    evaluate_direct,
    log_ratio_term,
)
from .sequences import DigitStatPower, PeriodicPower, thue_morse_seq

__all__ = [
    "ClosedForm",
    "Part",
    "IdentityClaim",
    "catalog",
    "VerifyReport",
    "verify_claim",
    "VerifySummary",
    "verify_all",
    "estimate_qr",
    "MergeSplitReport",
    "merge_split_check",
]


@dataclass(frozen=True)
class ClosedForm:
    """Right-hand side of a claim: B**e, p/q, 1, an explicit value, or a
    Gamma quotient."""

    kind: str
    exponent: complex = 0.0
    numer: int = 0
    denom: int = 1
    quotient: GammaQuotient | None = None
    label: str = ""

    @staticmethod
    def power_of_base(exponent) -> "ClosedForm":
        return ClosedForm("power_of_base", exponent=complex(exponent))

    @staticmethod
    def rational(numer: int, denom: int) -> "ClosedForm":
        return ClosedForm("rational", numer=int(numer), denom=int(denom))

    @staticmethod
    def one() -> "ClosedForm":
        return ClosedForm("one")

    @staticmethod
    def gamma_ref(quotient: GammaQuotient, label: str = "") -> "ClosedForm":
        return ClosedForm("gamma_quotient", quotient=quotient, label=label)

    def value(self, base: int) -> complex:
        if self.kind == "power_of_base":
            return cmath.exp(self.exponent * math.log(base))
        if self.kind == "rational":
            return complex(self.numer / self.denom)
        if self.kind == "one":
            return complex(1.0)
        if self.kind == "gamma_quotient":
            return complex(quotient_limit(self.quotient))
        raise ValidationError(f"unknown closed form {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "power_of_base":
            e = self.exponent
            return f"B**({e.real:g})" if e.imag == 0 else f"B**({e})"
        if self.kind == "rational":
            return f"{self.numer}/{self.denom}"
        if self.kind == "one":
            return "1"
        return self.label or "gamma quotient"


@dataclass(frozen=True)
class Part:
    """One evaluated product contributing coeff * component(log) to a claim."""

    spec: ProductSpec
    coeff: complex = 1.0
    component: str = "full"  # "full" | "real" | "imag"

    def contribution(self, log_value: complex) -> complex:
        if self.component == "full":
            return self.coeff * log_value
        if self.component == "real":
            return self.coeff * log_value.real
        if self.component == "imag":
            return self.coeff * log_value.imag
        raise ValidationError(f"unknown component {self.component!r}")


@dataclass(frozen=True)
class IdentityClaim:
    name: str
    base: int
    parts: tuple[Part, ...]
    rhs: ClosedForm
    cite: str
    tol: float
    cost_hint: int = 10**6
    note: str = ""

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError(f"tolerance must be positive, got {self.tol}")


def _tm():
    return thue_morse_seq()


def _odd_residues(base: int) -> list[int]:
    return list(range(1, base, 2))


def _unity_root(q: int, p: int = 1) -> complex:
    return cmath.exp(2j * cmath.pi * p / q)


def _roots_spec(base: int, q: int, p: int = 1) -> ProductSpec:
    omega = _unity_root(q, p)
    factors = [
        Factor(k, 1 - omega**k) for k in range(1, base) if k % q != 0
    ]
    return ProductSpec(base, factors, PeriodicPower(base, q, p))


def _digit_sum_root_spec(base: int, q: int, p: int = 1) -> ProductSpec:
    omega = _unity_root(q, p)
    factors = [
        Factor(k, 1 - omega**k) for k in range(1, base) if k % q != 0
    ]
    return ProductSpec(base, factors, DigitStatPower(base, omega, DigitStat.digit_sum()))


def _count_root_spec(base: int, digits, q: int, p: int = 1) -> ProductSpec:
    omega = _unity_root(q, p)
    js = sorted(digits)
    factors = [Factor(k, 1 - omega) for k in js]
    stat = DigitStat.count(js[0]) if len(js) == 1 else DigitStat.count_set(js)
    return ProductSpec(base, factors, DigitStatPower(base, omega, stat))


def _zero_count_spec(base: int, z: complex, scaled: bool) -> ProductSpec:
    z = complex(z)
    if z in (0, 1) or abs(z) > 1:
        raise ValidationError("zero-count exponents need |z| <= 1, z not in {0, 1}")
    mult = (1 - z) if scaled else 1.0
    seq = DigitStatPower(base, z, DigitStat.count(0))
    return ProductSpec(base, [Factor(0, mult)], seq)


def catalog() -> list[IdentityClaim]:
    """All catalogued claims, cheapest-to-hardest tolerances pinned per class:
    1e-5 for bounded-partial-sum exponents, 1e-4 for unit-modulus root
    exponents, 5e-4 for real powers with growth exponent up to ~0.6."""
    claims: list[IdentityClaim] = []

    def add(name, base, parts, rhs, cite, tol, note=""):
        claims.append(
            IdentityClaim(name, base, tuple(parts), rhs, cite, tol, note=note)
        )

    sqrt3 = math.sqrt(3.0)

    # the parity-of-ones prototype and its squared form
    wr_spec = ProductSpec(2, [Factor(1, 1.0)], _tm())
    add(
        "woods_robbins",
        2,
        [Part(wr_spec)],
        ClosedForm.power_of_base(-0.5),
        "Woods-Robbins product over (2n+1)/(2n+2)",
        1e-5,
    )
    add(
        "woods_robbins_squared",
        2,
        [Part(ProductSpec(2, [Factor(1, 2.0)], _tm()))],
        ClosedForm.rational(1, 2),
        "squared Woods-Robbins product, multiplier 1 - u(1) = 2",
        1e-5,
    )

    # strongly multiplicative table exponent with a complex fourth root
    i_s3 = DigitStatPower(3, 1j, DigitStat.digit_sum())
    add(
        "strong_mult_gauss_b3",
        3,
        [Part(ProductSpec(3, [Factor(1, 1 - 1j), Factor(2, 2.0)], i_s3))],
        ClosedForm.rational(1, 3),
        "strongly multiplicative product with i**digit_sum exponents, base 3",
        1e-4,
    )

    # zero-count exponents (base 2, z = 1/2)
    add(
        "zero_count_scaled_b2",
        2,
        [Part(_zero_count_spec(2, 0.5, scaled=True))],
        ClosedForm.rational(1, 2),
        "zero-count product with multiplier 1 - z",
        5e-4,
        note="the product equals 1/B (consistent with the unscaled log form)",
    )
    add(
        "zero_count_log_b2",
        2,
        [Part(_zero_count_spec(2, 0.5, scaled=False))],
        ClosedForm.power_of_base(1.0 / (0.5 - 1.0)),
        "zero-count product, unscaled exponent, value B**(1/(z-1))",
        5e-4,
    )

    # roots of unity with base = 1 mod q, and the squared (sigma) forms
    r5 = _roots_spec(5, 4)
    add(
        "roots_unity_sin_b5",
        5,
        [Part(r5, 0.5, "real")],
        ClosedForm.power_of_base(-0.5),
        "sine pair product over base 5, fourth roots of unity",
        1e-4,
    )
    add(
        "roots_unity_cos_b5",
        5,
        [Part(r5, -0.5, "imag")],
        ClosedForm.one(),
        "cosine pair product over base 5, fourth roots of unity",
        1e-4,
    )
    add(
        "sigma_first_b5",
        5,
        [Part(r5, 1.0, "real")],
        ClosedForm.rational(1, 5),
        "squared sine pair: the +-1 square-residue exponent product",
        1e-4,
    )
    add(
        "sigma_second_b5",
        5,
        [Part(r5, -1.0, "imag")],
        ClosedForm.one(),
        "squared cosine pair: the shifted square-residue exponent product",
        1e-4,
    )

    # z**digit_sum exponents
    zs3 = DigitStatPower(3, 0.5, DigitStat.digit_sum())
    add(
        "digit_sum_pow_b3",
        3,
        [Part(ProductSpec(3, [Factor(1, 0.5), Factor(2, 0.75)], zs3))],
        ClosedForm.rational(1, 3),
        "digit-sum power product with multipliers 1 - z**k, base 3",
        5e-4,
    )
    half_s2 = DigitStatPower(2, 0.5, DigitStat.digit_sum())
    add(
        "half_pow_digit_sum_b2",
        2,
        [Part(ProductSpec(2, [Factor(1, 1.0)], half_s2))],
        ClosedForm.rational(1, 4),
        "squared digit-sum power product at z = 1/2, base 2",
        5e-4,
    )

    # digit-sum roots of unity (base 2, q = 4) and the squared sigma forms
    ds2 = _digit_sum_root_spec(2, 4)
    add(
        "sin_digit_sum_b2",
        2,
        [Part(ds2, 0.5, "real")],
        ClosedForm.power_of_base(-0.5),
        "sine product with digit-sum phases, base 2",
        1e-4,
    )
    add(
        "cos_digit_sum_b2",
        2,
        [Part(ds2, -0.5, "imag")],
        ClosedForm.one(),
        "cosine product with digit-sum phases, base 2",
        1e-4,
    )
    add(
        "sigma_digit_sum_first_b2",
        2,
        [Part(ds2, 1.0, "real")],
        ClosedForm.rational(1, 2),
        "squared sine product: square-residue exponent of the digit sum",
        1e-4,
    )
    add(
        "sigma_digit_sum_second_b2",
        2,
        [Part(ds2, -1.0, "imag")],
        ClosedForm.one(),
        "squared cosine product: shifted square-residue exponent of the digit sum",
        1e-4,
    )

    # base-3 third roots of the digit sum: the 1/-2 pattern exponent
    ds3 = _digit_sum_root_spec(3, 3)
    add(
        "theta_digit_sum_b3",
        3,
        [Part(ds3, 1.0, "real"), Part(ds3, 1.0 / sqrt3, "imag")],
        ClosedForm.rational(1, 3),
        "rearranged base-3 product with the 1,1,-2 exponent pattern",
        5e-4,
    )

    # alternating parity of the digit sum: 1/sqrt(B)
    for b in (2, 3, 6):
        seq = DigitStatPower(b, -1.0, DigitStat.digit_sum())
        spec = ProductSpec(b, [Factor(k, 1.0) for k in _odd_residues(b)], seq)
        add(
            f"sum_digits_b{b}",
            b,
            [Part(spec)],
            ClosedForm.power_of_base(-0.5),
            f"odd-residue product with (-1)**digit_sum exponents, base {b}",
            1e-5,
        )

    # digit-set counting exponents
    dj4 = _count_root_spec(4, {1, 3}, 3)
    s_pi3 = math.sin(math.pi / 3.0)
    add(
        "digit_set_sin_b4",
        4,
        [Part(dj4, 1.0 / (2.0 * s_pi3), "real")],
        ClosedForm.power_of_base(-1.0 / (2.0 * s_pi3)),
        "digit-set {1,3} count product with third-root phases, base 4",
        1e-4,
    )
    add(
        "digit_set_cos_b4",
        4,
        [Part(dj4, -1.0 / (2.0 * s_pi3), "imag")],
        ClosedForm.one(),
        "digit-set {1,3} cosine partner, base 4",
        1e-4,
    )
    parity_set = DigitStatPower(5, -1.0, DigitStat.count_set({1, 2}))
    add(
        "digit_set_parity_b5",
        5,
        [Part(ProductSpec(5, [Factor(1, 1.0), Factor(2, 1.0)], parity_set))],
        ClosedForm.power_of_base(-0.5),
        "(-1)**(count of digits 1 and 2) product, base 5",
        1e-5,
    )

    # single-digit counts in base 2 (k = 1 is the prototype again)
    add(
        "count_ones_b2",
        2,
        [Part(wr_spec)],
        ClosedForm.power_of_base(-0.5),
        "single-digit count product at k = 1, base 2",
        1e-5,
    )
    zeros2 = DigitStatPower(2, -1.0, DigitStat.count(0))
    add(
        "count_zeros_b2",
        2,
        [Part(ProductSpec(2, [Factor(0, 1.0)], zeros2))],
        ClosedForm.power_of_base(-0.5),
        "single-digit count product at k = 0, base 2",
        1e-5,
    )

    # single-digit count in base 3 with third-root phases: 1/-2 and 1,0,-1
    c31 = _count_root_spec(3, {1}, 3)
    add(
        "eta_count_b3",
        3,
        [Part(c31, 2.0 / 3.0, "real")],
        ClosedForm.power_of_base(-2.0 / 3.0),
        "1,0,-1 exponent pattern of the digit-1 count, base 3",
        5e-4,
    )
    add(
        "theta_count_b3",
        3,
        [Part(c31, -2.0 / sqrt3, "imag")],
        ClosedForm.one(),
        "squared cosine partner with the 1,1,-2 pattern, base 3",
        5e-4,
    )

    # periodic (-1)**n exponents over odd bases; Gamma quotient cross-check
    alt3 = ProductSpec(3, [Factor(1, 1.0)], PeriodicPower(3, 2, 1))
    add(
        "alternating_b3",
        3,
        [Part(alt3)],
        ClosedForm.gamma_ref(
            alternating_pair_quotient(3, 1), label="Gamma quotient for base 3, k = 1"
        ),
        "alternating product (3n+1)/(3n+2), equal to 1/sqrt(3)",
        1e-5,
    )
    alt5 = ProductSpec(
        5, [Factor(1, 1.0), Factor(3, 1.0)], PeriodicPower(5, 2, 1)
    )
    add(
        "alternating_b5",
        5,
        [Part(alt5)],
        ClosedForm.power_of_base(-0.5),
        "alternating odd-residue product, base 5",
        1e-5,
    )

    return claims


def claim_by_name(name: str) -> IdentityClaim:
    for c in catalog():
        if c.name == name:
            return c
    raise ValidationError(f"unknown claim {name!r}")


@dataclass(frozen=True)
class VerifyReport:
    name: str
    computed: complex
    expected: complex
    abs_err: float
    rel_err: float
    passed: bool
    tol: float
    terms: int
    seconds: float
    err_est: float

    def __bool__(self) -> bool:
        return self.passed

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "computed": self.computed.real,
            "computed_im": self.computed.imag,
            "expected": self.expected.real,
            "expected_im": self.expected.imag,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "pass": self.passed,
            "tol": self.tol,
            "terms": self.terms,
            "seconds": self.seconds,
            "err_est": self.err_est,
        }


class _EvalCache:
    def __init__(self):
        self._data: dict = {}
        self._lock = Lock()

    def get(self, spec: ProductSpec, n_terms: int, threads: int) -> EvalResult:
        key = (spec, n_terms)
        with self._lock:
            hit = self._data.get(key)
        if hit is not None:
            return hit
        result = evaluate_abel(spec, n_terms, extrapolate=True, threads=threads)
        with self._lock:
            self._data[key] = result
        return result


def verify_claim(
    claim: IdentityClaim,
    n_terms: int | None = None,
    threads: int = 1,
    cache: _EvalCache | None = None,
) -> VerifyReport:
    """Evaluate a claim's parts and compare against its closed form."""
    n = int(n_terms) if n_terms is not None else claim.cost_hint
    cache = cache or _EvalCache()
    t0 = time.perf_counter()
    total_log = complex(0.0)
    err_est = 0.0
    terms = 0
    for part in claim.parts:
        res = cache.get(part.spec, n, threads)
        total_log += part.contribution(res.log_value)
        err_est += abs(part.coeff) * res.err_est
        terms = max(terms, res.terms)
    computed = cmath.exp(total_log)
    expected = claim.rhs.value(claim.base)
    abs_err = abs(computed - expected)
    rel_err = abs_err / abs(expected)
    return VerifyReport(
        name=claim.name,
        computed=computed,
        expected=expected,
        abs_err=abs_err,
        rel_err=rel_err,
        passed=rel_err <= claim.tol,
        tol=claim.tol,
        terms=terms,
        seconds=time.perf_counter() - t0,
        err_est=err_est,
    )


@dataclass(frozen=True)
class VerifySummary:
    reports: tuple[VerifyReport, ...]
    passed_count: int
    total: int
    worst_rel_err: float
    seconds: float

    @property
    def all_passed(self) -> bool:
        return self.passed_count == self.total

    def __bool__(self) -> bool:
        return self.all_passed


def verify_all(
    n_terms: int | None = None,
    names: list[str] | None = None,
    threads: int = 1,
) -> VerifySummary:
    """Verify the whole catalog (or a named subset).

    Claims run concurrently when threads > 1; shared product evaluations are
    cached, and the report order always follows the catalog.
    """
    claims = catalog()
    if names:
        wanted = set(names)
        unknown = wanted - {c.name for c in claims}
        if unknown:
            raise ValidationError(f"unknown claims: {sorted(unknown)}")
        claims = [c for c in claims if c.name in wanted]
    cache = _EvalCache()
    t0 = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(
                pool.map(
                    lambda c: verify_claim(c, n_terms, threads=1, cache=cache),
                    claims,
                )
            )
    else:
        reports = [verify_claim(c, n_terms, threads=1, cache=cache) for c in claims]
    return VerifySummary(
        reports=tuple(reports),
        passed_count=sum(1 for r in reports if r.passed),
        total=len(reports),
        worst_rel_err=max((r.rel_err for r in reports), default=0.0),
        seconds=time.perf_counter() - t0,
    )


def q_product_spec() -> ProductSpec:
    """Q: the (2n)/(2n+1) product from n >= 1 with parity-of-ones exponents."""
    return ProductSpec(2, [Factor(0, 1.0, start=1)], _tm())


def r_product_spec() -> ProductSpec:
    """R: the (4n+1)(4n+2)/((4n)(4n+3)) product from n >= 1, base-4 residues.

    The combined per-n factor makes the log-series absolutely convergent, so
    direct truncation is accurate; residues 0 (inverted) and 2 carry it.
    """
    return ProductSpec(
        4, [Factor(0, -1.0, start=1), Factor(2, 1.0, start=1)], _tm()
    )


def estimate_qr(n_terms: int, threads: int = 1) -> dict:
    """Estimate Q and R and check Q * R = 3/2.

    Q's log-series is conditionally convergent (bounded partial sums) and is
    evaluated with extrapolated summation by parts; R's is absolutely
    convergent and truncated directly.  No reference value exists for either
    constant alone.
    """
    if n_terms < 1000:
        raise ValidationError(f"n_terms must be >= 1000, got {n_terms}")
    q_res = evaluate_abel(q_product_spec(), n_terms, extrapolate=True, threads=threads)
    r_res = evaluate_direct(r_product_spec(), n_terms, threads=threads)
    q = q_res.value.real
    r = r_res.value.real
    return {
        "Q": q,
        "R": r,
        "product_check": q * r,
        "q_err_est": q_res.err_est,
        "r_err_est": r_res.err_est,
        "terms": max(q_res.terms, r_res.terms),
    }


@dataclass(frozen=True)
class MergeSplitReport:
    passed: bool
    checked: int
    merge_dev: float  # factor merge at each n: a(0,n) + a(1,n) = log(n/(n+1))
    split_dev: float  # even/odd regrouping of the merged sum
    head_dev: float  # two-term hand check at the first index

    def __bool__(self) -> bool:
        return self.passed


def merge_split_check(n_limit: int, tol: float = 1e-12) -> MergeSplitReport:
    """Finite skeleton of the classic evaluation trick, base 2.

    (a) Merging the two residue factors at each n in [1, N) gives
    log(n/(n+1)) exactly.  (b) Splitting sum_{1 <= m < 2N} e(m) log(m/(m+1))
    by parity, with e(2n) = e(n) and e(2n+1) = -e(n), reproduces the two
    factor sums exactly.  In the limit the two steps force the squared
    prototype product to equal 1/2.
    """
    n = int(n_limit)
    if n < 2 or n & (n - 1):
        raise ValidationError(f"n_limit must be a power of two >= 2, got {n}")

    ns = np.arange(1, n, dtype=np.int64)
    a0 = -np.log1p(1.0 / (2 * ns))
    a1 = -np.log1p(1.0 / (2 * ns + 1))
    merged = -np.log1p(1.0 / ns)
    merge_dev = float(np.abs((a0 + a1) - merged).max())

    head_dev = abs(
        (log_ratio_term(2, 0, 1) + log_ratio_term(2, 1, 1)) - math.log(0.5)
    )

    ms = np.arange(1, 2 * n, dtype=np.int64)
    eps_m = thue_morse_block(ms).astype(np.float64)
    lhs = fsum((eps_m * -np.log1p(1.0 / ms)).tolist())
    eps_n = thue_morse_block(ns).astype(np.float64)
    even = fsum((eps_n * a0).tolist())
    ns0 = np.arange(0, n, dtype=np.int64)
    eps0 = thue_morse_block(ns0).astype(np.float64)
    odd = fsum((eps0 * -np.log1p(1.0 / (2 * ns0 + 1))).tolist())
    split_dev = abs(lhs - (even - odd))

    passed = merge_dev <= tol and split_dev <= tol and head_dev <= tol
    return MergeSplitReport(passed, n, merge_dev, split_dev, head_dev)
