import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from digitprod.digits import DigitStat, digits_of
from digitprod.errors import (
    ConvergenceHypothesisViolated,
    HypothesisFailed,
    NoNonzeroSeed,
)
from digitprod.sequences import (
    DigitStatPower,
    PeriodicPower,
    SignedResidue,
    StronglyMultiplicative,
    recursion_profile,
    thue_morse_seq,
    verify_strong_mult,
)

TOL = 1e-12


def unit_disk_complex(rng, real=False):
    if real:
        return float(rng.uniform(-1, 1))
    r = rng.uniform(0, 1) ** 0.5
    phi = rng.uniform(0, 2 * np.pi)
    return complex(r * np.cos(phi), r * np.sin(phi))


def random_table_seq(rng, base=None):
    b = int(base or rng.integers(2, 9))
    vals = [unit_disk_complex(rng, real=bool(rng.integers(0, 2))) for _ in range(b - 1)]
    return StronglyMultiplicative(b, vals)


def test_eval_examples():
    tm = thue_morse_seq()
    assert tm.value(5) == 1  # (101)_2, two ones

    zero_table = StronglyMultiplicative(3, (0.0, 0.0))
    assert zero_table.value(9) == 0  # 9 = (100)_3, digit product hits u(1) = 0

    rot = PeriodicPower(5, 4, 1)
    assert abs(rot.value(3) - (-1j)) < TOL


def test_digit_product_oracle(rng):
    # the value at n is the product of table values over the digits of n
    for _ in range(20):
        seq = random_table_seq(rng)
        full = (complex(1.0),) + seq.values
        for n in rng.integers(0, 10**4, size=40):
            expected = complex(1.0)
            for d in digits_of(int(n), seq.base):
                expected *= full[d]
            assert abs(seq.value(int(n)) - expected) <= TOL


def test_block_matches_scalar(rng):
    ns = np.arange(0, 3000, dtype=np.int64)
    seqs = [
        thue_morse_seq(),
        DigitStatPower(3, 0.5, DigitStat.digit_sum()),
        DigitStatPower(4, cmath.exp(2j * cmath.pi / 3), DigitStat.count_set({1, 3})),
        DigitStatPower(2, 1j, DigitStat.digit_sum()),
        PeriodicPower(5, 4, 1),
        PeriodicPower(3, 2, 1),
        SignedResidue(5, (1, 1, -1, -1)),
        random_table_seq(rng),
    ]
    for seq in seqs:
        block = seq.block(ns)
        scalar = np.array([seq.value(int(n)) for n in ns])
        assert np.abs(block - scalar).max() <= TOL


def test_zero_power_is_one():
    seq = DigitStatPower(2, 0.0, DigitStat.digit_sum())
    assert seq.value(0) == 1  # 0**0 := 1
    assert seq.value(3) == 0


def test_verify_strong_mult():
    ok = verify_strong_mult(DigitStatPower(3, 0.5, DigitStat.digit_sum()), 1000)
    assert ok.passed

    bad = verify_strong_mult(DigitStatPower(3, 0.5, DigitStat.count(0)), 1000)
    assert not bad.passed
    assert bad.first_failure == (1, 0)  # u(3) = z but u(1)*u(0) = 1

    table = StronglyMultiplicative(4, (0.5, -0.5j, 1.0))
    assert verify_strong_mult(table, 1000).passed


def test_profile_zero_count():
    z = 0.3 + 0.4j
    seq = DigitStatPower(4, z, DigitStat.count(0))
    prof = recursion_profile(seq, 4096)
    assert abs(prof.v[0] - z) <= TOL
    assert all(abs(v - 1) <= TOL for v in prof.v[1:])


def test_profile_periodic_power():
    prof = recursion_profile(PeriodicPower(5, 4, 1), 4096)
    expected = (1, 1j, -1, -1j, 1)
    assert all(abs(a - b) <= TOL for a, b in zip(prof.v, expected))
    assert abs(prof.v_total - 1) <= TOL
    assert prof.alpha == 0.5


def test_profile_rejects_all_ones():
    ones = DigitStatPower(2, 1.0, DigitStat.count(1))
    with pytest.raises(ConvergenceHypothesisViolated):
        recursion_profile(ones, 4096)


def test_profile_rejects_digit_length():
    # counting every digit measures the expansion length; v(k) = omega for
    # all k, so |sum v| = B and the products may diverge
    seq = DigitStatPower(2, -1.0, DigitStat.count_set({0, 1}))
    with pytest.raises(ConvergenceHypothesisViolated):
        recursion_profile(seq, 4096)


def test_profile_no_seed():
    silent = StronglyMultiplicative(3, (0.0, 0.0))
    with pytest.raises(NoNonzeroSeed):
        recursion_profile(silent, 4096)


def test_profile_hypothesis_failure():
    # 5 is not 1 mod 3, so omega**n does not satisfy the base-5 recursion
    with pytest.raises(HypothesisFailed):
        recursion_profile(PeriodicPower(5, 3, 1), 4096)
    # (-1)**n over an even base cannot factor through the digit recursion
    with pytest.raises(HypothesisFailed):
        recursion_profile(SignedResidue(2, (1.0, -1.0)), 4096)


def test_profile_unique_across_seeds():
    seq = DigitStatPower(3, 0.7, DigitStat.digit_sum())
    p1 = recursion_profile(seq, 8192, seed_start=3)
    p2 = recursion_profile(seq, 8192, seed_start=17)
    assert p1.n0 != p2.n0
    assert all(abs(a - b) <= TOL for a, b in zip(p1.v, p2.v))


def test_profile_equals_table_for_strongly_multiplicative(rng):
    for _ in range(15):
        seq = random_table_seq(rng)
        try:
            prof = recursion_profile(seq, 4096)
        except (ConvergenceHypothesisViolated, NoNonzeroSeed):
            continue
        full = (complex(1.0),) + seq.values
        assert all(abs(a - b) <= TOL for a, b in zip(prof.v, full))


def test_profile_digit_sum_and_count_set_shapes():
    w = 0.8j
    prof = recursion_profile(DigitStatPower(3, w, DigitStat.digit_sum()), 4096)
    assert all(abs(prof.v[k] - w**k) <= TOL for k in range(3))

    prof = recursion_profile(
        DigitStatPower(4, w, DigitStat.count_set({1, 3})), 4096
    )
    expected = [1, w, 1, w]
    assert all(abs(a - b) <= TOL for a, b in zip(prof.v, expected))


def test_profile_base_override():
    # the parity-of-ones sequence also satisfies the recursion over base 4
    prof = recursion_profile(thue_morse_seq(), 4096, base=4)
    assert prof.base == 4
    expected = (1, -1, -1, 1)
    assert all(abs(a - b) <= TOL for a, b in zip(prof.v, expected))
    assert abs(prof.v_total) <= TOL


def test_profile_flags_unbounded_table():
    seq = StronglyMultiplicative(2, (-2.0,))  # |u| grows, but sum v = -1
    prof = recursion_profile(seq, 4096)
    assert not prof.u_bounded
    with pytest.raises(Exception):
        prof.require_unit_bounds()


@given(st.integers(min_value=0, max_value=10**9))
def test_periodic_power_exact_periodicity(n):
    seq = PeriodicPower(5, 4, 1)
    assert seq.value(n) == seq.value(n % 4)
