import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from digitprod.digits import DigitStat
from digitprod.errors import ConvergenceHypothesisViolated, DomainError, ValidationError
from digitprod.products import (
    Factor,
    ProductSpec,
    evaluate_abel,
    evaluate_direct,
    log_ratio_term,
    residue_split_check,
    telescoping_check,
)
from digitprod.sequences import (
    DigitStatPower,
    PeriodicPower,
    StronglyMultiplicative,
    thue_morse_seq,
)

SQRT2_INV = 2**-0.5


def woods_robbins_spec():
    return ProductSpec(2, [Factor(1, 1.0)], thue_morse_seq())


def test_log_ratio_term_examples():
    assert abs(log_ratio_term(2, 1, 0) - math.log(0.5)) <= 1e-16
    assert abs(log_ratio_term(3, 0, 1) - math.log(0.75)) <= 1e-16
    with pytest.raises(DomainError):
        log_ratio_term(2, 0, 0)


@given(st.integers(min_value=1, max_value=10**9), st.integers(min_value=2, max_value=10))
def test_log_ratio_term_bound(n, base):
    for k in range(base):
        val = log_ratio_term(base, k, n)
        assert val < 0
        assert abs(val) < 1.0 / (base * n + k)


def test_naive_two_terms_by_hand():
    r = evaluate_direct(woods_robbins_spec(), 2)
    expected = math.log(0.5) - math.log(0.75)
    assert abs(r.log_value - expected) <= 1e-15
    assert r.method == "naive"


def test_naive_empty_sum():
    spec = ProductSpec(2, [Factor(0, 1.0, start=1)], thue_morse_seq())
    r = evaluate_direct(spec, 1)
    assert r.log_value == 0
    assert r.value == 1


def test_naive_woods_robbins_at_1e6():
    r = evaluate_direct(woods_robbins_spec(), 10**6)
    assert abs(r.value.real - SQRT2_INV) <= 5e-6


def test_monotone_partial_sums_for_unit_exponent():
    ones = StronglyMultiplicative(2, (1.0,))
    spec = ProductSpec(2, [Factor(1, 1.0)], ones)
    logs = [evaluate_direct(spec, n).log_value.real for n in (10, 100, 1000)]
    assert logs[0] > logs[1] > logs[2]


def test_abel_requires_convergence_guard():
    diverging = DigitStatPower(2, -1.0, DigitStat.count_set({0, 1}))
    spec = ProductSpec(2, [Factor(0, 1.0), Factor(1, 1.0)], diverging)
    with pytest.raises(ConvergenceHypothesisViolated):
        evaluate_abel(spec, 10**4)


def test_abel_rejects_unbounded_table():
    seq = StronglyMultiplicative(2, (-2.0,))
    spec = ProductSpec(2, [Factor(1, 1.0)], seq)
    with pytest.raises(ValidationError):
        evaluate_abel(spec, 10**4)


@pytest.mark.slow
def test_abel_woods_robbins_at_1e7():
    r = evaluate_abel(woods_robbins_spec(), 10**7)
    assert abs(r.value.real - SQRT2_INV) <= 1e-6
    assert r.method == "abel+extrapolation"


@pytest.mark.slow
def test_abel_half_power_digit_sum_at_1e7():
    seq = DigitStatPower(2, 0.5, DigitStat.digit_sum())
    spec = ProductSpec(2, [Factor(1, 1.0)], seq)
    r = evaluate_abel(spec, 10**7, extrapolate=True)
    assert abs(r.value.real - 0.25) <= 5e-4


def test_abel_agrees_with_naive_within_err():
    specs = [
        woods_robbins_spec(),
        ProductSpec(2, [Factor(1, 1.0)], DigitStatPower(2, 0.5, DigitStat.digit_sum())),
        ProductSpec(5, [Factor(k, 1 - 1j**k) for k in (1, 2, 3)], PeriodicPower(5, 4, 1)),
    ]
    for spec in specs:
        a = evaluate_abel(spec, 10**5)
        d = evaluate_direct(spec, 10**5)
        assert abs(a.log_value - d.log_value) <= a.err_est + d.err_est + 1e-12


def test_abel_without_extrapolation_matches_naive_partial():
    spec = ProductSpec(2, [Factor(1, 1.0)], DigitStatPower(2, 0.5, DigitStat.digit_sum()))
    a = evaluate_abel(spec, 10**5, extrapolate=False)
    d = evaluate_direct(spec, 10**5)
    assert a.method == "abel"
    assert abs(a.log_value - d.log_value) <= 1e-11


def test_eval_result_value_is_exp_of_log():
    r = evaluate_abel(woods_robbins_spec(), 10**4)
    import cmath

    assert r.value == cmath.exp(r.log_value)
    assert r.err_est >= 0
    assert r.terms == 10**4


def test_terms_round_up_to_base_multiple():
    spec = ProductSpec(
        3, [Factor(1, 1.0), Factor(2, 1.0)], DigitStatPower(3, -1.0, DigitStat.digit_sum())
    )
    r = evaluate_direct(spec, 10**4 + 1)
    assert r.terms % 3 == 0
    assert r.terms >= 10**4 + 1


def test_thue_morse_tail_is_order_one_over_n():
    spec = woods_robbins_spec()
    deltas = []
    for n in (10**4, 10**5):
        a = evaluate_abel(spec, n, extrapolate=False)
        b = evaluate_abel(spec, 2 * n, extrapolate=False)
        deltas.append(abs(a.log_value - b.log_value) * n)
    assert max(deltas) < 10.0


def test_telescoping_identities_by_hand():
    # base 2, n = 3: log(6/7) + log(7/8) = log(3/4)
    lhs = log_ratio_term(2, 0, 3) + log_ratio_term(2, 1, 3)
    assert abs(lhs - math.log(0.75)) <= 1e-15
    # base 5, n = 0 over k = 1..4: product of k/(k+1) is 1/5
    total = sum(log_ratio_term(5, k, 0) for k in range(1, 5))
    assert abs(total + math.log(5)) <= 1e-14


@pytest.mark.parametrize("base", [2, 3, 5, 7, 10])
def test_telescoping_check(base):
    seq = DigitStatPower(base, -1.0, DigitStat.digit_sum())
    rep = telescoping_check(seq, 10**4)
    assert rep.passed
    assert rep.max_pointwise_dev <= 1e-12


def test_telescoping_requires_unit_bound():
    seq = StronglyMultiplicative(2, (3.0,))
    with pytest.raises(ValidationError):
        telescoping_check(seq, 100)


def test_residue_split_thue_morse():
    rep = residue_split_check(thue_morse_seq(), 512)
    assert rep.passed
    assert rep.split_dev <= 1e-12
    assert rep.substitution_dev <= 1e-12


def test_residue_split_minimal():
    rep = residue_split_check(thue_morse_seq(), 1)
    assert rep.passed


def test_residue_split_digit_sum_base3():
    seq = DigitStatPower(3, -1.0, DigitStat.digit_sum())
    rep = residue_split_check(seq, 729)
    assert rep.passed


def test_factor_validation():
    with pytest.raises(ValidationError):
        Factor(0, 1.0, start=0)  # the n = 0 numerator would vanish
    with pytest.raises(ValidationError):
        ProductSpec(2, [], thue_morse_seq())
    with pytest.raises(ValidationError):
        ProductSpec(2, [Factor(1), Factor(1)], thue_morse_seq())
    with pytest.raises(ValidationError):
        ProductSpec(2, [Factor(5)], thue_morse_seq())


def test_threads_do_not_change_bits():
    spec = ProductSpec(5, [Factor(k, 1 - 1j**k) for k in (1, 2, 3)], PeriodicPower(5, 4, 1))
    r1 = evaluate_abel(spec, 3 * 10**5, threads=1)
    r4 = evaluate_abel(spec, 3 * 10**5, threads=4)
    assert r1.log_value == r4.log_value
    assert r1.err_est == r4.err_est
