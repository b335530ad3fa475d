import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkdsec.numerics import (
    Log2Value,
    binary_entropy,
    binomial_sum,
    hamming_max_info_bits,
    log2_binomial_sum,
    one_minus,
    round_half_up,
    solve_parity_length,
    wilson_interval,
)


class TestBinaryEntropy:
    def test_maximum_at_half(self):
        assert binary_entropy(0.5) == 1.0

    def test_deterministic_ends(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_frozen_value(self):
        # closed form -q log2 q - (1-q) log2(1-q) at q = 0.05,
        # evaluated independently at 60 decimal digits
        assert binary_entropy(0.05) == pytest.approx(0.2863969571159561, abs=1e-12)

    def test_high_precision_tail(self):
        # naive log2(1-q) loses these digits; the log1p path keeps them
        assert binary_entropy(2.5e-6) == pytest.approx(5.013083427988868e-5, rel=1e-12)

    @given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
    def test_symmetry(self, q):
        assert binary_entropy(q) == pytest.approx(binary_entropy(1.0 - q), abs=1e-12)

    @given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
    def test_range(self, q):
        assert 0.0 <= binary_entropy(q) <= 1.0

    @pytest.mark.parametrize("q", [-0.1, 1.1, math.nan])
    def test_domain_error(self, q):
        with pytest.raises(ValueError):
            binary_entropy(q)


class TestBinomialSum:
    def test_small_values(self):
        assert binomial_sum(7, 1) == 8
        assert binomial_sum(10, 0) == 1

    def test_full_sum_is_power_of_two(self):
        for n in range(0, 65):
            assert binomial_sum(n, n) == 2 ** n

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            binomial_sum(5, 6)
        with pytest.raises(ValueError):
            binomial_sum(-1, 0)

    def test_log2_of_exact_power(self):
        assert log2_binomial_sum(7, 1).exponent == 3.0

    def test_log2_huge_argument(self):
        # beyond float range: sum of C(2000, a) has ~2000 bits
        v = log2_binomial_sum(2000, 2000)
        assert v.exponent == pytest.approx(2000.0, abs=1e-9)

    def test_entropy_bound_spot_checks(self):
        assert log2_binomial_sum(20, 10).exponent <= 20 * binary_entropy(0.5)
        assert log2_binomial_sum(64, 8).exponent <= 64 * binary_entropy(8 / 64)


class TestHammingMaxInfoBits:
    def test_perfect_codes(self):
        assert hamming_max_info_bits(7, 1) == 4
        assert hamming_max_info_bits(15, 1) == 11

    def test_no_errors_no_redundancy(self):
        assert hamming_max_info_bits(10, 0) == 10

    def test_packing_identity_exact(self):
        # m is maximal: 2^m * S <= 2^k but 2^(m+1) * S > 2^k, all in integers
        for k in range(1, 31):
            for t in range(0, k + 1):
                m = hamming_max_info_bits(k, t)
                s = binomial_sum(k, t)
                assert (s << m) <= (1 << k)
                assert (s << (m + 1)) > (1 << k)

    def test_redundancy_bound(self):
        # m + log2(sum) <= k for all k <= 30
        for k in range(1, 31):
            for t in range(0, k + 1):
                m = hamming_max_info_bits(k, t)
                assert m + log2_binomial_sum(k, t).exponent <= k + 1e-9


class TestSolveParityLength:
    def test_perfect_code_point(self):
        # n=7 handles round(7/7)=1 error: 1 + 7 = 8 <= 2^3
        assert solve_parity_length(4, 1 / 7) == 7

    def test_vanishing_error_rate(self):
        assert solve_parity_length(1, 1e-12) == 1

    def test_entropy_bracket(self):
        n = solve_parity_length(100, 0.05)
        upper = math.ceil(100 / (1 - binary_entropy(0.05))) + 8
        assert 100 <= n <= upper

    def test_result_satisfies_exact_condition(self):
        for k, q in [(4, 1 / 7), (10, 0.05), (25, 0.1), (12, 0.2)]:
            n = solve_parity_length(k, q)
            t = round_half_up(q * n)
            assert binomial_sum(n, t) <= 2 ** (n - k)

    def test_diagnostic_on_unreachable_rate(self):
        # h2(q) ~ 1 makes the bracket explode past the ceiling
        with pytest.raises(ValueError, match="search ceiling"):
            solve_parity_length(10, 0.499999, max_n=1000)

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            solve_parity_length(4, 0.0)
        with pytest.raises(ValueError):
            solve_parity_length(4, 0.5)


finite_exponents = st.floats(min_value=-400.0, max_value=0.0, allow_nan=False)


class TestLog2Value:
    def test_conversions(self):
        assert Log2Value.from_linear(0.25).exponent == -2.0
        assert Log2Value.from_linear(0.0).is_zero
        assert Log2Value(-2.0).to_linear() == 0.25
        assert Log2Value.zero().to_linear() == 0.0

    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError):
            Log2Value(math.nan)
        with pytest.raises(ValueError):
            Log2Value(math.inf)
        with pytest.raises(ValueError):
            Log2Value.from_linear(-1.0)

    def test_equal_exponent_addition(self):
        assert (Log2Value(-3) + Log2Value(-3)).exponent == -2.0

    def test_zero_is_identity(self):
        assert (Log2Value(-7.5) + Log2Value.zero()).exponent == -7.5
        assert (Log2Value.zero() + Log2Value.zero()).is_zero

    def test_extreme_range_addition(self):
        assert (Log2Value(-50) + Log2Value(-1_000_000)).exponent == -50.0

    def test_saturation(self):
        value, exceeded = Log2Value(0.2).saturated()
        assert value == 1.0 and exceeded
        value, exceeded = Log2Value(-1.0).saturated()
        assert value == 0.5 and not exceeded

    def test_multiplication(self):
        assert (Log2Value(-3) * Log2Value(-4)).exponent == -7.0
        assert (Log2Value(-3) * Log2Value.zero()).is_zero

    @given(finite_exponents, finite_exponents)
    def test_addition_commutative(self, a, b):
        assert (Log2Value(a) + Log2Value(b)).exponent == (Log2Value(b) + Log2Value(a)).exponent

    @given(finite_exponents, finite_exponents, finite_exponents)
    def test_addition_associative(self, a, b, c):
        left = (Log2Value(a) + Log2Value(b)) + Log2Value(c)
        right = Log2Value(a) + (Log2Value(b) + Log2Value(c))
        assert left.exponent == pytest.approx(right.exponent, abs=1e-12)

    @given(finite_exponents, finite_exponents)
    def test_addition_dominates_max(self, a, b):
        assert (Log2Value(a) + Log2Value(b)).exponent >= max(a, b)

    @given(st.floats(min_value=-80.0, max_value=0.0),
           st.floats(min_value=0.0, max_value=40.0))
    def test_addition_strictly_monotone_when_representable(self, a, gap):
        # adding a nonzero value strictly increases the exponent as long
        # as the increment does not underflow double precision
        total = Log2Value(a) + Log2Value(a - gap)
        assert total.exponent > a

    def test_one_minus(self):
        assert one_minus(Log2Value.zero()).exponent == 0.0
        assert one_minus(Log2Value(0.0)).is_zero
        assert one_minus(Log2Value.from_linear(0.1)).to_linear() == pytest.approx(0.9)


class TestWilsonInterval:
    def test_contains_point_estimate(self):
        low, high = wilson_interval(30, 100)
        assert low < 0.3 < high

    def test_degenerate_counts(self):
        low, high = wilson_interval(0, 50)
        assert low == 0.0 and high > 0.0
        low, high = wilson_interval(50, 50)
        assert high == 1.0 and low < 1.0

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            wilson_interval(5, 0)
        with pytest.raises(ValueError):
            wilson_interval(7, 5)


@settings(max_examples=200)
@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_round_half_up(x):
    r = round_half_up(x)
    assert isinstance(r, int)
    assert abs(r - x) <= 0.5
