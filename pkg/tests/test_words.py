import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfglab.errors import (
    BudgetError,
    ConstructionError,
    InexactResult,
    PreconditionError,
)
from tfglab.words import (
    Alphabet,
    PeriodicSource,
    complexity,
    complexity_flagged,
    cylinders,
    entropy_estimate,
    factors,
    fibonacci_source,
    limit_word,
    recurrence,
    recurrence_flagged,
    substitution_source,
)

from conftest import brute_factors, brute_recurrence, fib_prefix


class TestAlphabet:
    def test_requires_two_symbols(self):
        with pytest.raises(ConstructionError):
            Alphabet("a")

    def test_distinct(self):
        with pytest.raises(ConstructionError):
            Alphabet("aab")

    def test_order_fixed(self):
        assert Alphabet("ba").symbols == ("b", "a")


class TestFactors:
    def test_hand_example(self):
        # windows of "abaab": ab, ba, aa, ab
        assert factors("abaab", 2).words == {"ab", "ba", "aa"}

    def test_single_symbol_word(self):
        assert factors("aaaa", 1).words == {"a"}

    def test_whole_word(self):
        assert factors("ab", 2).words == {"ab"}

    def test_out_of_range(self):
        with pytest.raises(PreconditionError):
            factors("abc", 4)
        with pytest.raises(PreconditionError):
            factors("abc", 0)

    @given(st.text(alphabet="ab", min_size=1, max_size=40), st.integers(1, 8))
    def test_matches_brute_force(self, w, n):
        if n <= len(w):
            assert factors(w, n).words == brute_factors(w, n)


class TestSubstitutionSource:
    def test_fixed_point_window(self, fib):
        # five iterations of a -> ab, b -> a from "a"
        assert fib.window(0, 12) == "abaababaabaab"

    def test_prefix_is_fixed(self, fib):
        w = fib.window(0, 40)
        image = "".join(fib.rules[c] for c in w)
        assert image.startswith(w)

    def test_window_consistency(self, fib):
        inner = fib.window(3, 20)
        outer = fib.window(2, 21)
        assert outer[1:-1] == inner

    def test_repeated_calls_equal(self, fib):
        assert fib.window(-7, 9) == fib.window(-7, 9)

    def test_left_extension_in_language(self, fib):
        # every crossing window must be a factor of the one-sided language
        w = fib.window(-40, 40)
        assert w in fib_prefix(4000)

    def test_non_extendable_seed_rejected(self):
        with pytest.raises(ConstructionError):
            substitution_source({"a": "ba", "b": "a"}, "a")

    def test_non_primitive_rejected(self):
        with pytest.raises(ConstructionError):
            substitution_source({"a": "aa", "b": "bb"}, "a")


class TestComplexity:
    def test_sturmian_small(self, fib):
        assert complexity(fib, 1) == 2
        assert complexity(fib, 5) == 6

    def test_sturmian_vs_brute_force(self, fib):
        prefix = fib_prefix(2000)
        for n in range(1, 31):
            assert complexity(fib, n) == n + 1
            assert len(brute_factors(prefix, n)) == n + 1

    def test_counting_bound(self, fib):
        for n in (1, 3, 7):
            assert complexity(fib, n) <= len(fib.alphabet) ** n

    def test_submultiplicative(self, fib):
        p = {n: complexity(fib, n) for n in range(1, 13)}
        for n in range(1, 6):
            for m in range(1, 6):
                assert p[n + m] <= p[n] * p[m]

    def test_periodic_flagged(self):
        src = PeriodicSource("ab")
        with pytest.raises(InexactResult) as exc:
            complexity(src, 2)
        assert exc.value.value == 2
        value, exact = complexity_flagged(src, 2)
        assert (value, exact) == (2, False)


class TestRecurrence:
    def test_fib_r1(self, fib):
        assert recurrence(fib, 1) == 3

    def test_matches_brute_oracle(self, fib):
        prefix = fib_prefix(1200)
        for n in range(1, 7):
            assert recurrence(fib, n) == brute_recurrence(prefix, n)

    def test_morse_hedlund(self, fib):
        for n in range(1, 16):
            r = recurrence(fib, n)
            p = complexity(fib, n)
            assert r >= p + n >= 2 * n + 1

    def test_periodic_flagged(self):
        value, exact = recurrence_flagged(PeriodicSource("ab"), 1)
        assert not exact
        assert value >= 2


class TestEntropy:
    def test_fib_upper(self, fib):
        est = entropy_estimate(fib, 20)
        assert est.exact
        assert est.value <= math.log(21) / 20 + 1e-12

    def test_periodic_tends_to_zero(self):
        est = entropy_estimate(PeriodicSource("ab"), 12)
        assert not est.exact
        assert est.value <= math.log(2) / 12 + 1e-12

    def test_requires_two(self, fib):
        with pytest.raises(PreconditionError):
            entropy_estimate(fib, 1)


class TestCylinders:
    def test_radius_zero(self, fib):
        assert cylinders(fib, 0) == ["a", "b"]

    def test_radius_one(self, fib):
        cyl = cylinders(fib, 1)
        assert len(cyl) == 4
        assert cyl == sorted(brute_factors(fib_prefix(500), 3))

    def test_count_matches_complexity(self, fib):
        for m in (0, 1, 2, 5):
            assert len(cylinders(fib, m)) == complexity(fib, 2 * m + 1)


class TestLimitWord:
    def test_hand_anchoring(self):
        # "aba" is the 2nd 3-factor of "aabab"; M0 = 2 anchors M1 = 3
        src = limit_word([("aba", 2), ("aabab", None)], m0=2)
        assert src.anchors == [2, 3]
        assert src.window(0, 0) == "b"
        # level agreement on the overlap
        assert src.window(-1, 1) == "aba"

    def test_factor_union(self):
        src = limit_word([("aba", 2), ("aabab", None)], m0=2)
        lo, hi = src.span()
        full = src.window(lo, hi)
        for n in (1, 2):
            union = brute_factors("aba", n) | brute_factors("aabab", n)
            assert brute_factors(full, n) == union

    def test_single_level_rejected(self):
        with pytest.raises(PreconditionError):
            limit_word([("aba", None)], m0=1)

    def test_embedding_violation_rejected(self):
        with pytest.raises(ConstructionError):
            limit_word([("abb", 2), ("aabab", None)], m0=2)

    def test_window_outside_span(self):
        src = limit_word([("aba", 2), ("aabab", None)], m0=2)
        with pytest.raises(BudgetError):
            src.window(-10, 10)


class TestWindowConsistencyProperty:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(-20, 30), st.integers(2, 25))
    def test_factors_nested(self, i, length):
        src = fibonacci_source()
        inner = src.window(i, i + length - 1)
        outer = src.window(i - 1, i + length)
        n = min(length, 4)
        assert brute_factors(inner, n) <= brute_factors(outer, n)
