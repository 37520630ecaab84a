import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modchaos.errors import AlphabetMismatch, EmptyBlock, HorizonExceeded, InvalidArgument, SymbolOutOfRange
from modchaos.symseq import (
    Alphabet,
    FiniteSeq,
    MetricInterval,
    PeriodicSeq,
    agreement_prefix_length,
    concat,
    contains_word,
    make_periodic,
    random_sequence,
    scrambled_disagreements,
    scrambled_pair,
    shift,
    sigma_distance,
    symbol_at,
    universal_length,
    universal_sequence,
)

from conftest import periodic_seqs


def brute_distance(a, b, terms=200):
    """Truncated series in exact rationals; tail is below (m-1)/2^(terms-1)."""
    xs, ys = a.prefix(terms), b.prefix(terms)
    return sum(Fraction(abs(x - y), 2**k) for k, (x, y) in enumerate(zip(xs, ys)))


def naive_universal(m, n):
    out = []
    for length in itertools.count(1):
        for idx in range(m**length):
            digits = [(idx // m**p) % m + 1 for p in reversed(range(length))]
            out += digits
            if len(out) >= n:
                return out[:n]


class TestAlphabet:
    def test_rejects_small(self):
        with pytest.raises(InvalidArgument):
            Alphabet(1)

    def test_validate(self):
        assert Alphabet(3).validate([1, 3]) == (1, 3)
        with pytest.raises(SymbolOutOfRange):
            Alphabet(2).validate([3])


class TestSymbolAt:
    def test_periodic_block(self):
        assert symbol_at(make_periodic((1, 2)), 3) == 1

    def test_prefix_read(self):
        assert symbol_at(make_periodic((1,), prefix=(2,)), 1) == 2

    def test_finite_horizon(self):
        seq = FiniteSeq(2, (1, 2, 1, 2, 2))
        assert symbol_at(seq, 5) == 2
        with pytest.raises(HorizonExceeded):
            symbol_at(seq, 6)

    def test_zero_position_rejected(self):
        with pytest.raises(InvalidArgument):
            make_periodic((1,)).at(0)

    def test_generated_memo_agrees(self):
        u = universal_sequence(3)
        first = [u.at(k) for k in range(1, 50)]
        assert first == [u.at(k) for k in range(1, 50)]
        assert list(u.prefix(49)) == first


class TestShift:
    def test_period_two(self):
        s = make_periodic((1, 2))
        assert shift(s, 1).prefix(4) == (2, 1, 2, 1)
        assert shift(s, 2).prefix(4) == (1, 2, 1, 2)
        assert isinstance(shift(s, 5), PeriodicSeq)

    def test_universal(self):
        assert shift(universal_sequence(2), 1).prefix(5) == (2, 1, 1, 1, 2)

    def test_finite_too_short(self):
        with pytest.raises(HorizonExceeded):
            FiniteSeq(2, (1, 2)).shift(3)
        assert FiniteSeq(2, (1, 2)).shift(2).horizon == 0

    @given(periodic_seqs(), st.integers(0, 20), st.integers(0, 20))
    def test_shift_algebra_periodic(self, s, a, b):
        assert s.shift(a).shift(b).prefix(40) == s.shift(a + b).prefix(40)

    @pytest.mark.parametrize("a,b", [(0, 0), (1, 3), (7, 11), (100, 37)])
    def test_shift_algebra_generated(self, a, b):
        u = universal_sequence(2)
        assert u.shift(a).shift(b).prefix(64) == u.prefix(a + b + 64)[a + b:]


class TestMakePeriodic:
    def test_definition(self):
        assert make_periodic((1, 2, 2)).prefix(7) == (1, 2, 2, 1, 2, 2, 1)

    def test_constant_is_fixed_point(self):
        s = make_periodic((1,))
        assert s.shift(1) == s

    def test_out_of_range(self):
        with pytest.raises(SymbolOutOfRange):
            make_periodic((3,), 2)

    def test_empty(self):
        with pytest.raises(EmptyBlock):
            make_periodic(())


class TestUniversal:
    def test_first_ten_m2(self):
        assert universal_sequence(2).prefix(10) == (1, 2, 1, 1, 1, 2, 2, 1, 2, 2)

    def test_first_three_m3(self):
        assert universal_sequence(3).prefix(3) == (1, 2, 3)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_matches_naive_enumeration(self, m):
        n = universal_length(m, 4)
        assert list(universal_sequence(m).prefix(n)) == naive_universal(m, n)

    def test_word_22(self):
        assert contains_word(universal_sequence(2), (2, 2), 100) <= 12

    def test_all_words_up_to_8(self):
        u = universal_sequence(2)
        h = universal_length(2, 8)
        assert h == 3586
        arr = u.as_array(h)
        for L in range(1, 9):
            windows = np.lib.stride_tricks.sliding_window_view(arr, L)
            seen = {tuple(w) for w in windows}
            assert len(seen) == 2**L


class TestContainsWord:
    def test_periodic(self):
        assert contains_word(make_periodic((1, 2)), (2, 1), 10) == 2

    def test_not_found(self):
        assert contains_word(make_periodic((1,)), (2,), 100) is None

    def test_universal_111(self):
        assert contains_word(universal_sequence(2), (1, 1, 1), 100) <= 22

    def test_smallest_position(self):
        seq = FiniteSeq(2, (2, 1, 1, 2, 1, 1))
        assert contains_word(seq, (1, 1), 6) == 2
        assert contains_word(seq, (1, 1, 2, 1, 1, 2), 6) is None


class TestScrambledPair:
    def test_counts_at_horizon_100(self):
        a, b = scrambled_pair(2)
        xa, xb = a.as_array(100), b.as_array(100)
        disagree = np.flatnonzero(xa != xb) + 1
        assert len(disagree) >= 5
        agree_blocks = np.split(np.arange(100), np.flatnonzero(xa != xb))
        assert sum(1 for blk in agree_blocks if len(blk) > 1 or (len(blk) and xa[blk[0]] == xb[blk[0]])) >= 5
        assert list(disagree) == scrambled_disagreements(100)

    def test_agreement_blocks_doubling(self):
        a, b = scrambled_pair(3)
        pos = scrambled_disagreements(5000)
        xa, xb = a.as_array(5000), b.as_array(5000)
        assert set(np.flatnonzero(xa != xb) + 1) == set(pos)
        gaps = np.diff([0] + pos) - 1
        assert list(gaps) == [2**n for n in range(len(pos))]

    def test_not_eventually_periodic(self):
        for s in scrambled_pair(2):
            x = s.as_array(10_000)[5000:]
            for p in range(1, 101):
                assert np.any(x[p:] != x[:-p]), p


class TestAgreement:
    def test_identical(self):
        s = make_periodic((1, 2))
        assert agreement_prefix_length(s, s, 10) == 10

    def test_first_differs(self):
        assert agreement_prefix_length(make_periodic((1,)), make_periodic((2,)), 10) == 0

    def test_inspection(self):
        assert agreement_prefix_length(make_periodic((1, 2, 2)), make_periodic((1, 2, 1)), 10) == 2

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            agreement_prefix_length(make_periodic((1,), 2), make_periodic((1,), 3), 5)


class TestSigmaDistance:
    def test_single_difference(self):
        d = sigma_distance(make_periodic((1,)), make_periodic((1,), prefix=(2,)))
        assert d.lo == d.hi == 1.0

    def test_identity(self):
        s = make_periodic((1, 2, 2), prefix=(2,))
        assert sigma_distance(s, s).hi == 0.0

    def test_alternating(self):
        d = sigma_distance(make_periodic((1, 2)), make_periodic((2, 1)))
        assert d.exact and d.lo == 2.0

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            sigma_distance(make_periodic((1,), 2), make_periodic((1,), 3))

    @settings(max_examples=300)
    @given(st.data())
    def test_exact_matches_brute_force(self, data):
        a = data.draw(periodic_seqs())
        b = data.draw(periodic_seqs(m_values=(a.alphabet.m,)))
        exact = sigma_distance(a, b).lo
        assert abs(exact - float(brute_distance(a, b))) < 1e-12

    def test_tail_bound_for_generated(self):
        u = universal_sequence(2)
        r = random_sequence(2, 7)
        d = sigma_distance(u, r, 10)
        assert d.horizon == 10
        assert d.hi - d.lo == pytest.approx(2.0**-9)
        assert d.lo <= float(brute_distance(u, r)) <= d.hi

    def test_widening_horizon_is_monotone(self):
        a, b = scrambled_pair(3)
        prev = sigma_distance(a, b, 1)
        for h in range(2, 80):
            cur = sigma_distance(a, b, h)
            assert cur.lo >= prev.lo and cur.hi <= prev.hi
            prev = cur

    @settings(max_examples=200)
    @given(st.data())
    def test_interval_contains_exact(self, data):
        a = data.draw(periodic_seqs())
        b = data.draw(periodic_seqs(m_values=(a.alphabet.m,)))
        h = data.draw(st.integers(1, 30))
        exact = sigma_distance(a, b).lo
        fa, fb = FiniteSeq(a.alphabet, a.prefix(h)), FiniteSeq(b.alphabet, b.prefix(h))
        assert sigma_distance(fa, fb, h).contains(exact, 1e-15)

    def test_metric_interval_invariant(self):
        with pytest.raises(InvalidArgument):
            MetricInterval(1.0, 0.5)


def test_concat_keeps_kind():
    p = make_periodic((1, 2))
    assert isinstance(concat((2, 2), p), PeriodicSeq)
    assert concat((2, 2), p).prefix(5) == (2, 2, 1, 2, 1)
    u = universal_sequence(2)
    c = concat((2,), u.shift(3))
    assert c.prefix(300) == (2,) + u.prefix(302)[3:]
