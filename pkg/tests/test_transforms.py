"""Digit shifts and the fold map."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tentqmc.base_arith import BAdicReal, digitwise_sub, real_to_badic
from tentqmc.nets import PolyLatticeSpec, net_from_poly
from tentqmc.base_arith import poly_from_string
from tentqmc.transforms import (
    RngSpec,
    ShiftVector,
    digital_shift,
    fold_digit_array,
    fold_shifted_net,
    folded_values,
    sample_shift,
    shift_digit_array,
    sigma_shift,
    tau_const,
    tent_fold,
    tent_fold_truncated,
)


@st.composite
def badic(draw, base):
    prefix = draw(st.lists(st.integers(0, base - 1), min_size=1, max_size=7))
    tail = draw(st.integers(0, base - 1))
    return BAdicReal(base, tuple(prefix), tail)


class TestFold:
    def test_frozen_example(self):
        # 7/9 = 0.21 base 3 with tail 0: folds to prefix (2,) tail 1 = 5/6
        x = real_to_badic(Fraction(7, 9), 3, 2)
        f = tent_fold(x)
        assert f.prefix == (2,) and f.tail == 1
        assert f.value == Fraction(5, 6)

    def test_binary_fold_is_the_tent(self):
        for i in range(16):
            x = real_to_badic(Fraction(i, 16), 2, 4)
            expected = 1 - abs(2 * Fraction(i, 16) - 1)
            assert tent_fold(x).value == expected

    def test_grid_example(self):
        vals = [tent_fold(real_to_badic(Fraction(i, 4), 2, 2)).value
                for i in range(4)]
        assert vals == [0, Fraction(1, 2), 1, Fraction(1, 2)]

    def test_endpoints_fold_to_zero(self):
        for b in (2, 3, 5):
            assert tent_fold(BAdicReal.zero(b)).value == 0
            assert tent_fold(BAdicReal.one(b)).value == 0

    @pytest.mark.parametrize("b", [2, 3, 5])
    def test_decomposition(self, b):
        """The fold equals the digit shift minus the constant stream."""
        rng = np.random.default_rng(b)
        for _ in range(50):
            prefix = tuple(int(d) for d in rng.integers(0, b, size=5))
            x = BAdicReal(b, prefix, int(rng.integers(0, b)))
            want = digitwise_sub(sigma_shift(x), tau_const(x))
            assert tent_fold(x) == want

    @given(badic(3))
    @settings(max_examples=100, deadline=None)
    def test_fold_digits_shift_left(self, x):
        f = tent_fold(x)
        first = x.digit(1)
        for i in range(1, 8):
            assert f.digit(i) == (x.digit(i + 1) - first) % 3

    def test_truncated_fold(self):
        x = BAdicReal(3, (1, 2, 0), 2)
        t = tent_fold_truncated(x, 2)
        full = tent_fold(x)
        assert t.prefix == full.digits(2) and t.tail == 0

    def test_array_fold_matches_scalar(self):
        rng = np.random.default_rng(3)
        digits = rng.integers(0, 3, size=(20, 2, 6), dtype=np.uint8)
        prefix, tail = fold_digit_array(digits, 3)
        vals = folded_values(digits, 3)
        for i in range(20):
            for j in range(2):
                x = BAdicReal(3, tuple(int(d) for d in digits[i, j]), 0)
                f = tent_fold(x)
                assert tuple(int(d) for d in prefix[i, j]) == f.prefix
                assert int(tail[i, j]) == f.tail
                assert vals[i, j] == pytest.approx(float(f.value), abs=1e-15)


class TestShift:
    def test_reproducible_streams(self):
        a = sample_shift(RngSpec(5, stream=1), 3, 2, 8)
        b = sample_shift(RngSpec(5, stream=1), 3, 2, 8)
        c = sample_shift(RngSpec(5, stream=2), 3, 2, 8)
        assert np.array_equal(a.digits, b.digits)
        assert not np.array_equal(a.digits, c.digits)

    def test_shift_adds_digitwise(self):
        spec = PolyLatticeSpec(2, 2, 2, poly_from_string("1,1,1", 2),
                               (poly_from_string("1", 2),))
        net = net_from_poly(spec)
        shift = ShiftVector(2, np.array([[1, 0, 1]], dtype=np.uint8))
        shifted = digital_shift(net, shift)
        for i in range(net.size):
            x = BAdicReal(2, tuple(int(d) for d in net.digits[i, 0]), 0)
            y = BAdicReal(2, tuple(int(d) for d in shifted.digits[i, 0]), 0)
            from tentqmc.base_arith import digitwise_add
            assert y == digitwise_add(x, BAdicReal(2, (1, 0, 1), 0))

    def test_shift_of_zero_point_is_the_shift(self):
        digits = np.zeros((1, 2, 2), dtype=np.uint8)
        shift = ShiftVector(3, np.array([[2, 1, 0, 2], [0, 0, 1, 1]],
                                        dtype=np.uint8))
        out = shift_digit_array(digits, shift, 3)
        assert out.shape == (1, 2, 4)
        assert np.array_equal(out[0], shift.digits)

    def test_dimension_mismatch(self):
        digits = np.zeros((2, 2, 3), dtype=np.uint8)
        shift = ShiftVector(2, np.zeros((1, 3), dtype=np.uint8))
        with pytest.raises(ValueError):
            shift_digit_array(digits, shift, 2)

    def test_group_structure_preserved(self):
        """A shifted net is a coset: pairwise digit differences stay in the net."""
        spec = PolyLatticeSpec(2, 2, 3, poly_from_string("1,1,0,1", 2),
                               (poly_from_string("1", 2), poly_from_string("0,1", 2)))
        net = net_from_poly(spec)
        rows = {tuple(map(tuple, net.digits[i])) for i in range(net.size)}
        shift = sample_shift(RngSpec(11), net.s, 2, 3)
        shifted = shift_digit_array(net.digits, shift, 2)
        base_row = shifted[0].astype(np.int16)
        for i in range(net.size):
            diff = (shifted[i].astype(np.int16) - base_row) % 2
            assert tuple(map(tuple, diff.astype(np.uint8))) in rows


class TestFoldShiftedNet:
    def test_exact_values_match_float_path(self):
        spec = PolyLatticeSpec(3, 2, 2, poly_from_string("1,0,1", 3),
                               (poly_from_string("1", 3), poly_from_string("2,1", 3)))
        net = net_from_poly(spec)
        shift = sample_shift(RngSpec(23), net.s, 3, 6)
        exact = fold_shifted_net(net, shift)
        floats = folded_values(shift_digit_array(net.digits, shift, 3), 3)
        for i, row in enumerate(exact):
            for j, x in enumerate(row):
                assert floats[i, j] == pytest.approx(float(x.value), abs=1e-15)

    def test_no_shift_means_plain_fold(self):
        spec = PolyLatticeSpec(2, 2, 2, poly_from_string("1,1,1", 2),
                               (poly_from_string("0,1", 2),))
        net = net_from_poly(spec)
        out = fold_shifted_net(net)
        for i in range(net.size):
            x = BAdicReal(2, tuple(int(d) for d in net.digits[i, 0]), 0)
            assert out[i][0] == tent_fold(x)

    def test_base_mismatch(self):
        spec = PolyLatticeSpec(2, 1, 2, poly_from_string("1,1,1", 2),
                               (poly_from_string("1", 2),))
        net = net_from_poly(spec)
        with pytest.raises(ValueError):
            fold_shifted_net(net, ShiftVector(3, np.zeros((1, 2), dtype=np.uint8)))


class TestRngSpec:
    def test_generator_determinism(self):
        g1 = RngSpec(42, 7).generator()
        g2 = RngSpec(42, 7).generator()
        assert np.array_equal(g1.integers(0, 100, 10), g2.integers(0, 100, 10))

    def test_streams_differ(self):
        g1 = RngSpec(42, 0).generator()
        g2 = RngSpec(42, 1).generator()
        assert not np.array_equal(g1.integers(0, 100, 10), g2.integers(0, 100, 10))
