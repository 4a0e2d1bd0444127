import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convlimit.errors import AllZero, DuplicateOffset, Overflow
from convlimit.sequence import (ComplexSequence, convolve, delta, dump_sequence,
                                green_function, green_powers, load_sequence, lq_norm,
                                new_sequence, parse_value, shift_sequence)
from convlimit.symbol import eval_symbol


def brute_convolve(a, b):
    out = {}
    for i, x in a.items():
        for k, y in b.items():
            out[i + k] = out.get(i + k, 0) + x * y
    return out


def test_probabilistic_construction(prob):
    assert (prob.support_min, prob.support_max) == (-1, 1)
    assert (prob.stencil.r, prob.stencil.p) == (1, 1)
    assert prob.h1
    assert prob[-1] == pytest.approx(2 / 3, abs=1e-16)


def test_single_entry_fails_h1():
    a = new_sequence([(0, 1)])
    assert not a.h1


def test_o3_entries(o3):
    assert np.allclose(o3.coefficients, [-1 / 16, 9 / 16, 9 / 16, -1 / 16], atol=1e-16)
    assert o3.support_min == -2


def test_construction_errors():
    with pytest.raises(AllZero):
        new_sequence([(0, 0), (1, 0)])
    with pytest.raises(AllZero):
        new_sequence([])
    with pytest.raises(DuplicateOffset):
        new_sequence([(0, 1), (0, 2)])
    with pytest.raises(ValueError):
        new_sequence([(0.5, 1)])


def test_trimming():
    a = new_sequence([(-3, 0), (0, 1), (2, 2), (5, 0)])
    assert (a.support_min, a.support_max) == (0, 2)
    assert a[1] == 0


def test_stencil_cases():
    left = new_sequence([(-3, 0.5), (-1, 0.5)])
    right = new_sequence([(1, 0.5), (2, 0.5)])
    assert (left.stencil.r, left.stencil.p) == (3, 0)
    assert (right.stencil.r, right.stencil.p) == (0, 2)


def test_parse_value_rational():
    assert parse_value("2/3") == complex(float(Fraction(2, 3)))
    assert parse_value("1+2j") == 1 + 2j
    assert parse_value(Fraction(1, 6)) == 1 / 6


def test_delta_identity(prob):
    assert convolve(delta(), prob).allclose(prob)


def test_convolution_offset_minus_two(prob):
    assert convolve(prob, prob)[-2] == pytest.approx(4 / 9, abs=1e-15)


def test_green_small_powers(prob):
    assert green_function(prob, 0).allclose(delta())
    g1 = green_function(prob, 1)
    for j in range(-2, 3):
        assert g1[j] == prob[-j]
    assert green_function(prob, 2)[2] == pytest.approx(4 / 9, abs=1e-15)


def test_green_fft_matches_direct(o3):
    d = green_function(o3, 60)
    f = green_function(o3, 60, method="fft")
    assert d.allclose(f, atol=1e-13)


def test_overflow(prob):
    with pytest.raises(Overflow):
        green_function(prob, 10, limit=15)


def test_green_powers_matches_single(prob):
    for n, g in green_powers(prob, [7, 0, 3]):
        assert g.allclose(green_function(prob, n), atol=0)


@pytest.mark.parametrize("name", ["prob", "o3"])
def test_semigroup_mass_support(name, request):
    a = request.getfixturevalue(name)
    st_ = a.stencil
    f1 = eval_symbol(a, 1.0)
    for n, m in [(1, 1), (37, 63), (120, 80)]:
        lhs = green_function(a, n + m)
        rhs = convolve(green_function(a, n), green_function(a, m))
        assert lhs.allclose(rhs, atol=1e-10)
    for n in (1, 50, 200):
        g = green_function(a, n)
        assert abs(g.coefficients.sum() - f1 ** n) <= 1e-10 * abs(f1) ** n
        assert g.support_min >= -n * st_.p and g.support_max <= n * st_.r
        assert g.values([-n * st_.p - 1, n * st_.r + 1]).tolist() == [0, 0]


def test_shift(prob):
    assert shift_sequence(prob, 0).allclose(prob)
    b = shift_sequence(prob, 1)
    assert (b.support_min, b.support_max) == (-2, 0)
    n = 9
    gb, ga = green_function(b, n), green_function(prob, n)
    js = np.arange(-30, 30)
    assert np.array_equal(gb.values(js), ga.values(js - n * 1))


def test_norms(prob):
    for q in (1, 2, math.inf):
        assert lq_norm(delta(), q) == 1
    assert lq_norm(prob, 1) == pytest.approx(1, abs=1e-15)
    for n in (5, 40):
        assert lq_norm(green_function(prob, n), 1) == pytest.approx(1, abs=1e-12)


def test_l2_contraction(o3):
    norms = [lq_norm(green_function(o3, n), 2) for n in range(0, 60)]
    assert all(b <= a + 1e-14 for a, b in zip(norms, norms[1:]))


def test_json_roundtrip(tmp_path):
    text = '{"entries": [[-1, "2/3"], [0, "1/6", 0], [1, 0.1666666, "1/10"]]}'
    a = load_sequence(text, is_text=True)
    assert a[-1] == pytest.approx(2 / 3)
    assert a[1] == pytest.approx(0.1666666 + 0.1j)
    path = tmp_path / "seq.json"
    import json
    path.write_text(json.dumps(dump_sequence(a)))
    assert load_sequence(str(path)).allclose(a)


small_complex = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(small_complex, min_size=1, max_size=6), st.integers(-4, 4),
       st.lists(small_complex, min_size=1, max_size=6), st.integers(-4, 4))
def test_convolution_matches_double_sum(ca, la, cb, lb):
    if not any(ca) or not any(cb):
        return
    a, b = ComplexSequence(la, ca), ComplexSequence(lb, cb)
    expect = brute_convolve(a, b)
    got = convolve(a, b)
    for j, v in expect.items():
        assert abs(got[j] - v) <= 1e-12
    assert got.support_min >= a.support_min + b.support_min
    assert got.support_max <= a.support_max + b.support_max


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=5), st.integers(-3, 1),
       st.integers(1, 40), st.integers(-3, 3))
def test_shift_covariance_property(weights, lo, n, J):
    a = ComplexSequence(lo, weights)
    ga = green_function(a, n)
    gb = green_function(shift_sequence(a, J), n)
    js = np.arange(ga.support_min - 5, ga.support_max + 6)
    assert np.array_equal(gb.values(js + n * J), ga.values(js))
