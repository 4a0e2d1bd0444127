import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convlimit.errors import IndexOutOfRange, ZeroFirstMoment
from convlimit.sequence import new_sequence
from convlimit.symbol import eval_symbol, expand_at_tangency, moment
from convlimit.varpi import bell_polynomial, bell_table, default_jet_order, varpi_jet

from oracles import bell_by_enumeration, inverse_phase_jet

O3_EXACT = (("-2", "-1/16"), ("-1", "9/16"), ("0", "9/16"), ("1", "-1/16"))


def test_bell_small_cases():
    xs = [2.0, 3.0, 5.0, 7.0]
    assert bell_polynomial(0, 0, []) == 1
    for n in range(1, 5):
        assert bell_polynomial(n, 1, xs[:n]) == xs[n - 1]
        assert bell_polynomial(n, n, xs[:1]) == xs[0] ** n
    assert bell_polynomial(3, 2, xs[:2]) == 3 * xs[0] * xs[1]
    with pytest.raises(IndexOutOfRange):
        bell_polynomial(3, 4, xs)
    with pytest.raises(IndexOutOfRange):
        bell_polynomial(4, 1, xs[:2])


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=7, max_size=7))
def test_bell_matches_partition_enumeration(xs):
    B = bell_table(xs, 7)
    for n in range(1, 8):
        for j in range(1, n + 1):
            assert B[n, j] == bell_by_enumeration(n, j, xs)


def test_probabilistic_jet(prob):
    p = expand_at_tangency(prob, 1.0)
    jet = varpi_jet(prob, p, 6)
    assert jet.derivative(1) == pytest.approx(-2, abs=1e-13)
    assert jet.derivative(2) == pytest.approx(14 / 3, abs=1e-12)
    assert jet.derivative(0) == 0
    c = jet.consistency()
    assert c["first"] < 1e-12 and c["damping"] < 1e-9


def test_first_derivative_is_z_over_m1(o3):
    p = expand_at_tangency(o3, 1.0)
    jet = varpi_jet(o3, p, 8)
    assert abs(jet.derivative(1) - p.z / moment(o3, 1, p.kappa)) <= 1e-12
    assert abs(jet.derivative(2)) < 1e-9 and abs(jet.derivative(3)) < 1e-9
    c = jet.consistency()
    assert c["vanishing"] < 1e-9 and c["damping"] < 1e-9


def test_o3_jet_against_high_precision_oracle(o3):
    p = expand_at_tangency(o3, 1.0)
    jet = varpi_jet(o3, p, 8)
    ref = inverse_phase_jet(tuple((int(j), v) for j, v in O3_EXACT), 0.0, 8)
    for n in range(1, 9):
        assert abs(jet.derivative(n) - ref[n]) <= 1e-9 * max(1, abs(ref[n]))


def test_rotated_sequence_against_oracle():
    # complex coefficients, tangency at kappa = -1
    a = new_sequence([(-1, "1/6"), (0, "1/6"), (1, "2/3")]).scaled(1j)
    p = expand_at_tangency(a, 1.0)
    jet = varpi_jet(a, p, 6)
    ref = inverse_phase_jet((("-1", "0.16666666666666666j"), ("0", "0.16666666666666666j"),
                             ("1", "0.6666666666666666j")), 0.0, 6)
    for n in range(1, 7):
        assert abs(jet.derivative(n) - ref[n]) <= 1e-9 * max(1, abs(ref[n]))


@pytest.mark.parametrize("name", ["prob", "o3"])
def test_functional_identity_order(name, request):
    a = request.getfixturevalue(name)
    p = expand_at_tangency(a, 1.0)
    hs = [4e-2, 2e-2, 1e-2]
    for N in (2, 3, 4):
        jet = varpi_jet(a, p, N)
        for direction in (1.0, 1j):
            res = [abs(eval_symbol(a, np.exp(jet.taylor(direction * h)))
                       - np.exp(p.tau + direction * h)) for h in hs]
            order = math.log(res[0] / res[2]) / math.log(hs[0] / hs[2])
            assert order >= N - 0.5


def test_zero_first_moment():
    a = new_sequence([(-1, "1/4"), (0, "1/2"), (1, "1/4")])
    p = expand_at_tangency(a, 1.0)
    with pytest.raises(ZeroFirstMoment):
        varpi_jet(a, p, 4)


def test_default_order():
    assert default_jet_order(1, 2) == 6
    assert default_jet_order(2, 3) == 9
