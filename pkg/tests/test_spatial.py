import cmath
import math

import numpy as np
import pytest

from convlimit.errors import OnSpectrum
from convlimit.sequence import green_function, new_sequence
from convlimit.spatial import (annulus_margin, companion_matrix, contour_reconstruct,
                               contour_reconstruct_window, spatial_green, spectral_split)
from convlimit.symbol import eval_symbol


def banded_solve(a, z, half_width):
    """Truncated (z - L_a) G = delta on [-W, W] with zero outside values."""
    js = np.arange(-half_width, half_width + 1)
    size = len(js)
    M = np.zeros((size, size), dtype=complex)
    for row in range(size):
        M[row, row] += z
        for l, v in a.items():
            col = row + l
            if 0 <= col < size:
                M[row, col] -= v
    rhs = (js == 0).astype(complex)
    return js, np.linalg.solve(M, rhs)


def sample_z(rng, count):
    r = rng.uniform(1.05, 3, count)
    t = rng.uniform(-math.pi, math.pi, count)
    return r * np.exp(1j * t)


def test_split_at_two_matches_quadratic(prob):
    # kappa^2/6 + (1/6 - 2) kappa + 2/3 = 0
    qa, qb, qc = 1 / 6, 1 / 6 - 2, 2 / 3
    disc = cmath.sqrt(qb * qb - 4 * qa * qc)
    roots = sorted([(-qb + disc) / (2 * qa), (-qb - disc) / (2 * qa)], key=abs)
    assert abs(roots[0]) < 1 < abs(roots[1])
    eig = sorted(np.linalg.eigvals(companion_matrix(prob, 2)), key=abs)
    assert np.allclose(eig, roots, atol=1e-12)
    assert spectral_split(prob, 2) == (1, 0, 1)


@pytest.mark.parametrize("name", ["prob", "o3"])
def test_split_outside_spectrum(name, request):
    a = request.getfixturevalue(name)
    st_ = a.stencil
    for z in sample_z(np.random.default_rng(5), 200):
        assert spectral_split(a, z) == (st_.r, 0, st_.p)
        for k in np.linalg.eigvals(companion_matrix(a, z)):
            assert abs(eval_symbol(a, k) - z) <= 1e-9 * max(1, abs(z))


def test_split_at_tangency_values(prob, o3):
    assert spectral_split(prob, 1)[1] == 1
    assert spectral_split(o3, 1)[1] == 1
    pair = new_sequence([(-1, "1/5"), (0, "9/10"), (1, "-1/5"), (2, "1/10")])
    assert spectral_split(pair, 1)[1] == 2


def test_annulus_margin(prob, o3):
    assert annulus_margin(prob) == pytest.approx(-math.log(2 / 3) / 2)
    assert annulus_margin(o3) == pytest.approx(math.log(16) / 2)
    with pytest.raises(ValueError):
        spectral_split(prob, 0.5)


def test_spatial_green_residual_and_oracle(prob):
    g = spatial_green(prob, 2, (-30, 30), tol=1e-10)
    assert g.residual <= 1e-10
    js, ref = banded_solve(prob, 2, 200)
    window = (js >= -30) & (js <= 30)
    assert np.max(np.abs(g.values - ref[window])) <= 1e-12


def test_spatial_green_decay(o3):
    g = spatial_green(o3, 1.5j, (-40, 40), tol=1e-13)
    js = np.arange(-40, 41)
    mags = np.abs(g.values)
    far = (np.abs(js) >= 5) & (mags > 1e-14)
    slope = np.polyfit(np.abs(js[far]), np.log(mags[far]), 1)[0]
    assert slope < 0
    C = np.max(mags * np.exp(-slope * np.abs(js)))
    assert np.all(mags <= C * np.exp(slope * np.abs(js)) * (1 + 1e-9))


def test_spatial_green_linearity(prob):
    # shifted right-hand sides combine linearly: G for delta_m is G shifted by m
    z = 1.7 + 0.4j
    g = spatial_green(prob, z, (-25, 25)).as_dict()
    js, ref2 = banded_solve(prob, z, 200)
    M_rhs = 0.3 * (js == 0) + (2 - 1j) * (js == 3)
    combo = [0.3 * g.get(j, 0) + (2 - 1j) * g.get(j - 3, 0) for j in range(-20, 21)]
    size = len(js)
    M = np.zeros((size, size), dtype=complex)
    for row in range(size):
        M[row, row] += z
        for l, v in prob.items():
            if 0 <= row + l < size:
                M[row, row + l] -= v
    sol = np.linalg.solve(M, M_rhs)
    sel = (js >= -20) & (js <= 20)
    assert np.max(np.abs(sol[sel] - np.array(combo))) <= 1e-10


def test_on_spectrum(prob):
    with pytest.raises(OnSpectrum):
        spatial_green(prob, eval_symbol(prob, np.exp(0.4j)))


def test_contour_trivial_cases(prob):
    assert contour_reconstruct(prob, 0, 0) == pytest.approx(1, abs=1e-13)
    assert contour_reconstruct(prob, 0, 1) == pytest.approx(0, abs=1e-13)
    for j in (-1, 0, 1):
        assert contour_reconstruct(prob, 1, j) == pytest.approx(prob[-j], abs=1e-13)


@pytest.mark.parametrize("name", ["prob", "o3"])
@pytest.mark.parametrize("radius", [1.2, math.exp(0.2)])
def test_contour_matches_convolution(name, radius, request):
    a = request.getfixturevalue(name)
    st_ = a.stencil
    window = (-20 * st_.p, 20 * st_.r)
    rec = contour_reconstruct_window(a, range(21), window, radius, 512)
    js = np.arange(window[0], window[1] + 1)
    for n in range(21):
        assert np.max(np.abs(rec[n] - green_function(a, n).values(js))) <= 1e-8


def test_contour_argument_checks(prob):
    with pytest.raises(ValueError):
        contour_reconstruct(prob, 3, 0, radius=0.9)
    with pytest.raises(ValueError):
        contour_reconstruct(prob, 3, 0, quad_points=32)
