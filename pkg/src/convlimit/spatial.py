"""Resolvent-side diagnostics used as an independent oracle.

The spatial Green's function ``G(z)`` solves ``(z - L_a) G = delta``.  It is
computed from its Fourier representation with an FFT whose size is doubled
until the values on the requested window stop changing.  A contour integral
of ``z^n G(z)`` over a circle then recovers the temporal Green's function
without any convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

import numpy as np

from .errors import IllConditioned, OnSpectrum, QuadratureNonConvergence
from .sequence import ComplexSequence
from .symbol import eval_symbol

__all__ = [
    "companion_matrix",
    "annulus_margin",
    "spectral_split",
    "SpatialGreen",
    "spatial_green",
    "contour_reconstruct",
    "contour_reconstruct_window",
    "DEFAULT_RADIUS",
]

EPS_UNIT = 1e-6
DEFAULT_RADIUS = math.exp(0.2)
_SPECTRUM_SAMPLES = 4096
_MAX_FFT = 1 << 22


def _resolvent_coefficients(a: ComplexSequence, z: complex) -> Tuple[np.ndarray, int, int]:
    """``A_l = z delta_{l0} - a_l`` for ``l = -r .. p``."""
    st = a.stencil
    ls = np.arange(-st.r, st.p + 1)
    coeffs = -a.values(ls)
    coeffs[st.r] += z
    return coeffs, st.r, st.p


def companion_matrix(a: ComplexSequence, z: complex) -> np.ndarray:
    """Companion matrix whose eigenvalues ``kappa`` solve ``F(kappa) = z``."""
    A, r, p = _resolvent_coefficients(a, z)
    size = p + r
    if size == 0:
        raise ValueError("stencil has no width")
    lead = A[-1]
    if lead == 0:
        raise IllConditioned("leading resolvent coefficient vanishes")
    M = np.zeros((size, size), dtype=np.complex128)
    M[0, :] = -A[-2::-1] / lead
    M[np.arange(1, size), np.arange(size - 1)] = 1.0
    return M


def annulus_margin(a: ComplexSequence) -> float:
    """Half of the largest ``eta`` with ``|a_{-r}|, |a_p| < exp(-eta)``."""
    st = a.stencil
    edge = max(abs(a[-st.r]), abs(a[st.p]))
    if edge == 0:
        return math.inf
    return -math.log(edge) / 2


def spectral_split(a: ComplexSequence, z: complex, *, eps_unit: float = EPS_UNIT,
                   tol: float = 1e-9) -> Tuple[int, int, int]:
    """Eigenvalues of the companion matrix counted inside, on and outside the unit circle.

    Raises
    ------
    IllConditioned
        If some eigenvalue fails ``|F(kappa) - z| <= tol`` (relative to the
        size of the terms of ``F(kappa)``).
    """
    eta = annulus_margin(a)
    if math.isfinite(eta) and abs(z) <= math.exp(-eta):
        raise ValueError(f"|z| = {abs(z):.3g} lies inside the excluded disk")
    kappas = np.linalg.eigvals(companion_matrix(a, z))
    for k in kappas:
        if k == 0:
            raise IllConditioned("zero eigenvalue")
        scale = 1.0 + float(np.sum(np.abs(a.coefficients) * np.abs(k) ** a.offsets))
        if abs(eval_symbol(a, k) - z) > tol * scale:
            raise IllConditioned(f"eigenvalue {k:.6g} has residual "
                                 f"{abs(eval_symbol(a, k) - z):.3g}")
    mod = np.abs(kappas)
    stable = int(np.sum(mod < 1 - eps_unit))
    unstable = int(np.sum(mod > 1 + eps_unit))
    return stable, len(kappas) - stable - unstable, unstable


@dataclass(frozen=True)
class SpatialGreen:
    z: complex
    j_min: int
    values: np.ndarray
    residual: float

    @property
    def j_max(self) -> int:
        return self.j_min + len(self.values) - 1

    def __getitem__(self, j: int) -> complex:
        if not self.j_min <= j <= self.j_max:
            raise IndexError(f"j={j} outside computed window")
        return complex(self.values[j - self.j_min])

    def as_dict(self) -> Dict[int, complex]:
        return {self.j_min + i: complex(v) for i, v in enumerate(self.values)}


def _spectrum_distance(a: ComplexSequence, z: complex) -> float:
    """Distance from ``z`` to the curve ``F(S^1)``: grid scan, then golden-section refinement."""
    t = np.linspace(-np.pi, np.pi, _SPECTRUM_SAMPLES, endpoint=False)
    d = np.abs(eval_symbol(a, np.exp(1j * t)) - z)
    h = 2 * np.pi / _SPECTRUM_SAMPLES
    best = float(d.min())
    lipschitz = float(np.sum(np.abs(a.offsets * a.coefficients)))
    if best - lipschitz * h / 2 > 0:
        # the grid already bounds the true distance away from zero
        return best - lipschitz * h / 2
    for i in np.argsort(d)[:4]:
        lo, hi = t[i] - h, t[i] + h
        dist = lambda s: abs(eval_symbol(a, np.exp(1j * s)) - z)
        ratio = (math.sqrt(5) - 1) / 2
        for _ in range(80):
            m1, m2 = hi - ratio * (hi - lo), lo + ratio * (hi - lo)
            if dist(m1) < dist(m2):
                hi = m2
            else:
                lo = m1
        best = min(best, dist(0.5 * (lo + hi)))
    return best


def _fft_green(a: ComplexSequence, z: complex, N: int) -> np.ndarray:
    t = 2 * np.pi * np.arange(N) / N
    g = 1.0 / (z - eval_symbol(a, np.exp(1j * t)))
    # G_j = (1/N) sum_k g_k e^{i j t_k}, stored at position j mod N
    return np.fft.ifft(g)


def spatial_green(a: ComplexSequence, z: complex, j_window: Tuple[int, int] = (-30, 30),
                  tol: float = 1e-10) -> SpatialGreen:
    """The decaying solution of ``(z - L_a) G = delta`` on ``j_window`` (inclusive).

    Raises
    ------
    OnSpectrum
        If ``z`` lies within ``10 tol`` of the curve ``F(S^1)``.
    """
    z = complex(z)
    if _spectrum_distance(a, z) < 10 * tol:
        raise OnSpectrum(f"z = {z} is on the spectrum of the operator")
    lo, hi = int(j_window[0]), int(j_window[1])
    st = a.stencil
    span = max(abs(lo), abs(hi)) + st.r + st.p + 1
    N = 256
    while N < 4 * span:
        N *= 2
    js = np.arange(lo - st.r, hi + st.p + 1)
    prev = _fft_green(a, z, N)[js % N]
    while True:
        N *= 2
        if N > _MAX_FFT:
            raise QuadratureNonConvergence(f"spatial Green's function unresolved at z = {z}")
        cur = _fft_green(a, z, N)[js % N]
        if np.max(np.abs(cur - prev)) <= tol:
            break
        prev = cur
    A, r, p = _resolvent_coefficients(a, z)
    width = hi - lo + 1
    lhs = np.zeros(width, dtype=np.complex128)
    for i, coef in enumerate(A):
        lhs += coef * cur[i:i + width]
    target = (np.arange(lo, hi + 1) == 0).astype(float)
    residual = float(np.max(np.abs(lhs - target)))
    return SpatialGreen(z=z, j_min=lo, values=cur[r:r + width].copy(), residual=residual)


def _nodes(radius: float, quad_points: int) -> np.ndarray:
    if radius <= 1:
        raise ValueError("radius must exceed 1")
    if quad_points < 64:
        raise ValueError("need at least 64 quadrature points")
    return radius * np.exp(2j * np.pi * np.arange(quad_points) / quad_points)


def contour_reconstruct_window(a: ComplexSequence, n_values: Iterable[int],
                               j_window: Tuple[int, int], radius: float = DEFAULT_RADIUS,
                               quad_points: int = 512, tol: float = 1e-13
                               ) -> Dict[int, np.ndarray]:
    """``{n: G^n_j for j in j_window}`` via the trapezoid rule on ``|z| = radius``."""
    ns = sorted(set(int(n) for n in n_values))
    zs = _nodes(radius, quad_points)
    lo, hi = j_window
    acc = {n: np.zeros(hi - lo + 1, dtype=np.complex128) for n in ns}
    for zq in zs:
        g = spatial_green(a, zq, (lo, hi), tol).values
        for n in ns:
            acc[n] += zq ** (n + 1) * g
    return {n: v / quad_points for n, v in acc.items()}


def contour_reconstruct(a: ComplexSequence, n: int, j: int, radius: float = DEFAULT_RADIUS,
                        quad_points: int = 512) -> complex:
    """``(1 / 2 pi i) \\oint z^n G_j(z) dz`` over the circle ``|z| = radius``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = contour_reconstruct_window(a, [n], (j, j), radius, quad_points)
    return complex(out[n][0])
