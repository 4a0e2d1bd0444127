"""Compare Green's functions with their asymptotic expansion.

The expansion around tangency point ``k`` is

    z_k^n kappa_k^j  sum_sigma n^{-sigma/(2 mu_k)} (P_sigma(X, d/dx) H)(X),
    X = (n alpha_k - j) / n^{1/(2 mu_k)},

and the remainder should obey ``|Err| <= C n^{-(s+1)/(2mu)} exp(-c|X|^{2mu/(2mu-1)})``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import MissingPolynomials, NotProbabilistic
from .expansion import BivariatePolynomial, assemble_expansion
from .gaussian import GeneralizedGaussianSpec, decay_rate, eval_H, eval_H_many
from .sequence import ComplexSequence, green_powers
from .symbol import SymbolProfile, TangencyPoint
from .varpi import default_jet_order, varpi_jet

__all__ = [
    "ScaledCoordinates",
    "scaled_coordinates",
    "gaussian_spec",
    "attractor",
    "expansion_value",
    "build_polynomials",
    "VerificationReport",
    "error_table",
    "envelope_check",
    "berry_esseen_check",
    "bounded_ratio",
]

Polys = Sequence[Sequence[BivariatePolynomial]]


@dataclass(frozen=True)
class ScaledCoordinates:
    X: float
    Y: Optional[float]


def scaled_coordinates(point: TangencyPoint, n: int, j: int) -> ScaledCoordinates:
    alpha, mu = point.alpha, point.mu
    X = (n * alpha - j) / n ** (1.0 / (2 * mu))
    ratio = j / alpha if alpha else 0.0
    Y = (n * alpha - j) / ratio ** (1.0 / (2 * mu)) if ratio > 0 else None
    return ScaledCoordinates(X=X, Y=Y)


def gaussian_spec(point: TangencyPoint, abs_tol: float = 1e-12) -> GeneralizedGaussianSpec:
    return GeneralizedGaussianSpec(point.mu, point.beta, abs_tol=abs_tol)


def _phase(point: TangencyPoint, n: int, js: np.ndarray) -> np.ndarray:
    return point.z ** n * np.exp(1j * point.theta_tilde * js)


def attractor(point: TangencyPoint, n: int, j, spec: Optional[GeneralizedGaussianSpec] = None):
    """Leading profile ``z^n kappa^j n^{-1/(2mu)} H((j - n alpha) / n^{1/(2mu)})``."""
    if n < 1:
        raise ValueError("n must be positive")
    spec = spec or gaussian_spec(point)
    js = np.asarray(j)
    scale = n ** (1.0 / (2 * point.mu))
    x = (js - n * point.alpha) / scale
    val = _phase(point, n, js) * eval_H(spec, 0, np.asarray(x, dtype=float)) / scale
    return complex(val) if np.ndim(j) == 0 else val


def build_polynomials(a: ComplexSequence, profile: SymbolProfile,
                      s_per_point: Sequence[int]) -> List[List[BivariatePolynomial]]:
    """Canonical expansion polynomials for every tangency point."""
    out = []
    for point, s in zip(profile.points, s_per_point):
        if s <= 0:
            out.append([])
            continue
        jet = varpi_jet(a, point, default_jet_order(point.mu, s))
        out.append(assemble_expansion(jet, s))
    return out


def _point_expansion(point: TangencyPoint, polys: Sequence[BivariatePolynomial], s: int,
                     n: int, js: np.ndarray, spec: GeneralizedGaussianSpec) -> np.ndarray:
    if len(polys) < s:
        raise MissingPolynomials(f"need {s} polynomials, got {len(polys)}")
    total = np.zeros(js.shape, dtype=np.complex128)
    if s == 0:
        return total
    mu = point.mu
    X = (n * point.alpha - js) / n ** (1.0 / (2 * mu))
    orders = sorted({b for q in polys[:s] for _, b in q.terms})
    H = eval_H_many(spec, orders, X) if orders else {}
    for sigma, q in enumerate(polys[:s], start=1):
        part = np.zeros(js.shape, dtype=np.complex128)
        for (deg_x, deg_y), c in q.terms.items():
            part += c * X ** deg_x * H[deg_y]
        total += part * n ** (-sigma / (2 * mu))
    return _phase(point, n, js) * total


def expansion_value(profile: SymbolProfile, polys: Polys, n: int, j,
                    s_per_point: Sequence[int],
                    specs: Optional[Sequence[GeneralizedGaussianSpec]] = None):
    """Truncated expansion summed over every tangency point."""
    if len(polys) < len(profile.points):
        raise MissingPolynomials("one polynomial family is needed per tangency point")
    js = np.asarray(j, dtype=float)
    total = np.zeros(js.shape, dtype=np.complex128)
    for k, point in enumerate(profile.points):
        spec = specs[k] if specs else gaussian_spec(point)
        total += _point_expansion(point, polys[k], s_per_point[k], n, js, spec)
    return complex(total) if np.ndim(j) == 0 else total


@dataclass
class VerificationReport:
    """Per-``(n, j)`` comparison table plus summary statistics."""

    n: np.ndarray
    j: np.ndarray
    green: np.ndarray
    expansion: np.ndarray
    X: np.ndarray  # shape (rows, points)
    s_per_point: Tuple[int, ...]
    mus: Tuple[int, ...]
    scaled_sup: Dict[int, float] = field(default_factory=dict)
    berry_esseen: Optional[Dict[int, float]] = None

    @property
    def err_abs(self) -> np.ndarray:
        return np.abs(self.green - self.expansion)

    @property
    def rate(self) -> float:
        return min((s + 1) / (2 * mu) for s, mu in zip(self.s_per_point, self.mus))

    @property
    def scaled_err(self) -> np.ndarray:
        return self.n.astype(float) ** self.rate * self.err_abs

    def rows(self):
        err = self.err_abs
        for i in range(len(self.n)):
            yield (int(self.n[i]), int(self.j[i]), complex(self.green[i]),
                   complex(self.expansion[i]), float(err[i]), tuple(self.X[i]))


def error_table(a: ComplexSequence, profile: SymbolProfile, polys: Polys,
                n_list: Sequence[int], s_per_point: Sequence[int], *,
                widen: bool = False, abs_tol: float = 1e-12,
                jobs: int = 1) -> VerificationReport:
    """Errors ``G^n_j - expansion`` over ``j in [-n p, n r]``.

    With ``widen=True`` the window is stretched to twice the support width,
    where the Green's function vanishes and the error is the expansion tail.
    ``jobs > 1`` evaluates the expansion for different ``n`` in worker threads;
    the output order does not depend on it.
    """
    st = a.stencil
    specs = [gaussian_spec(p, abs_tol) for p in profile.points]
    cols = {"n": [], "j": [], "green": [], "expansion": [], "X": []}
    scaled_sup = {}
    rate = min((s + 1) / (2 * p.mu) for s, p in zip(s_per_point, profile.points))
    windows = []
    for n, G in green_powers(a, n_list):
        if n < 1:
            raise ValueError("n must be positive")
        lo, hi = -n * st.p, n * st.r
        if widen:
            pad = (hi - lo) // 2
            lo, hi = lo - pad, hi + pad
        js = np.arange(lo, hi + 1)
        windows.append((n, js, G.values(js)))

    def expand(item):
        n, js, _ = item
        return expansion_value(profile, polys, n, js, s_per_point, specs)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(expand, windows))
    else:
        values = [expand(w) for w in windows]
    for (n, js, g), e in zip(windows, values):
        X = np.stack([(n * p.alpha - js) / n ** (1.0 / (2 * p.mu)) for p in profile.points],
                     axis=1)
        cols["n"].append(np.full(js.shape, n))
        cols["j"].append(js)
        cols["green"].append(g)
        cols["expansion"].append(e)
        cols["X"].append(X)
        scaled_sup[n] = float(n ** rate * np.max(np.abs(g - e)))
    return VerificationReport(
        n=np.concatenate(cols["n"]), j=np.concatenate(cols["j"]),
        green=np.concatenate(cols["green"]), expansion=np.concatenate(cols["expansion"]),
        X=np.concatenate(cols["X"]), s_per_point=tuple(s_per_point),
        mus=tuple(p.mu for p in profile.points), scaled_sup=scaled_sup)


def bounded_ratio(values: Dict[int, float], split: Optional[int] = None) -> float:
    """Max over the upper half of the n-range divided by max over the lower half."""
    ns = sorted(values)
    if split is None:
        split = (ns[0] + ns[-1]) / 2
    lower = [values[n] for n in ns if n <= split]
    upper = [values[n] for n in ns if n >= split]
    return max(upper) / max(lower)


def envelope_check(report: VerificationReport, profile: SymbolProfile,
                   s_per_point: Sequence[int], *, c0: Optional[Sequence[float]] = None,
                   exponent_scale: float = 1.0, noise_floor: float = 1e-11
                   ) -> List[Tuple[float, float, bool]]:
    """Fit ``C`` in ``|Err| <= C sum_k n^{-(s_k+1)/(2mu_k)} exp(-c_k |X_k|^{2mu_k/(2mu_k-1)})``.

    Rows with ``|Err|`` below ``noise_floor`` carry no information about the
    remainder and are skipped.  ``exponent_scale`` multiplies the decay
    exponent in ``n`` (used for negative controls).  ``ok`` requires the
    per-``n`` constants over the upper half of the n-range to stay within a
    factor of 2 of each other.
    """
    if len(report.n) == 0:
        raise ValueError("empty report")
    if c0 is None:
        c0 = [decay_rate(gaussian_spec(p)) / 4 for p in profile.points]
    n = report.n.astype(float)
    env = np.zeros(len(n))
    for k, (p, s) in enumerate(zip(profile.points, s_per_point)):
        power = 2 * p.mu / (2 * p.mu - 1)
        env += (n ** (-exponent_scale * (s + 1) / (2 * p.mu))
                * np.exp(-c0[k] * np.abs(report.X[:, k]) ** power))
    err = report.err_abs
    keep = err > noise_floor
    ratio = np.where(keep, err / env, 0.0)
    per_n = {}
    for nn in np.unique(report.n):
        per_n[int(nn)] = float(np.max(ratio[report.n == nn]))
    C = max(per_n.values())
    ns = sorted(per_n)
    mid = (ns[0] + ns[-1]) / 2
    upper = [per_n[m] for m in ns if m >= mid and per_n[m] > 0]
    stable = bool(upper) and max(upper) <= 2 * min(upper)
    ok = bool(np.isfinite(C)) and stable
    return [(C, float(c), ok) for c in c0]


def berry_esseen_check(a: ComplexSequence, n_list: Sequence[int]) -> Dict[int, float]:
    """``sqrt(n) sup_J |CDF of G^n - CDF of the sampled Gaussian|`` per ``n``.

    Raises
    ------
    NotProbabilistic
        Unless the coefficients are nonnegative reals summing to 1.
    """
    c = a.coefficients
    if (np.any(np.abs(c.imag) > 1e-12) or np.any(c.real < -1e-12)
            or abs(math.fsum(c.real) - 1) > 1e-12):
        raise NotProbabilistic("coefficients must be nonnegative reals summing to 1")
    b = a.reflected()
    w = b.coefficients.real
    offs = b.offsets.astype(float)
    mean = math.fsum(offs * w)
    var = math.fsum(offs ** 2 * w) - mean ** 2
    if var <= 0:
        raise NotProbabilistic("degenerate distribution (zero variance)")
    st = a.stencil
    out = {}
    for n, G in green_powers(a, n_list):
        if n < 1:
            raise ValueError("n must be positive")
        pad = int(math.ceil(10 * math.sqrt(n * var))) + 1
        js = np.arange(-n * st.p - pad, n * st.r + pad + 1)
        walk = np.cumsum(G.values(js).real)
        dens = np.exp(-(js - n * mean) ** 2 / (2 * n * var)) / math.sqrt(2 * math.pi * var * n)
        out[n] = float(math.sqrt(n) * np.max(np.abs(walk - np.cumsum(dens))))
    return out
