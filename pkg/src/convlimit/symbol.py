"""Symbol evaluation, tangency detection and the local log-expansion.

The symbol of ``a`` is the Laurent polynomial ``F(kappa) = sum_j a_j kappa^j``.
Tangency points are the points of the unit circle where ``|F| = 1``; at each
one the logarithm of ``F(kappa e^{i xi}) / F(kappa)`` is expanded in ``xi``
to read off the drift ``alpha``, the dissipation order ``mu`` and the
coefficient ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import List, Optional, Sequence

import numpy as np

from .errors import (AmbiguousCluster, DissipationNotDetected, NonDissipative,
                     SupercriticalSymbol, ZeroArgument)
from .sequence import ComplexSequence
from .varpi import bell_table

__all__ = [
    "TangencyPoint",
    "HypothesisReport",
    "SymbolProfile",
    "eval_symbol",
    "moment",
    "locate_tangency_points",
    "expand_at_tangency",
    "check_hypotheses",
    "boundary_coefficient_check",
    "log_taylor_coefficients",
]

DEFAULT_GRID = 8192
DEFAULT_TOL = 1e-10
NILPOTENCE_TOL = 1e-9
ALPHA_REAL_TOL = 1e-9


def eval_symbol(a: ComplexSequence, kappa):
    """``F(kappa)``; ``kappa`` may be a scalar or an array of nonzero values."""
    return moment(a, 0, kappa)


def moment(a: ComplexSequence, n: int, kappa):
    """``M_n(kappa) = sum_j j^n a_j kappa^j``.

    Evaluated by Horner's scheme separately on the nonnegative and negative
    powers so that no power of ``kappa`` is formed explicitly.
    """
    scalar = np.ndim(kappa) == 0
    k = np.asarray(kappa, dtype=np.complex128)
    if np.any(k == 0):
        raise ZeroArgument("the symbol is not defined at kappa = 0")
    js = a.offsets
    w = a.coefficients * (js.astype(float) ** n if n else 1.0)
    pos = js >= 0
    out = np.zeros(k.shape, dtype=np.complex128)
    # nonnegative powers: sum_{j>=0} w_j k^j
    if np.any(pos):
        jmin = max(0, a.support_min)
        acc = np.zeros(k.shape, dtype=np.complex128)
        for coef in w[pos][::-1]:
            acc = acc * k + coef
        out += acc * k ** jmin if jmin else acc
    neg = ~pos
    if np.any(neg):
        # sum_{j<0} w_j k^j = sum_{m>=1} w_{-m} (1/k)^m
        inv = 1.0 / k
        jmax = min(-1, a.support_max)
        acc = np.zeros(k.shape, dtype=np.complex128)
        for coef in w[neg]:
            acc = acc * inv + coef
        out += acc * inv ** (-jmax)
    return complex(out) if scalar else out


def _abs2_derivatives(a: ComplexSequence, t: float):
    """|F|^2 and its first two derivatives along kappa = e^{it}."""
    k = np.exp(1j * t)
    F = moment(a, 0, k)
    dF = 1j * moment(a, 1, k)
    d2F = -moment(a, 2, k)
    g = abs(F) ** 2
    g1 = 2.0 * (np.conj(F) * dF).real
    g2 = 2.0 * (abs(dF) ** 2 + (np.conj(F) * d2F).real)
    return g, g1, g2


def _refine_maximum(a: ComplexSequence, t0: float, h: float,
                    max_iter: int = 200) -> float:
    """Newton iteration on d/dt |F(e^{it})|^2 started from a grid maximum.

    Degenerate (flat, ``mu >= 2``) maxima make Newton linear; the best point
    visited is returned.
    """
    t = best_t = t0
    best_g = _abs2_derivatives(a, t0)[0]
    for _ in range(max_iter):
        g, g1, g2 = _abs2_derivatives(a, t)
        if g > best_g:
            best_g, best_t = g, t
        if not g2 < 0:
            break
        step = max(-h, min(h, -g1 / g2))
        if abs(step) < 1e-15 or abs(t + step - t0) > 2 * h:
            break
        t += step
    g = _abs2_derivatives(a, t)[0]
    return t if g > best_g else best_t


def _wrap(t: float) -> float:
    """Map an angle to (-pi, pi]."""
    t = math.remainder(t, 2 * math.pi)
    return math.pi if t == -math.pi else t


def locate_tangency_points(a: ComplexSequence, grid_size: int = DEFAULT_GRID,
                           tol: float = DEFAULT_TOL) -> List[complex]:
    """Points of the unit circle where ``|F| = 1``.

    All discrete local maxima of ``|F(e^{it})|^2`` on a uniform grid are
    refined by Newton's method; the refined points with ``||F| - 1| <= tol``
    are returned, sorted by angle in (-pi, pi].

    Raises
    ------
    SupercriticalSymbol
        If ``max |F| > 1 + tol`` on the circle.
    AmbiguousCluster
        If two distinct refined maxima are closer than the grid spacing, or
        ``|F|`` is constant on the circle.
    """
    if grid_size < 256:
        raise ValueError("grid_size must be at least 256")
    h = 2 * math.pi / grid_size
    t = -math.pi + h * np.arange(grid_size)
    g = np.abs(eval_symbol(a, np.exp(1j * t))) ** 2
    if g.max() > (1 + tol) ** 2:
        raise SupercriticalSymbol(
            f"max |F| on the grid is {math.sqrt(g.max()):.15g} > 1 + {tol:g}")
    if g.max() - g.min() <= 4 * tol:
        raise AmbiguousCluster("|F| is constant on the unit circle")
    prev, nxt = np.roll(g, 1), np.roll(g, -1)
    candidates = np.flatnonzero((g >= prev) & (g >= nxt))
    refined = []
    for idx in candidates:
        tr = _refine_maximum(a, float(t[idx]), h)
        modulus = abs(eval_symbol(a, np.exp(1j * tr)))
        if modulus > 1 + tol:
            raise SupercriticalSymbol(
                f"|F| reaches {modulus:.15g} > 1 + {tol:g} near t={tr:.6g}")
        if abs(modulus - 1) <= tol:
            refined.append(_wrap(tr))
    refined.sort()
    merged: List[float] = []
    for tr in refined:
        if merged and abs(tr - merged[-1]) <= 1e-9:
            continue
        merged.append(tr)
    if len(merged) > 1 and abs(merged[0] + 2 * math.pi - merged[-1]) <= 1e-9:
        merged.pop()
    for t1, t2 in zip(merged, merged[1:] + [merged[0] + 2 * math.pi] if merged else []):
        if len(merged) > 1 and abs(t2 - t1) < h:
            raise AmbiguousCluster(
                f"tangency candidates at t={t1:.6g} and t={t2:.6g} are closer "
                f"than the grid spacing {h:.3g}")
    return [complex(np.exp(1j * tr)) for tr in merged]


def log_taylor_coefficients(a: ComplexSequence, kappa: complex,
                            max_order: int) -> np.ndarray:
    """Taylor coefficients ``c_0..c_max_order`` of ``log(F(kappa e^{i xi}) / F(kappa))``.

    The derivatives ``i^n M_n(kappa) / F(kappa)`` of the inner function are
    composed with the logarithm through Faa di Bruno's formula.
    """
    z = eval_symbol(a, kappa)
    f = np.array([(1j ** n) * moment(a, n, kappa) / z
                  for n in range(1, max_order + 1)], dtype=np.complex128)
    B = bell_table(f, max_order)
    c = np.zeros(max_order + 1, dtype=np.complex128)
    for n in range(1, max_order + 1):
        total = 0j
        for j in range(1, n + 1):
            total += (-1) ** (j - 1) * math.factorial(j - 1) * B[n, j]
        c[n] = total / math.factorial(n)
    return c


@dataclass(frozen=True)
class TangencyPoint:
    kappa: complex
    z: complex
    tau: complex
    theta_tilde: float
    alpha: float
    mu: int
    beta: complex
    case_tag: Optional[str] = None
    alpha_imag_residual: float = 0.0

    @property
    def theta(self) -> float:
        return self.tau.imag

    def with_case(self, tag: Optional[str]) -> "TangencyPoint":
        d = asdict(self)
        d["case_tag"] = tag
        return TangencyPoint(**d)

    def to_json(self) -> dict:
        return {
            "kappa_re": self.kappa.real,
            "kappa_im": self.kappa.imag,
            "theta": self.theta,
            "theta_tilde": self.theta_tilde,
            "z_re": self.z.real,
            "z_im": self.z.imag,
            "alpha": self.alpha,
            "mu": self.mu,
            "beta_re": self.beta.real,
            "beta_im": self.beta.imag,
            "case": self.case_tag,
        }

    @classmethod
    def from_json(cls, d: dict) -> "TangencyPoint":
        kappa = complex(d["kappa_re"], d["kappa_im"])
        z = complex(d.get("z_re", math.cos(d["theta"])), d.get("z_im", math.sin(d["theta"])))
        return cls(kappa=kappa, z=z, tau=1j * d["theta"],
                   theta_tilde=d.get("theta_tilde", math.atan2(kappa.imag, kappa.real)),
                   alpha=d["alpha"], mu=int(d["mu"]),
                   beta=complex(d["beta_re"], d["beta_im"]), case_tag=d.get("case"))


def expand_at_tangency(a: ComplexSequence, kappa: complex, max_order: int = 12,
                       nilpotence_tol: float = NILPOTENCE_TOL,
                       tol: float = 1e-8) -> TangencyPoint:
    """Drift, dissipation order and damping coefficient at a tangency point.

    Uses ``log(F(kappa e^{i xi})/z) = c_1 xi + c_2 xi^2 + ...``:
    ``alpha = i c_1``, ``mu`` is fixed by the first significant ``c_m``
    (``m = 2 mu``) and ``beta = -c_{2 mu}``.

    Raises
    ------
    DissipationNotDetected
        If no significant even coefficient of order <= ``max_order`` precedes
        the first odd one.
    NonDissipative
        If the leading even coefficient has ``Re(-c_{2 mu}) <= 0``.
    """
    kappa = complex(kappa)
    z = eval_symbol(a, kappa)
    if abs(abs(z) - 1) > tol:
        raise ValueError(f"|F(kappa)| = {abs(z):.15g} is not 1")
    c = log_taylor_coefficients(a, kappa, max_order)
    i_c1 = 1j * c[1]
    alpha = float(i_c1.real)
    scale = max(float(np.max(np.abs(c[1:]))), 1e-300)
    threshold = nilpotence_tol * scale
    order = None
    for m in range(2, max_order + 1):
        if abs(c[m]) > threshold:
            order = m
            break
    if order is None:
        raise DissipationNotDetected(
            f"no significant coefficient up to order {max_order}")
    if order % 2:
        raise DissipationNotDetected(
            f"leading coefficient beyond the drift has odd order {order} "
            f"(dispersive symbol)")
    mu = order // 2
    beta = complex(-c[order])
    if beta.real <= 0:
        raise NonDissipative(f"Re(beta) = {beta.real:.3g} <= 0 at order {order}")
    theta = float(np.angle(z))
    if theta == -math.pi:
        theta = math.pi
    theta_tilde = float(np.angle(kappa))
    if theta_tilde == -math.pi:
        theta_tilde = math.pi
    return TangencyPoint(kappa=kappa, z=complex(z / abs(z)), tau=1j * theta,
                         theta_tilde=theta_tilde, alpha=alpha, mu=mu, beta=beta,
                         alpha_imag_residual=float(abs(i_c1.imag)))


@dataclass
class HypothesisReport:
    h1: bool = False
    h2: bool = False
    h2_bis: bool = False
    h3: bool = False
    max_modulus: float = float("nan")
    diagnostics: List[str] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return self.h1 and (self.h2 or self.h2_bis) and self.h3

    def to_json(self) -> dict:
        return {"H1": self.h1, "H2": self.h2, "H2_bis": self.h2_bis,
                "H3": self.h3, "max_modulus": self.max_modulus,
                "diagnostics": list(self.diagnostics)}


@dataclass
class SymbolProfile:
    sequence: ComplexSequence
    points: List[TangencyPoint]
    hypothesis_report: HypothesisReport

    @property
    def suggested_shift(self) -> Optional[int]:
        """Shift J making every drift nonzero, when some drift vanishes."""
        if not any(abs(p.alpha) < ALPHA_REAL_TOL for p in self.points):
            return None
        return int(math.floor(max(abs(p.alpha) for p in self.points))) + 1

    def to_json(self) -> dict:
        st = self.sequence.stencil
        return {
            "sequence": [[j, v.real, v.imag] for j, v in self.sequence.items()],
            "r": st.r,
            "p": st.p,
            "hypotheses": self.hypothesis_report.to_json(),
            "suggested_shift": self.suggested_shift,
            "points": [p.to_json() for p in self.points],
        }


def _group_by_value(points: Sequence[TangencyPoint], tol: float = 1e-9):
    groups: List[List[int]] = []
    for i, p in enumerate(points):
        for g in groups:
            if abs(points[g[0]].z - p.z) <= tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def check_hypotheses(a: ComplexSequence, *, grid_size: int = DEFAULT_GRID,
                     tol: float = DEFAULT_TOL, max_order: int = 12,
                     kappas: Optional[Sequence[complex]] = None) -> SymbolProfile:
    """Full profile of ``a``: tangency points and Hypotheses 1, 2, 2-bis, 3.

    ``kappas`` overrides the automatic tangency search.  Verdicts and
    diagnostics are carried in the report; nothing is raised for a failed
    hypothesis.
    """
    report = HypothesisReport(h1=a.h1)
    if not a.h1:
        report.diagnostics.append("H1 violated: fewer than two nonzero coefficients")
    t = np.linspace(-math.pi, math.pi, grid_size, endpoint=False)
    report.max_modulus = float(np.max(np.abs(eval_symbol(a, np.exp(1j * t)))))
    points: List[TangencyPoint] = []
    located = True
    try:
        if kappas is None:
            kappas = locate_tangency_points(a, grid_size, tol)
        else:
            kappas = [complex(k) for k in kappas]
    except (SupercriticalSymbol, AmbiguousCluster) as exc:
        report.diagnostics.append(f"H2 violated: {exc}")
        kappas = []
        located = False
    if located and not kappas:
        report.diagnostics.append(
            f"H2 violated: max |F| = {report.max_modulus:.15g} < 1 "
            "(normalize the sequence so that max |F| = 1)")
        located = False
    expanded = located
    for kappa in kappas:
        try:
            points.append(expand_at_tangency(a, kappa, max_order))
        except (DissipationNotDetected, NonDissipative, ValueError) as exc:
            report.diagnostics.append(f"H2 violated at kappa={kappa:.6g}: {exc}")
            expanded = False
    if expanded and points:
        zero_drift = [p for p in points if abs(p.alpha) < ALPHA_REAL_TOL]
        bad_alpha = [p for p in points if p.alpha_imag_residual > ALPHA_REAL_TOL]
        for p in bad_alpha:
            report.diagnostics.append(
                f"drift at kappa={p.kappa:.6g} has imaginary residue "
                f"{p.alpha_imag_residual:.3g}")
        report.h2_bis = not bad_alpha
        report.h2 = report.h2_bis and not zero_drift
        if zero_drift:
            report.diagnostics.append(
                "H2 violated: zero drift at "
                + ", ".join(f"kappa={p.kappa:.6g}" for p in zero_drift)
                + "; H2-bis holds")
    groups = _group_by_value(points)
    h3 = bool(points)
    tags: List[Optional[str]] = [None] * len(points)
    for g in groups:
        if len(g) == 1:
            alpha = points[g[0]].alpha
            if abs(alpha) >= ALPHA_REAL_TOL:
                tags[g[0]] = "I" if alpha > 0 else "II"
        elif len(g) == 2 and points[g[0]].alpha * points[g[1]].alpha <= 0:
            if min(abs(points[i].alpha) for i in g) >= ALPHA_REAL_TOL:
                tags[g[0]] = tags[g[1]] = "III"
        else:
            h3 = False
            report.diagnostics.append(
                f"H3 violated: {len(g)} tangency points share z="
                f"{points[g[0]].z:.6g}")
    report.h3 = h3
    points = [p.with_case(tag) for p, tag in zip(points, tags)]
    return SymbolProfile(sequence=a, points=points, hypothesis_report=report)


def boundary_coefficient_check(a: ComplexSequence) -> bool:
    """``|a_{-r}| < 1`` and ``|a_p| < 1``, implied by Hypotheses 1 and 2."""
    st = a.stencil
    return abs(a[-st.r]) < 1 and abs(a[st.p]) < 1
