"""Expansion polynomials in ``(X, Y)`` assembled from the ``varpi`` jet.

``X`` stands for the scaled variable ``(n alpha - j) / n^{1/(2 mu)}`` and
``Y^m`` for the m-th derivative of the generalized Gaussian, so a monomial
``c X^a Y^b`` acts as ``c x^a H^{(b)}(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InsufficientJetOrder, WindowViolation, ZeroDrift
from .gaussian import GeneralizedGaussianSpec, eval_H_many
from .varpi import VarpiJet

__all__ = [
    "BivariatePolynomial",
    "ProofPolynomials",
    "CoefficientLedger",
    "build_proof_polynomials",
    "ledger_A",
    "ledger_B",
    "build_ledger",
    "assemble_expansion",
    "reduce_via_recurrence",
    "apply_to_gaussian",
]

PRUNE_REL = 1e-14
WINDOW_TOL = 1e-12

Key = Tuple[int, int]


@dataclass
class BivariatePolynomial:
    """Sparse polynomial in ``X`` and ``Y`` keyed by ``(degX, degY)``."""

    terms: Dict[Key, complex] = field(default_factory=dict)
    sigma: Optional[int] = None
    s: Optional[int] = None

    def __post_init__(self):
        self.terms = {(int(a), int(b)): complex(c) for (a, b), c in self.terms.items() if c != 0}

    def add(self, deg_x: int, deg_y: int, coeff: complex) -> None:
        key = (deg_x, deg_y)
        total = self.terms.get(key, 0j) + coeff
        if total == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    def coefficient(self, deg_x: int, deg_y: int) -> complex:
        return self.terms.get((deg_x, deg_y), 0j)

    def pruned(self, rel: float = PRUNE_REL) -> "BivariatePolynomial":
        """Drop coefficients below ``rel`` times the largest one."""
        if not self.terms:
            return BivariatePolynomial({}, self.sigma, self.s)
        scale = max(abs(c) for c in self.terms.values())
        kept = {k: c for k, c in self.terms.items() if abs(c) > rel * scale}
        return BivariatePolynomial(kept, self.sigma, self.s)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_x_free(self) -> bool:
        return all(a == 0 for a, _ in self.terms)

    @property
    def y_degrees(self) -> List[int]:
        return sorted({b for _, b in self.terms})

    def to_json(self) -> dict:
        rows = [[a, b, c.real, c.imag] for (a, b), c in sorted(self.terms.items())]
        out = {"sigma": self.sigma, "terms": rows}
        if self.s is not None:
            out["s"] = self.s
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BivariatePolynomial":
        terms = {}
        for a, b, re, im in data["terms"]:
            terms[(int(a), int(b))] = terms.get((int(a), int(b)), 0j) + complex(re, im)
        return cls(terms, data.get("sigma"), data.get("s"))

    def __repr__(self):
        body = " + ".join(f"({c:.6g})X^{a}Y^{b}" for (a, b), c in sorted(self.terms.items()))
        return f"BivariatePolynomial(sigma={self.sigma}, {body or '0'})"


@dataclass(frozen=True)
class ProofPolynomials:
    """Truncated Taylor data around ``tau_k`` in the variable ``t = tau - tau_k``."""

    P: Polynomial
    phi: Polynomial
    Q: Polynomial
    R: Polynomial
    s: int
    mu: int
    alpha: float


def _coef(poly: Polynomial, k: int) -> complex:
    c = poly.coef
    return complex(c[k]) if 0 <= k < len(c) else 0j


def build_proof_polynomials(jet: VarpiJet, s: int) -> ProofPolynomials:
    """``P_s``, ``phi``, ``Q_s`` and ``R_s = Q_s - phi`` for expansion order ``s``.

    ``Q_s`` and ``phi`` agree through degree ``2 mu`` by construction, so
    those coefficients of ``R_s`` are set to exactly zero.
    """
    if s < 1:
        raise ValueError("s must be positive")
    p = jet.point
    mu, alpha, beta = p.mu, p.alpha, p.beta
    if jet.order < 2 * mu + s:
        raise InsufficientJetOrder(f"need jet order {2 * mu + s}, have {jet.order}")
    sign = 1.0 if alpha > 0 else -1.0
    P = Polynomial([-sign * jet.derivative(l + 1) / math.factorial(l) for l in range(s)])
    phi_c = np.zeros(2 * mu + 1, dtype=np.complex128)
    phi_c[0] = 1j * p.theta_tilde
    phi_c[1] = -1.0 / alpha
    phi_c[2 * mu] += (-1) ** (mu + 1) * beta / alpha ** (2 * mu + 1)
    phi = Polynomial(phi_c)
    Q = Polynomial([jet.derivative(l) / math.factorial(l) for l in range(2 * mu + s)])
    r = np.zeros(2 * mu + s, dtype=np.complex128)
    r[2 * mu + 1:] = Q.coef[2 * mu + 1:]
    return ProofPolynomials(P=P, phi=phi, Q=Q, R=Polynomial(r), s=s, mu=mu, alpha=alpha)


def _window(mu: int, s: int, l: int) -> Tuple[int, int]:
    return (2 * mu + 1) * l, (2 * mu + s - 1) * l + s - 1


def ledger_A(P: Polynomial, R: Polynomial, s: int, mu: int) -> Dict[Tuple[int, int], complex]:
    """Coefficients of ``P R^l / l!`` on the admissible ``m`` windows.

    Raises
    ------
    WindowViolation
        If a coefficient outside ``[(2mu+1)l, (2mu+s-1)l+s-1]`` exceeds 1e-12.
    """
    out = {}
    power = Polynomial([1.0 + 0j])
    for l in range(s):
        if l:
            power = power * R
        prod = P * power / math.factorial(l)
        lo, hi = _window(mu, s, l)
        for k, c in enumerate(prod.coef):
            if not lo <= k <= hi and abs(c) > WINDOW_TOL:
                raise WindowViolation(f"l={l}: coefficient of degree {k} is {c:.3g}")
        for m in range(lo, hi + 1):
            out[(l, m)] = _coef(prod, m)
    return out


def ledger_B(mu: int, alpha: float, l: int, k1: int, k3: int) -> complex:
    """Finite-difference coefficient ``B_{l,k1,k3}`` of the Laplace-type expansion."""
    if l < 1:
        raise ValueError("l must be positive")
    total = 0.0
    for k2 in range(k1 + 1):
        prod = 1.0
        for k4 in range(k3):
            prod *= (l + k2) / (2 * mu) + k4
        total += math.comb(k1, k2) * (-1) ** (k1 - k2) * prod
    return total / (math.factorial(k1) * math.factorial(k3) * alpha ** k3)


@dataclass
class CoefficientLedger:
    A: Dict[Tuple[int, int], complex]
    B: Dict[Tuple[int, int, int], complex]
    C: Dict[Tuple[int, int, int, int], complex]
    s: int

    @property
    def d(self) -> int:
        return self.s + 1


def build_ledger(jet: VarpiJet, s: int) -> CoefficientLedger:
    p = jet.point
    mu, alpha = p.mu, p.alpha
    if abs(alpha) < 1e-12:
        raise ZeroDrift("drift vanishes at this tangency point", suggested_shift=1)
    pp = build_proof_polynomials(jet, s)
    A = ledger_A(pp.P, pp.R, s, mu)
    d = s + 1
    B, C = {}, {}
    for (l, m), a_lm in A.items():
        lb = m - 2 * mu * l + 1
        for k1 in range(d):
            for k3 in range(d):
                key = (lb, k1, k3)
                if key not in B:
                    B[key] = ledger_B(mu, alpha, lb, k1, k3)
                C[(l, m, k1, k3)] = a_lm * alpha ** (m + l) * abs(alpha) * B[key]
    return CoefficientLedger(A=A, B=B, C=C, s=s)


def assemble_expansion(jet: VarpiJet, s: int) -> List[BivariatePolynomial]:
    """Polynomials ``[P_1, ..., P_s]`` of the expansion around one tangency point.

    Each tuple ``(l, m, k1, k3)`` contributes ``C X^{k1+k3} Y^{m+k1}`` to the
    polynomial of index ``sigma = m - 2 mu l + k3 (2 mu - 1) + 1``.
    """
    mu = jet.point.mu
    ledger = build_ledger(jet, s)
    polys = [BivariatePolynomial({}, sigma=k, s=s) for k in range(1, s + 1)]
    for (l, m, k1, k3), c in ledger.C.items():
        sigma = m - 2 * mu * l + k3 * (2 * mu - 1) + 1
        if 1 <= sigma <= s and c != 0:
            polys[sigma - 1].add(k1 + k3, m + k1, c)
    return [q.pruned() for q in polys]


def reduce_via_recurrence(poly: BivariatePolynomial, mu: int, beta: complex
                          ) -> BivariatePolynomial:
    """Equivalent X-free polynomial, using ``x H^{(m)} = (-1)^mu 2 mu beta H^{(m+2mu-1)} - m H^{(m-1)}``."""
    lead = (-1) ** mu * 2 * mu * complex(beta)
    work = dict(poly.terms)
    out = BivariatePolynomial({}, poly.sigma, poly.s)
    while work:
        top = max(a for a, _ in work)
        if top == 0:
            for (_, b), c in work.items():
                out.add(0, b, c)
            break
        nxt: Dict[Key, complex] = {}
        for (a, b), c in work.items():
            if a < top:
                nxt[(a, b)] = nxt.get((a, b), 0j) + c
                continue
            nxt[(a - 1, b + 2 * mu - 1)] = nxt.get((a - 1, b + 2 * mu - 1), 0j) + lead * c
            if b >= 1:
                nxt[(a - 1, b - 1)] = nxt.get((a - 1, b - 1), 0j) - b * c
        work = nxt
    return out.pruned() if out.terms else out


def apply_to_gaussian(poly: BivariatePolynomial, spec: GeneralizedGaussianSpec, x,
                      method: str = "auto", cache: Optional[dict] = None) -> np.ndarray:
    """``sum c x^a H^{(b)}(x)`` over the terms of ``poly``."""
    x = np.asarray(x, dtype=float)
    orders = poly.y_degrees
    if cache is None:
        H = eval_H_many(spec, orders, x, method) if orders else {}
    else:
        H = cache
    total = np.zeros(x.shape, dtype=np.complex128)
    for (a, b), c in poly.terms.items():
        total = total + c * x ** a * H[b]
    return total


def expansion_families(jets: Iterable[VarpiJet], s: int) -> List[List[BivariatePolynomial]]:
    return [assemble_expansion(j, s) for j in jets]
