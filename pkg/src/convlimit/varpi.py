"""Bell polynomials and the Taylor jet of the inverse phase ``varpi``.

Near a tangency point the eigenvalue branch ``kappa(e^tau) = exp(varpi(tau))``
solves ``F(exp(varpi(tau))) = exp(tau)``.  Differentiating this identity with
Faa di Bruno's formula gives a triangular recursion for the derivatives of
``varpi`` in terms of the moments ``M_n`` at the tangency point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, TYPE_CHECKING

import numpy as np

from .errors import IndexOutOfRange, ZeroFirstMoment

if TYPE_CHECKING:  # pragma: no cover
    from .sequence import ComplexSequence
    from .symbol import TangencyPoint

__all__ = ["bell_polynomial", "bell_table", "VarpiJet", "varpi_jet", "default_jet_order"]


def bell_table(xs: Sequence[complex], n_max: int) -> np.ndarray:
    """Table ``B[n, j] = B_{n,j}(x_1, ..., x_{n+1-j})`` for ``0 <= j <= n <= n_max``.

    Filled with ``B_{n,j} = sum_i C(n-1, i-1) x_i B_{n-i, j-1}`` and
    ``B_{0,0} = 1``.  ``xs[i-1]`` holds ``x_i``; missing entries count as 0.
    """
    x = np.zeros(max(n_max, 1), dtype=np.complex128)
    x[:min(len(xs), n_max)] = np.asarray(xs, dtype=np.complex128)[:n_max]
    B = np.zeros((n_max + 1, n_max + 1), dtype=np.complex128)
    B[0, 0] = 1.0
    for n in range(1, n_max + 1):
        for j in range(1, n + 1):
            acc = 0j
            for i in range(1, n + 2 - j):
                acc += math.comb(n - 1, i - 1) * x[i - 1] * B[n - i, j - 1]
            B[n, j] = acc
    return B


def bell_polynomial(n: int, j: int, args: Sequence[complex]) -> complex:
    """Partial Bell polynomial ``B_{n,j}(X_1, ..., X_{n+1-j})``."""
    if n == 0 and j == 0:
        return 1.0 + 0j
    if not (1 <= j <= n):
        raise IndexOutOfRange(f"need 1 <= j <= n, got n={n}, j={j}")
    if len(args) < n + 1 - j:
        raise IndexOutOfRange(f"B_{{{n},{j}}} needs {n + 1 - j} arguments, got {len(args)}")
    return complex(bell_table(list(args)[:n + 1 - j], n)[n, j])


def default_jet_order(mu: int, s: int) -> int:
    """Smallest jet the expansion builder consumes, plus one guard term."""
    return 2 * mu + s + 2


@dataclass(frozen=True)
class VarpiJet:
    """Derivatives ``varpi^{(1)}(tau_k) .. varpi^{(N)}(tau_k)``."""

    point: "TangencyPoint"
    order: int
    derivatives: Tuple[complex, ...]

    def derivative(self, n: int) -> complex:
        """``varpi^{(n)}(tau_k)``; ``n = 0`` gives ``i theta_tilde``."""
        if n == 0:
            return 1j * self.point.theta_tilde
        if not 1 <= n <= self.order:
            raise IndexOutOfRange(f"jet holds orders 1..{self.order}, asked {n}")
        return self.derivatives[n - 1]

    def taylor(self, h) -> complex:
        """Truncated series ``sum_{n<=N} varpi^{(n)} h^n / n!``."""
        h = np.asarray(h, dtype=np.complex128)
        total = np.full(h.shape, self.derivative(0), dtype=np.complex128)
        for n in range(1, self.order + 1):
            total = total + self.derivatives[n - 1] * h ** n / math.factorial(n)
        return total

    def consistency(self) -> dict:
        """Residuals against the drift/damping data of the tangency point."""
        p = self.point
        mu = p.mu
        out = {"first": abs(self.derivatives[0] + 1.0 / p.alpha) * abs(p.alpha)}
        if self.order >= 2 * mu:
            target = (-1) ** (mu + 1) * p.beta / p.alpha ** (2 * mu + 1)
            got = self.derivatives[2 * mu - 1] / math.factorial(2 * mu)
            out["damping"] = abs(got - target) / abs(target)
        vanishing = [abs(self.derivatives[n - 1]) for n in range(2, min(2 * mu, self.order + 1))]
        out["vanishing"] = max(vanishing, default=0.0)
        return out


def varpi_jet(a: "ComplexSequence", point: "TangencyPoint", order: int,
              tol: float = 1e-12) -> VarpiJet:
    """Derivatives of ``varpi`` at ``tau_k`` up to ``order``.

    ``varpi' = z / M_1`` and, for ``n >= 2``,
    ``varpi^{(n)} = (z - sum_{j=2}^n M_j B_{n,j}(varpi', ..)) / M_1``,
    all moments taken at ``kappa_k``.

    Raises
    ------
    ZeroFirstMoment
        If ``|M_1(kappa_k)| <= tol`` (zero drift).
    """
    from .symbol import moment

    if order < 1:
        raise ValueError("order must be positive")
    kappa, z = point.kappa, point.z
    moments = [moment(a, n, kappa) for n in range(order + 1)]
    m1 = moments[1]
    if abs(m1) <= tol:
        raise ZeroFirstMoment(
            f"|M_1(kappa)| = {abs(m1):.3g}; apply a shift before building the jet")
    w = np.zeros(order, dtype=np.complex128)
    w[0] = z / m1
    for n in range(2, order + 1):
        B = bell_table(w[:n - 1], n)
        acc = 0j
        for j in range(2, n + 1):
            acc += moments[j] * B[n, j]
        w[n - 1] = (z - acc) / m1
    return VarpiJet(point=point, order=order, derivatives=tuple(complex(v) for v in w))
