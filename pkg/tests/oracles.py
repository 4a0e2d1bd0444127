"""Independent reference computations shared by several test modules."""

from functools import lru_cache

import mpmath


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def bell_by_enumeration(n, j, xs):
    total = 0
    for part in set_partitions(list(range(n))):
        if len(part) == j:
            term = 1
            for block in part:
                term *= xs[len(block) - 1]
            total += term
    return total


def _parse(v):
    if "/" in v:
        num, den = v.split("/")
        return mpmath.mpf(num) / mpmath.mpf(den)
    return mpmath.mpmathify(v)


@lru_cache(maxsize=None)
def inverse_phase_jet(entries, theta_tilde, order, radius=0.05, nodes=96, dps=40):
    """Taylor jet of w(tau) solving F(exp(w)) = exp(tau) near w(0) = i theta_tilde.

    ``entries`` holds (offset, exact value string) pairs.  The root w(tau) is
    tracked by Newton continuation around a circle in tau, and the Taylor
    coefficients come from the Cauchy integral evaluated by the trapezoid rule.
    """
    with mpmath.workdps(dps):
        coeffs = [(int(j), _parse(v)) for j, v in entries]

        def F(w):
            return sum(c * mpmath.exp(j * w) for j, c in coeffs)

        def dF(w):
            return sum(j * c * mpmath.exp(j * w) for j, c in coeffs)

        w0 = mpmath.mpc(0, theta_tilde)
        tau0 = mpmath.log(F(w0))
        w = w0
        # walk out to the circle along the real axis, then around it
        path = [tau0 + radius * k / 16 for k in range(1, 17)]
        path += [tau0 + radius * mpmath.expjpi(2 * mpmath.mpf(k) / nodes) for k in range(nodes)]
        values = []
        for tau in path:
            for _ in range(60):
                step = (F(w) - mpmath.exp(tau)) / dF(w)
                w -= step
                if abs(step) < mpmath.mpf(10) ** (-dps + 3):
                    break
            values.append(w)
        ring = values[16:]
        out = [complex(w0)]
        for n in range(1, order + 1):
            acc = mpmath.fsum(ring[k] * mpmath.expjpi(-2 * mpmath.mpf(k) * n / nodes)
                              for k in range(nodes)) / nodes
            out.append(complex(acc / radius ** n * mpmath.factorial(n)))
        return out


def generalized_gaussian(mu, beta, m, x, dps=30):
    """(1/2 pi) int_R (iu)^m exp(ixu - beta u^{2mu}) du by mpmath quadrature."""
    with mpmath.workdps(dps):
        beta = mpmath.mpmathify(beta)

        def f(u):
            return (1j * u) ** m * mpmath.exp(1j * x * u - beta * u ** (2 * mu))

        val = mpmath.quad(f, [-mpmath.inf, -5, -2, 0, 2, 5, mpmath.inf], maxdegree=10)
        return complex(val / (2 * mpmath.pi))
