import numpy as np
import pytest

from convlimit.presets import o3_scheme, probabilistic_example
from convlimit.sequence import new_sequence


@pytest.fixture
def prob():
    return probabilistic_example()


@pytest.fixture
def o3():
    return o3_scheme("1/2")


def random_walk(rng, width=None):
    """Random probability vector on a window containing 0, with a_0 > 0.

    A positive a_0 plus another positive entry makes the step set aperiodic,
    so |F| < 1 away from kappa = 1 and the walk is admissible with mu = 1.
    """
    width = width or int(rng.integers(2, 5))
    lo = -int(rng.integers(1, width))
    w = rng.uniform(0.05, 1.0, size=width + 1)
    w /= w.sum()
    entries = [(lo + i, float(v)) for i, v in enumerate(w)]
    return new_sequence(entries)


def random_admissible(seed, count):
    """Mixed batch: random walks (some rotated by a phase) and O3 schemes."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        if i % 2:
            lam = float(rng.uniform(0.15, 0.85))
            out.append(o3_scheme(lam))
        else:
            a = random_walk(rng)
            if i % 4 == 0:
                a = a.scaled(np.exp(1j * rng.uniform(-3, 3)))
            out.append(a)
    return out
