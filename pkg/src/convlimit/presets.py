"""Named example sequences with exact rational inputs."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .sequence import ComplexSequence, new_sequence

__all__ = ["probabilistic_example", "o3_scheme", "preset", "PRESETS"]

PRESETS = ("probabilistic-example", "o3")


def probabilistic_example() -> ComplexSequence:
    """Lazy random walk with ``a_{-1} = 2/3``, ``a_0 = a_1 = 1/6``."""
    return new_sequence([(-1, Fraction(2, 3)), (0, Fraction(1, 6)), (1, Fraction(1, 6))])


def o3_scheme(lambda_a: Union[float, str, Fraction] = Fraction(1, 2)) -> ComplexSequence:
    """Third-order upwind-biased transport scheme at Courant number ``lambda_a``.

    A string or :class:`~fractions.Fraction` keeps the coefficients exact
    until the final rounding.
    """
    lam = Fraction(lambda_a) if isinstance(lambda_a, (str, Fraction, int)) else lambda_a
    return new_sequence([
        (-2, -lam * (1 - lam ** 2) / 6),
        (-1, lam * (1 + lam) * (2 - lam) / 2),
        (0, (1 - lam ** 2) * (2 - lam) / 2),
        (1, -lam * (1 - lam) * (2 - lam) / 6),
    ])


def preset(name: str, lambda_a=Fraction(1, 2)) -> ComplexSequence:
    if name == "probabilistic-example":
        return probabilistic_example()
    if name == "o3":
        return o3_scheme(lambda_a)
    raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
