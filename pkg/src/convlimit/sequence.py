"""Finitely supported complex sequences on Z and their convolution powers.

A sequence is stored densely over its trimmed support ``[support_min,
support_max]``.  The temporal Green's function is the n-th convolution power
of the reflected sequence ``b_j = a_{-j}``, computed by iterated direct
convolution so that the support bounds stay exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, Iterator, Sequence, Tuple, Union

import numpy as np

from .errors import AllZero, DuplicateOffset, Overflow

__all__ = [
    "ComplexSequence",
    "StencilBounds",
    "new_sequence",
    "delta",
    "convolve",
    "green_function",
    "green_powers",
    "shift_sequence",
    "lq_norm",
    "parse_value",
    "load_sequence",
    "dump_sequence",
]

DEFAULT_COEFFICIENT_LIMIT = 10**6

Scalar = Union[Number, str, Fraction]


@dataclass(frozen=True)
class StencilBounds:
    r: int
    p: int


@dataclass(frozen=True, eq=False)
class ComplexSequence:
    """Trimmed dense representation of a finitely supported sequence.

    Parameters
    ----------
    support_min : int
        Smallest index ``k_m`` with a nonzero coefficient.
    coefficients : numpy.ndarray
        Complex values for indices ``support_min .. support_max``.
    """

    support_min: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or c.size == 0:
            raise AllZero("sequence has no coefficients")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        nz = np.flatnonzero(c)
        if nz.size == 0:
            raise AllZero("every coefficient is zero")
        c = c[nz[0]:nz[-1] + 1].copy()
        c.setflags(write=False)
        object.__setattr__(self, "support_min", int(self.support_min) + int(nz[0]))
        object.__setattr__(self, "coefficients", c)

    @property
    def support_max(self) -> int:
        return self.support_min + self.coefficients.size - 1

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_max + 1)

    @property
    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.coefficients))

    @property
    def h1(self) -> bool:
        """Finitely supported with at least two nonzero coefficients."""
        return self.nonzero_count >= 2

    @property
    def stencil(self) -> StencilBounds:
        km, kM = self.support_min, self.support_max
        if kM <= -1:
            return StencilBounds(r=-km, p=0)
        if km >= 1:
            return StencilBounds(r=0, p=kM)
        return StencilBounds(r=-km, p=kM)

    def __getitem__(self, j: int) -> complex:
        k = j - self.support_min
        if 0 <= k < self.coefficients.size:
            return complex(self.coefficients[k])
        return 0j

    def values(self, js) -> np.ndarray:
        """Coefficients at the integer indices ``js`` (zero off the support)."""
        js = np.asarray(js, dtype=np.int64)
        out = np.zeros(js.shape, dtype=np.complex128)
        k = js - self.support_min
        inside = (k >= 0) & (k < self.coefficients.size)
        out[inside] = self.coefficients[k[inside]]
        return out

    def items(self) -> Iterator[Tuple[int, complex]]:
        for j, v in zip(self.offsets, self.coefficients):
            if v != 0:
                yield int(j), complex(v)

    def scaled(self, factor: complex) -> "ComplexSequence":
        return ComplexSequence(self.support_min, self.coefficients * factor)

    def reflected(self) -> "ComplexSequence":
        """The sequence ``b_j = a_{-j}``."""
        return ComplexSequence(-self.support_max, self.coefficients[::-1])

    def allclose(self, other: "ComplexSequence", atol: float = 0.0) -> bool:
        lo = min(self.support_min, other.support_min)
        hi = max(self.support_max, other.support_max)
        js = np.arange(lo, hi + 1)
        return bool(np.all(np.abs(self.values(js) - other.values(js)) <= atol))

    def __repr__(self):
        body = ", ".join(f"{j}: {v:.6g}" for j, v in self.items())
        return f"ComplexSequence({{{body}}})"


def parse_value(value: Scalar) -> complex:
    """Convert a number or rational string such as ``"2/3"`` to complex.

    Rational strings are parsed exactly with :class:`fractions.Fraction`
    before the single rounding to double precision.
    """
    if isinstance(value, str):
        text = value.strip()
        try:
            return complex(float(Fraction(text)))
        except ValueError:
            return complex(text.replace(" ", ""))
    if isinstance(value, Fraction):
        return complex(float(value))
    return complex(value)


def new_sequence(entries: Iterable[Tuple[int, Scalar]]) -> ComplexSequence:
    """Build a trimmed sequence from ``(offset, value)`` pairs.

    Raises
    ------
    DuplicateOffset
        If an offset appears twice.
    AllZero
        If every value is zero (or ``entries`` is empty).
    """
    table = {}
    for offset, value in entries:
        if int(offset) != offset:
            raise ValueError(f"offset {offset!r} is not an integer")
        offset = int(offset)
        if offset in table:
            raise DuplicateOffset(f"offset {offset} given more than once")
        table[offset] = parse_value(value)
    if not table:
        raise AllZero("no entries given")
    lo, hi = min(table), max(table)
    coeffs = np.zeros(hi - lo + 1, dtype=np.complex128)
    for offset, value in table.items():
        coeffs[offset - lo] = value
    return ComplexSequence(lo, coeffs)


def delta() -> ComplexSequence:
    return ComplexSequence(0, np.ones(1, dtype=np.complex128))


def convolve(a: ComplexSequence, b: ComplexSequence) -> ComplexSequence:
    """``(a*b)_j = sum_l a_l b_{j-l}`` by direct summation."""
    return ComplexSequence(a.support_min + b.support_min,
                           np.convolve(a.coefficients, b.coefficients))


def _check_size(a: ComplexSequence, n: int, limit: int):
    width = a.support_max - a.support_min
    if n * width + 1 > limit:
        raise Overflow(f"power n={n} needs {n * width + 1} coefficients "
                       f"(limit {limit})")


def _fft_power(b: ComplexSequence, n: int) -> ComplexSequence:
    width = b.coefficients.size - 1
    size = n * width + 1
    nfft = 1 << max(0, (size - 1).bit_length())
    spectrum = np.fft.fft(b.coefficients, nfft) ** n
    coeffs = np.fft.ifft(spectrum)[:size]
    return ComplexSequence(n * b.support_min, coeffs)


def green_function(a: ComplexSequence, n: int, *, method: str = "direct",
                   limit: int = DEFAULT_COEFFICIENT_LIMIT) -> ComplexSequence:
    """Temporal Green's function ``G^n = L_a^n delta``.

    ``G^n_j`` vanishes exactly for ``j < -n p`` or ``j > n r``.  The default
    ``method="direct"`` iterates a short direct convolution and is
    bit-reproducible; ``method="fft"`` is faster for large ``n`` but leaves
    roundoff-level values across the support.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    _check_size(a, n, limit)
    if n == 0:
        return delta()
    b = a.reflected()
    if method == "fft":
        return _fft_power(b, n)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    out = b.coefficients
    for _ in range(n - 1):
        out = np.convolve(out, b.coefficients)
    return ComplexSequence(n * b.support_min, out)


def green_powers(a: ComplexSequence, n_values: Sequence[int], *,
                 limit: int = DEFAULT_COEFFICIENT_LIMIT
                 ) -> Iterator[Tuple[int, ComplexSequence]]:
    """Yield ``(n, G^n)`` for sorted ``n_values`` with one pass of convolutions."""
    targets = sorted(set(int(n) for n in n_values))
    if not targets:
        return
    if targets[0] < 0:
        raise ValueError("n must be nonnegative")
    _check_size(a, targets[-1], limit)
    b = a.reflected()
    current = np.ones(1, dtype=np.complex128)
    power = 0
    for n in targets:
        while power < n:
            current = np.convolve(current, b.coefficients)
            power += 1
        yield n, ComplexSequence(power * b.support_min if power else 0, current)


def shift_sequence(a: ComplexSequence, J: int) -> ComplexSequence:
    """The sequence ``b_j = a_{j+J}``."""
    return ComplexSequence(a.support_min - int(J), a.coefficients)


def lq_norm(a: ComplexSequence, q: Union[int, float] = 2) -> float:
    c = np.abs(a.coefficients)
    if q == 1:
        return math.fsum(c)
    if q == 2:
        scale = c.max()
        return float(scale * math.sqrt(math.fsum((c / scale) ** 2)))
    if q in (math.inf, "inf", "infinity"):
        return float(c.max())
    raise ValueError(f"unsupported norm index q={q!r}")


def load_sequence(path_or_text: str, *, is_text: bool = False) -> ComplexSequence:
    """Read ``{"entries": [[offset, re, im], ...]}``.

    ``re`` and ``im`` may be numbers or rational strings; ``im`` may be
    omitted.
    """
    if is_text:
        data = json.loads(path_or_text)
    else:
        with open(path_or_text) as fh:
            data = json.load(fh)
    entries = []
    for row in data["entries"]:
        if len(row) == 2:
            offset, re_part = row
            im_part = 0
        elif len(row) == 3:
            offset, re_part, im_part = row
        else:
            raise ValueError(f"malformed entry {row!r}")
        entries.append((offset, parse_value(re_part) + 1j * parse_value(im_part).real))
    return new_sequence(entries)


def dump_sequence(a: ComplexSequence) -> dict:
    return {"entries": [[j, v.real, v.imag] for j, v in a.items()]}
