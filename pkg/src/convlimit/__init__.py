"""Convolution powers of finitely supported sequences on the integers.

Tools to compute temporal Green's functions, analyze the symbol near its
tangency points, assemble the full asymptotic expansion in generalized
Gaussians, and check the expansion numerically.
"""

from .errors import ConvLimitError
from .expansion import (BivariatePolynomial, assemble_expansion, build_proof_polynomials,
                        ledger_A, ledger_B, reduce_via_recurrence)
from .gaussian import GeneralizedGaussianSpec, eval_H, eval_H_many, recurrence_residual
from .presets import o3_scheme, probabilistic_example
from .sequence import (ComplexSequence, convolve, green_function, lq_norm, new_sequence,
                       shift_sequence)
from .spatial import contour_reconstruct, spatial_green, spectral_split
from .symbol import (SymbolProfile, TangencyPoint, check_hypotheses, eval_symbol,
                     expand_at_tangency, locate_tangency_points, moment)
from .varpi import VarpiJet, bell_polynomial, varpi_jet
from .verify import (attractor, berry_esseen_check, envelope_check, error_table,
                     expansion_value)

__version__ = "0.1.0"
