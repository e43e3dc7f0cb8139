"""Spectral theory of quaternionic matrices.

Right-linear operators on H^n are stored as ``A1 + A2 j`` and handled through
their complex adjoint. The package computes S-spectra, the S-functional
calculus by contour quadrature, generalized and group inverses, and the
Drazin inverse by three independent routes.
"""

from .quat import EigenSphere, Quaternion, sphere_of
from .hmat import (HMatrix, complex_adjoint, diag, from_adjoint, identity, inverse, matmul,
                   operator_norm, power, range_kernel_basis, rank, solve, zeros)
from .sspec import (Spectrum, gelfand_sequence, pseudo_resolvent_series, q_pencil,
                    s_resolvent_left, s_spectrum, spectral_radius_gelfand)
from .scalc import (IntrinsicFn, build_contours, composition_check, func_calc, parse_function,
                    riesz_projection, spectral_mapping_check)
from .geninv import gen_inverse_from, generalized_inverse, group_inverse, moore_penrose
from .drazin import (DrazinResult, ascent, descent, drazin, drazin_algebraic,
                     drazin_via_funcalc, drazin_via_projection, generalized_drazin, index,
                     verify_drazin)

__version__ = "0.1.0"
