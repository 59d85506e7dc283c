"""Exact Grassmann/jet computer algebra for constructing and verifying
projector solutions of supersymmetric CP^(N-1) sigma models."""

from .errors import (AlgebraMismatch, BasePointMismatch, ConfigParseError,
                     DimensionMismatch, IndexOutOfRange, JetOrderExhausted,
                     LinearDependence, NotUnitary, OrderMismatch, ParityError,
                     SingularBody, SuperCPNError, UnknownCase, ZeroBody)
from .scalars import GRat, format_exact, parse_exact
from .jets import Jet, jet_constant, jet_coordinate, jet_poly, jet_zero
from .grassmann import (AlgebraContext, GrassmannElement, eta_bar_index,
                        eta_index, ge_constant, ge_from_jets, ge_generator,
                        ge_one, ge_zero)
from .superfields import (SuperMatrix, SuperVector, assemble_plus,
                          is_holomorphic, outer, split_plus, super_derive)
from .linalg import (ProjectorSet, apply_complement, cross3, expand_in_basis,
                     gram_schmidt, inner, mat_commutator, mat_invert_even,
                     norm_sq, projector_from)
from .bundle import SolutionBundle
from .cp2 import (CP2FreeData, FermionicParameter, bosonic_tower,
                  build_cp2_solution, build_cp2_special, component_residuals,
                  compute_a0_a1, compute_psi0_f, compute_psi1_b,
                  compute_psi1_f, compute_psi2_b, special_case_crosschecks,
                  system_residual_cp2)
from .cpn import (DiagonalGammaData, assemble_tower_bundle, b_matrix,
                  build_diagonal_solution, check_general_constraint,
                  prop3_residuals)
from .verifier import (VerificationReport, alpha1_diagnostics, apply_gauge,
                       conservation_residual, covariant_derivative,
                       el_commutator_residual, holomorphy_type,
                       lagrangian_density, lagrangian_from_phi,
                       theorem_xi_residual, verify_all, xi_field)

__version__ = "0.1.0"
