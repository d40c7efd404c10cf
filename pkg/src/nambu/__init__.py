"""Exact toolkit for Nambu brackets, Poisson matrices and their flows."""

from .brackets import (derived_poisson, hamiltonian_vector_field, nambu_bracket,
                       poisson_bracket)
from .parser import ParseError, SystemSpec, VariableTable, load_system, parse_expr, parse_system
from .polyalgebra import Polynomial
from .tensor import AntisymTensor, as_matrix, levi_civita, linear_combination
from .transform import (CoordinateMap, pullback_canonical, transform_poisson, transform_tensor,
                        validate_map)
from .verify import (check_casimir, check_compatibility, check_cond_algebraic,
                     check_cond_differential, check_fundamental_identity, check_jacobi,
                     generic_rank)

__version__ = "0.1.0"
