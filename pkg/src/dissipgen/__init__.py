"""Boundary quadruples and m-dissipative extensions of skew-symmetric matrix pencils."""

from .algebra import hermitian_geig, matrix_exp, null_space, orthonormalize
from .errors import DissipgenError
from .extension import (
    Contraction,
    Extension,
    build_extension,
    enumerate_extremes,
    extension_equal,
    is_unitary_generator,
    recover_contraction,
)
from .pencil import (
    InnerSpace,
    SkewPencil,
    boundary_form,
    check_dissipative_on,
    check_skew_symmetric,
    graph_gram,
    pencil_invariants,
)
from .quadruple import (
    BoundaryQuadruple,
    from_triple,
    interpolate,
    quadruple_from_deficiency,
    quadruple_from_form,
    quadruple_iso,
    synth_pencil,
    to_triple,
    verify_quadruple,
)
from .sbp import make_sbp, second_derivative_model, transport_model, wave_model
from .selfadjoint import SymmetricPencil, selfadjoint_extension, to_skew
from .semigroup import Trajectory, energy_rate_audit, propagate_cn, propagate_exact

__version__ = "0.1.0"

__all__ = [
    "BoundaryQuadruple", "Contraction", "DissipgenError", "Extension", "InnerSpace",
    "SkewPencil", "SymmetricPencil", "Trajectory", "boundary_form", "build_extension",
    "check_dissipative_on", "check_skew_symmetric", "energy_rate_audit",
    "enumerate_extremes", "extension_equal", "from_triple", "graph_gram",
    "hermitian_geig", "interpolate", "is_unitary_generator", "make_sbp", "matrix_exp",
    "null_space", "orthonormalize", "pencil_invariants", "propagate_cn",
    "propagate_exact", "quadruple_from_deficiency", "quadruple_from_form",
    "quadruple_iso", "recover_contraction", "second_derivative_model",
    "selfadjoint_extension", "synth_pencil", "to_skew", "to_triple", "transport_model",
    "verify_quadruple", "wave_model",
]
