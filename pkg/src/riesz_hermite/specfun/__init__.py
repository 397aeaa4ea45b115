"""Special functions and orthonormal systems."""

from .bessel import bessel_i, bessel_i_scaled
from .functions import (
    LaguerreIndex,
    MultiIndex,
    gegenbauer_norm,
    hermite_fn,
    hermite_fn_deriv,
    hermite_fn_multi,
    hermite_fn_rodrigues,
    hermite_fn_table,
    laguerre_phi_fock,
    laguerre_poly,
    laguerre_poly_explicit,
    laguerre_table,
    multi_indices,
    phi_small,
    phi_small_table,
    psi,
    psi_deriv,
    psi_table,
)
from .harmonics import (
    BigradedHarmonic,
    HarmonicBasisElement,
    basis_from_json,
    basis_to_json,
    bigraded_basis,
    harmonic_projection,
    real_spherical_basis,
    sphere_inner,
)
from .poly import Poly

__all__ = [
    "BigradedHarmonic",
    "HarmonicBasisElement",
    "LaguerreIndex",
    "MultiIndex",
    "Poly",
    "basis_from_json",
    "basis_to_json",
    "bessel_i",
    "bessel_i_scaled",
    "bigraded_basis",
    "gegenbauer_norm",
    "harmonic_projection",
    "hermite_fn",
    "hermite_fn_deriv",
    "hermite_fn_multi",
    "hermite_fn_rodrigues",
    "hermite_fn_table",
    "laguerre_phi_fock",
    "laguerre_poly",
    "laguerre_poly_explicit",
    "laguerre_table",
    "multi_indices",
    "phi_small",
    "phi_small_table",
    "psi",
    "psi_deriv",
    "psi_table",
    "real_spherical_basis",
    "sphere_inner",
]
