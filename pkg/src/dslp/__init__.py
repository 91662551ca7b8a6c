"""Spectra of discrete Sturm-Liouville problems with self-adjoint boundary
conditions, and numerical verification of eigenvalue inequalities across
boundary conditions and across equations."""

from .bcfamilies import (
    derived_separated_bcs,
    limit_bc,
    loop_in_chart,
    make_coupled,
    make_separated,
    modified_couplings,
    natural_loops,
)
from .errors import DSLPError, NumericalError, ValidationError
from .polynomial import RealPolynomial, RootSet, isolate_real_roots, sturm_count
from .problem import (
    ChartCoords,
    CoupledBC,
    Equation,
    RawBC,
    SeparatedBC,
    chart_coordinates,
    classify_bc,
    eigenvalue_count,
    validate_equation,
    xi,
)
from .spectrum import (
    Spectrum,
    characteristic_polynomial,
    eigenvalues,
    fundamental_solutions,
    leading_terms,
    oracle_dirichlet,
    oracle_pencil_scan,
    solve_spectrum,
)

__version__ = "0.1.0"
