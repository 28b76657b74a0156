"""Spectral solvers for polynomials of finite-difference Laplace matrices."""
from .errors import SingularMatrixError, SingularOperatorError, SizeGuardError
from .grid import BoundaryKind, Field, Grid, GridError, GridMismatchError, flatten, make_grid, unflatten
from .polynomial import Certificate, MatrixPolynomial, certify_invertible, eval_poly
from .solver import inverse_1d_closed_form, inverse_column, inverse_entry, inverse_matrix, solve
from .spectrum import AxisSpectrum, Spectrum, build_spectrum, eigenvalue_nd, eigvec_entry_nd
from .timestep import EvolutionSpec, Scheme, SnapshotPlan, amplification, evolve, evolve_iterative_oracle
from .transform import CoefficientTensor, analyze, synthesize

__version__ = "0.1.0"
