"""Magnetic flows on nilmanifolds: exact Lie algebra tools, central extensions,
Euler flows, Lyapunov estimates and subshifts of finite type."""

from .errors import (CocycleError, DimensionError, DivergenceError, NilmagError, ParseError,
                     UnsupportedStepError, ValidationError)
from .liealg import (InnerProduct, LatticeBasis, LieAlgebra, TwoForm, bch, bracket, derived_algebra,
                     is_cocycle, lower_central_series, nilpotency_step, validate, vanishes_on_derived)
from .magext import (ExtendedSystem, MagneticSystem, extend, extended_lattice, rationality_k,
                     verify_lattice_closure)
from .scenarios import load_scenario

__version__ = "0.1.0"
