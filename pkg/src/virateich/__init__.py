"""Numerical toolkit for Hill potentials, circle diffeomorphisms, hyperbolic
coframes, trumpet phase spaces and their symplectic forms."""

from .diffeo import DiffeoLift, act_on_hill, compose, invert, schwarzian
from .errors import (
    GridError,
    InvalidInputError,
    NumericalError,
    PreconditionError,
    ResolutionError,
    SchemaError,
    VirateichError,
)
from .hill import BoundaryConnection, GaugeMap, Monodromy, ds_normalize, hill_from_asu, monodromy
from .spectral import FourierCoeffs, PeriodicFn
from .trumpet import TrumpetPoint, TrumpetTangent, omega_N

__version__ = "0.1.0"
