"""Retarded fields of a point charge in six-dimensional Minkowski space."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("lw6")
except PackageNotFoundError:
    __version__ = "0.1.0"

from .tensor6 import ETA, apply_lorentz, apply_lorentz2, mclf_boost, minkowski_dot, wedge
from .worldline import KinematicState, builtin_worldline, retarded_frame
from .lw_field import field_strength, potential
from .stress_energy import stress_energy_split
from .quadrature import SphereQuadrature
from .flux import (bound_angular_momentum, bound_momentum, flux_report, radiative_angular_momentum,
                   radiative_momentum, sweep_tube, tube_flux_numeric)
from .balance import RenormalizationConstants, particle_momentum, particle_pi, internal_spin
from .motion import MotionState, integrate_motion
