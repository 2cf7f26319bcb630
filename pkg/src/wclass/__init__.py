"""Simulation and verification toolkit for W-class entangled states."""

from .corelin import DensityMatrix, StateVector, TOL, Tolerances
from .states import bell, dicke_symmetric, eta_state, ghz_state, w_state

__version__ = "0.1.0"

__all__ = ["DensityMatrix", "StateVector", "TOL", "Tolerances",
           "bell", "dicke_symmetric", "eta_state", "ghz_state", "w_state"]
