"""Simulation and analysis of a coupled resource-consumer model."""

from .model import (ConvergenceCriteria, IntegrationError, ModelParams, ParameterError,
                    StepControl, SystemState, Trajectory, integrate, rhs, steady_state)
from .equilibria import EquilibriumReport, equilibrium
from .stability import StabilityReport

__version__ = "0.1.0"
