"""2D pseudo-spectral solver for the coupled barotropic-baroclinic moist
tropical atmosphere, including the instantaneous-adjustment limiting system
and its relaxation-convergence experiment harness."""

from .model import ModelParams, PhysicalVars, State, validate_params
from .spectral import Field, Grid, VectorField
from .stepper import StepperConfig, run, step

__all__ = [
    "Field", "Grid", "VectorField",
    "ModelParams", "PhysicalVars", "State", "validate_params",
    "StepperConfig", "run", "step",
]

__version__ = "0.1.0"
