#!/usr/bin/env python3
"""
🚨 Gyroscope Toolkit - Errors

Exception hierarchy for the design toolkit.

Every failure the library raises on purpose derives from GyroToolkitError so
the CLI can map it onto an exit code.
"""

from typing import Optional, Sequence


class GyroToolkitError(Exception):
    """Base class for all toolkit errors"""


class ConfigError(GyroToolkitError):
    """The configuration document does not match the schema"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class SpecValidationError(GyroToolkitError):
    """A parsed value violates a physical or layout invariant"""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"[{invariant}] {message}")


class RankDeficiencyError(GyroToolkitError):
    """The suspension leaves one or more rigid-body DOF unconstrained"""

    def __init__(self, free_dofs: Sequence[str]):
        self.free_dofs = list(free_dofs)
        super().__init__(f"suspension does not constrain: {', '.join(self.free_dofs)}")


class NotPositiveDefiniteError(GyroToolkitError):
    """A matrix that must be symmetric positive definite is not"""

    def __init__(self, matrix_name: str):
        self.matrix_name = matrix_name
        super().__init__(f"{matrix_name} is not symmetric positive definite")


class ModeClassificationError(GyroToolkitError):
    """Mode labels do not single out one usable vertical-translation mode"""


class ContactError(GyroToolkitError):
    """Proofmass touches the electrode (gap closed)"""


class SolverConvergenceError(GyroToolkitError):
    """An iterative solve stopped above its residual tolerance"""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class IntegrationError(GyroToolkitError):
    """Time integration produced non-finite or growing states"""


class CalibrationError(GyroToolkitError):
    """Measured resonances or readout targets cannot be turned into model parameters"""


class UndersampledError(GyroToolkitError):
    """Time step too coarse for the carrier or the fastest mode"""
