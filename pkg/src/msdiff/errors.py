"""Exception hierarchy.

Validation errors (bad user input: mixture definitions, configs, presets)
are distinguished from runtime errors (failures during a computation) so
the command-line layer can map them to exit codes 1 and 2 respectively.
"""

from __future__ import annotations


class MsdiffError(Exception):
    """Base class for all package errors."""


class ValidationError(MsdiffError):
    """Invalid user-supplied input (mixture, config, preset, state)."""


class RuntimeFailure(MsdiffError):
    """Failure while carrying out a computation on valid input."""


# --- mixture / state validation ------------------------------------------

class NonSymmetricKernel(ValidationError):
    pass


class NegativeKernel(ValidationError):
    pass


class BExceedsL1(ValidationError):
    """Angular second moment of a kernel cannot exceed its total weight."""


class NonPositiveMass(ValidationError):
    pass


class NonPositiveAlpha(ValidationError):
    pass


class NonSymmetricInput(ValidationError):
    pass


class NonPositiveTemperature(ValidationError):
    pass


class NonPositiveDensity(ValidationError):
    pass


class NonPositiveDefinitePressure(ValidationError):
    pass


class AllSpeciesVacuum(ValidationError):
    pass


class VacuumSpecies(ValidationError):
    pass


class InvalidKernelScalars(ValidationError):
    pass


class QuadratureOrderTooLow(ValidationError):
    pass


class IncompatibleGradients(ValidationError):
    """Pressure gradients do not sum to zero across species."""


class UnknownPreset(ValidationError):
    pass


class BadPresetParams(ValidationError):
    pass


# --- config parsing -------------------------------------------------------

class ConfigError(ValidationError):
    """Base for configuration-document problems; carries the offending path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParseError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class SchemaViolation(ConfigError):
    pass


# --- runtime failures -----------------------------------------------------

class SingularMatrix(RuntimeFailure):
    pass


class LinearSolveFailure(RuntimeFailure):
    pass


class CflViolation(RuntimeFailure):
    pass


class VacuumEverywhere(RuntimeFailure):
    pass


class PositivityLoss(RuntimeFailure):
    """Density or pressure-tensor positivity lost during a step."""

    def __init__(self, cell: int, quantity: str):
        self.cell = cell
        self.quantity = quantity
        super().__init__(f"positivity lost in cell {cell}: {quantity}")
