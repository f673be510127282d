"""
Custom exceptions for the FEM updating benchmark
"""


class FemUpdatingError(Exception):
    """Base exception for FEM updating errors"""
    def __init__(self, message: str, details: dict = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class ValidationError(FemUpdatingError):
    """Data validation error"""
    pass


class DimensionMismatchError(ValidationError):
    """Vector length does not match the search space"""
    pass


class ConfigurationError(FemUpdatingError):
    """Configuration error"""
    pass


class ModelError(FemUpdatingError):
    """Finite element model errors"""
    pass


class MeshError(ModelError):
    """Malformed or disconnected mesh"""
    pass


class EigenSolveError(ModelError):
    """Generalized eigenproblem could not be solved as requested"""
    pass


class ObjectiveEvaluationError(FemUpdatingError):
    """Cost function evaluation failed for a parameter vector"""
    pass


class TrialError(FemUpdatingError):
    """A seeded optimization trial failed"""
    pass


class OutputError(FemUpdatingError):
    """Result files could not be written"""
    pass
