from shared.error_structure import Error


class FsvcException(Exception):
    """Base exception of the toolkit. Carries a message and an optional location."""
    error_type = 'system_error'

    def __init__(self, message=None, location: str | None = None):
        self.message = message
        self.location = location
        super().__init__(self.message)

    def as_error(self) -> Error:
        return Error(error_type=self.error_type, message=str(self.message), location=self.location)


class DataValidationError(FsvcException):
    """Input data is malformed or out of range"""
    error_type = 'param_error'


class FeatureIOError(FsvcException):
    error_type = 'io_error'


class FeatureFormatError(FsvcException):
    error_type = 'format_error'


class FeatureLengthError(FsvcException):
    error_type = 'format_error'


class ShapeError(FsvcException):
    error_type = 'shape_error'


class DegenerateInputError(FsvcException):
    """Zero-norm vectors where a direction is required"""
    error_type = 'degenerate_input'


class LabelRangeError(FsvcException):
    error_type = 'param_error'


class CoverageError(FsvcException):
    """A class has no support sample"""
    error_type = 'coverage_error'


class CapacityError(FsvcException):
    """Not enough classes or videos to build the requested episode or split"""
    error_type = 'capacity_error'


class LeakageError(FsvcException):
    """Pretraining classes overlap the benchmark classes"""
    error_type = 'leakage_error'


class SizeGuardError(FsvcException):
    error_type = 'size_guard'
