"""Exception hierarchy.

Validation problems derive from :class:`ValidationError`, numerical
failures from :class:`NumericalError`. The command line maps the two
families onto different exit statuses.
"""


class BPError(Exception):
    """Base class for every error raised by the package."""

    code = "error"


class ValidationError(BPError, ValueError):
    code = "validation"


class NumericalError(BPError, ArithmeticError):
    code = "numerical"


class DimensionMismatch(ValidationError):
    code = "dimension_mismatch"


class UnsupportedDimension(ValidationError):
    code = "unsupported_dimension"


class ModelDomainError(ValidationError):
    code = "model_domain"


class SymmetryError(ValidationError):
    code = "symmetry"


class PositivityError(ValidationError):
    code = "positivity"


class ParameterOutOfRange(ValidationError):
    code = "parameter_out_of_range"


class PointOutsideModel(ValidationError):
    code = "point_outside_model"


class AntipodalPair(ValidationError):
    code = "antipodal_pair"


class UnsupportedOrder(ValidationError):
    code = "unsupported_order"


class UnsupportedFormat(ValidationError):
    code = "unsupported_format"


class InsufficientStencil(ValidationError):
    code = "insufficient_stencil"


class NotStarShapedFromOffset(ValidationError):
    code = "not_star_shaped"


class ToleranceNotReached(NumericalError):
    code = "tolerance_not_reached"


class DegreeOverflow(NumericalError):
    code = "degree_overflow"


class NegativityNotFound(NumericalError):
    code = "negativity_not_found"


class EpsilonTooLarge(NumericalError):
    code = "epsilon_too_large"
