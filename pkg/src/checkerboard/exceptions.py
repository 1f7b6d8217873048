"""Exception types raised across the package."""


class InvalidSpecError(ValueError):
    """An ensemble description is internally inconsistent."""


class OverlappingRegimesError(ValueError):
    """Two regime windows intersect, so eigenvalues cannot be labelled uniquely.

    Usually means the matrix size is too small for the chosen weights or the
    threshold exponent is too large.
    """


class ZeroTargetError(ValueError):
    """A blip statistic was requested around a zero weight."""


class MixedSpecsError(ValueError):
    """Blip measures built from different ensembles were averaged together."""


class IncompatibleSpecsError(ValueError):
    """Two experiment configurations do not share the blip being compared."""


class EqualWeightsError(ValueError):
    pass


class CombinatorialBlowupError(ValueError):
    pass


class ZeroPolynomialError(ValueError):
    pass


class ExactModeTooLargeError(ValueError):
    pass
