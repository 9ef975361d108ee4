"""Exception and warning types shared across the package."""


class DepthfillError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(DepthfillError, ValueError):
    """Inputs that must share a pixel grid do not."""


class MissingInput(DepthfillError, ValueError):
    """A map required by the chosen representation was not supplied."""


class SingularSystem(DepthfillError):
    """The normal equations are singular or indefinite.

    ``index`` is the flat index of the first offending unknown; ``pixel``
    is its (x, y) location when the grid shape is known.
    """

    def __init__(self, index, pixel=None, detail=""):
        self.index = index
        self.pixel = pixel
        where = f"pixel {pixel}" if pixel is not None else f"unknown {index}"
        msg = f"singular or indefinite system at {where}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ConvergenceFailure(DepthfillError):
    """Iterative solve hit its iteration cap before reaching tolerance."""

    def __init__(self, achieved_residual, max_iters):
        self.achieved_residual = achieved_residual
        self.max_iters = max_iters
        super().__init__(
            f"no convergence after {max_iters} iterations "
            f"(relative residual {achieved_residual:.3e})"
        )


class EmptyEvaluation(DepthfillError):
    """Metric evaluation was requested over an empty pixel set."""


class UnfilledPixels(DepthfillError):
    """Bilateral filling ran out of passes with holes remaining.

    ``pixels`` lists the (x, y) locations still invalid.
    """

    def __init__(self, pixels):
        self.pixels = list(pixels)
        super().__init__(f"{len(self.pixels)} pixels left unfilled")


class NonPhysicalDepthWarning(UserWarning):
    """Solved depths were <= 0 at the listed (x, y) pixels."""

    def __init__(self, pixels):
        self.pixels = list(pixels)
        super().__init__(f"{len(self.pixels)} solved depths are <= 0")
