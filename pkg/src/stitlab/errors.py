"""Exception types raised across the package."""


class StitLabError(Exception):
    """Base class for all package-specific errors."""


# -- geometry --------------------------------------------------------------

class GeometryError(StitLabError):
    pass


class NoIntersection(GeometryError):
    """Hyperplane misses the interior of the polytope."""


class DegenerateCut(GeometryError):
    """Cut grazes a vertex/edge or produces a face below tolerance."""


class ZeroLength(GeometryError):
    """Segment has zero length where a direction is required."""


class EmptyPolytope(GeometryError):
    """Operation requires a bounded polytope with nonempty interior."""


# -- engine ----------------------------------------------------------------

class EngineError(StitLabError):
    pass


class InvalidWindow(EngineError):
    pass


class MaxCellsExceeded(EngineError):
    """Cell-count guard tripped; parameters are likely runaway."""


class SegmentOutsideWindow(EngineError):
    pass


class NotContained(EngineError):
    pass


class WindowMismatch(EngineError):
    pass


class InsufficientFresh(EngineError):
    pass


class NonPositiveFactor(EngineError):
    pass


class BadInnerWindow(EngineError):
    pass


# -- sampling / analytics ---------------------------------------------------

class BadDimension(StitLabError):
    """Dimension or weight index outside the supported range."""


class QuadratureFailure(StitLabError):
    """Requested quadrature tolerance not reached."""


class InsufficientSamples(StitLabError):
    """Statistical test invoked with fewer samples than configured minimum."""


# -- configuration -----------------------------------------------------------

class ConfigError(StitLabError):
    """Invalid experiment configuration; message carries the field path."""
