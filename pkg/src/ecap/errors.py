"""Exception types shared across the package."""


class EcapError(Exception):
    """Base class for domain errors raised by this package."""


class NotElliptic(EcapError):
    """Characteristic root is real (or degenerates to one)."""


class DegenerateOperator(EcapError):
    """All three coefficients vanish."""


class SingularPoint(EcapError):
    """Evaluation requested at the singular point of a kernel."""


class BranchCut(EcapError):
    """Evaluation requested on the branch cut of the logarithm."""


class CalibrationFailed(EcapError):
    """Normalization constant could not be pinned down consistently."""


class GridTooSmall(EcapError):
    """Grid has fewer nodes than a stencil or quadrature needs."""


class DiscOutsideGrid(EcapError):
    """A disc (with safety margin) is not contained in the grid."""


class QuadratureUnderresolved(EcapError):
    """Doubling the quadrature resolution moved the result too much."""


class MissingGradients(EcapError):
    """Operation needs gradient samples that the grid does not carry."""


class ZeroMeasure(EcapError):
    """Point cloud carries no mass."""


class SingularMap(EcapError):
    """Linear map is singular or too close to singular."""


class BoxTooSmall(EcapError):
    """Bounding box cannot hold a single partition cell."""


class SupportLeak(EcapError):
    """Bump samples are nonzero outside the stated support disc."""


class CoverageGap(EcapError):
    """Partition does not cover the required region with margin."""


class AnnulusInsideSupport(EcapError):
    """Far-field annuli overlap the support of the distribution."""


class PlacementFailed(EcapError):
    """Random placement did not succeed within the retry budget."""


class EmptyRegion(EcapError):
    """Region of interest contains no raster cells."""


class RasterTooCoarse(EcapError):
    """Raster spacing is too coarse for the requested scan radii."""


class UsageError(EcapError):
    """Malformed command-line arguments or input files."""
