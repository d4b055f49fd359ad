"""Exception hierarchy shared by all backends."""


class BraggSpecError(Exception):
    pass


class DomainError(BraggSpecError, ValueError):
    """Input outside the physical domain of a formula."""


class ResolutionError(BraggSpecError):
    """Numerical grid or cutoff too coarse for the requested accuracy."""


class GaugeError(BraggSpecError):
    pass


class CapacityError(BraggSpecError):
    """Fock basis larger than the configured cap."""


class ShapeError(BraggSpecError, ValueError):
    pass


class CoverageError(BraggSpecError):
    """Frequency grid does not cover the spectral lines."""


class RegimeWarning(UserWarning):
    """A backend is used outside its stated validity range."""


class DegeneracyWarning(UserWarning):
    pass
