"""Exception types raised by dnwave."""


class DomainError(ValueError):
    """An elliptic modulus or argument lies outside the supported range."""


class DivergenceError(DomainError):
    """A complete elliptic integral was requested at a logarithmic singularity."""


class InadmissibleParameters(ValueError):
    """Wave parameters violate one of the existence inequalities."""


class DegenerateModulus(ValueError):
    """The modulus sits at 0 or 1, where the dnoidal family degenerates."""


class GridMismatch(ValueError):
    """Arrays or operators built on incompatible grids were combined."""


class SymmetryError(ValueError):
    """A matrix does not carry the symmetry its tag claims."""


class OrthogonalityError(ValueError):
    """A right-hand side is not orthogonal to the supplied kernel."""
