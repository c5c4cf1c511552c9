"""Exception hierarchy shared by all crmorse modules.

Exit-code contract used by the CLI: InputError maps to 2,
DegeneratePencilError (and subclasses) to 3, CalibrationError to 4.
"""


class CRMorseError(Exception):
    """Base class for all crmorse errors."""


class InputError(CRMorseError, ValueError):
    """Invalid user input: bad document, bad dimension, violated precondition."""


class DegeneratePencilError(CRMorseError):
    """det(R + 2sL) vanishes identically on the requested interval.

    Every signature set is then empty in a structurally different way than
    for a nondegenerate pencil, so this is a hard error rather than a
    silent zero.
    """


class ChamberBoundaryError(DegeneratePencilError):
    """An eta quadrature node landed on a chamber boundary (eigenvalue at zero)."""


class ZeroExtremalMassError(InputError):
    """The requested q-chamber set is empty, so no extremal form exists."""


class CalibrationError(CRMorseError):
    """Lattice calibration record is missing, inconsistent, or irreproducible."""
