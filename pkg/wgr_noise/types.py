from enum import Enum


class Shape(Enum):
    """
    Resonator shape.

    SPHERE: a full sphere of radius R.
    DISK: an axisymmetric disk of radius R whose rim has vertical radius of curvature S.
    """

    SPHERE = "sphere"
    DISK = "disk"

    def to_str(self) -> str:
        """Returns the string representation of the enum value."""
        return self.value


class Polarization(Enum):
    """
    Polarization of the fundamental whispering-gallery mode.

    The asymptotic dispersion relation carries a polarization term P / sqrt(n^2 - 1),
    with P = n for TE and P = 1/n for TM.
    """

    TE = "TE"
    TM = "TM"

    def to_str(self) -> str:
        return self.value


class ModeSource(Enum):
    ESTIMATED = "estimated"
    SUPPLIED = "supplied"


class LoadKind(Enum):
    """
    Load types understood by the elastostatic solver.

    BB_SURFACE: Gaussian outward surface traction conjugate to the mode path radius.
    EO_VOLUMETRIC: Gaussian body force directed to the mode centre, conjugate to the minor radius.
    UNIFORM_PRESSURE: constant pressure on the whole outer surface.
    """

    BB_SURFACE = "bb_surface"
    EO_VOLUMETRIC = "eo_volumetric"
    UNIFORM_PRESSURE = "uniform_pressure"


class EoCombination(Enum):
    """
    How the path-radius and minor-radius terms combine into the elasto-optic deviation.
    """

    NEGLECT_DR = "neglect_dR"
    LINEAR = "linear"
    QUADRATURE = "quadrature"

    def to_str(self) -> str:
        return self.value


class ShearAverage(Enum):
    VOIGT = "voigt"
    REUSS = "reuss"
    HILL = "hill"


class Interpolation(Enum):
    """
    Interpolation scheme tag carried by every temperature-dependent property.

    LINEAR: linear in T.
    LOG: power law, linear in (log T, log value); requires positive values.
    SIGNED_LOG: power law on the magnitude between samples of equal sign, linear on the
    signed value across a sign change.
    """

    LINEAR = "linear"
    LOG = "log"
    SIGNED_LOG = "signed_log"


class SolverKind(Enum):
    DIRECT = "direct"
    CG = "cg"


class ErrorInfo:
    """Class to represent an error with a code and message."""

    def __init__(self, code: int, msg: str):
        self._code = code
        self._msg = msg

    def __str__(self) -> str:
        return f"ErrorInfo(code={self._code}, msg={self._msg})"

    def __repr__(self) -> str:
        return str(self)

    def code(self) -> int:
        """Returns the error code."""
        return self._code

    def msg(self) -> str:
        """Returns the error message."""
        return self._msg
