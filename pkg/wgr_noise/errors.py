from wgr_noise import constants
from wgr_noise.types import ErrorInfo


class WgrNoiseError(Exception):
    """
    Base exception carrying an ``ErrorInfo`` code and a detail text.
    """

    info: ErrorInfo = ErrorInfo(0, "Unspecified error")

    def __init__(self, text: str = "", info: ErrorInfo | None = None):
        self.info = info or type(self).info
        self.text = text
        super().__init__(f"{self.info.msg()}: {text}" if text else self.info.msg())

    @property
    def code(self) -> int:
        return self.info.code()

    @property
    def status(self) -> str:
        """Short status tag used in scan output rows."""
        return f"E{self.code}"


class MaterialParseError(WgrNoiseError):
    info = constants.MATERIAL_PARSE_ERROR

    def __init__(self, text: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{text}{where}")


class MissingPropertyError(WgrNoiseError):
    info = constants.MISSING_PROPERTY


class NonMonotoneTemperatureError(WgrNoiseError):
    info = constants.NON_MONOTONE_TEMPERATURE


class TemperatureRangeError(WgrNoiseError):
    info = constants.TEMPERATURE_OUT_OF_RANGE


class StabilityError(WgrNoiseError):
    info = constants.ELASTIC_INSTABILITY


class PropertyValueError(WgrNoiseError):
    info = constants.INVALID_PROPERTY_VALUE


class AsymptoticValidityError(WgrNoiseError):
    info = constants.ASYMPTOTIC_VALIDITY


class ModeInvariantError(WgrNoiseError):
    info = constants.MODE_INVARIANT

    def __init__(self, constraint: str, text: str = ""):
        self.constraint = constraint
        super().__init__(f"{constraint}{' - ' + text if text else ''}")


class GeometryError(WgrNoiseError):
    info = constants.GEOMETRY_INVALID


class MeshingError(WgrNoiseError):
    info = constants.MESHING_FAILURE


class RefinementBudgetError(WgrNoiseError):
    info = constants.REFINEMENT_BUDGET


class SingularSystemError(WgrNoiseError):
    info = constants.SINGULAR_SYSTEM


class NonConvergentRefinementError(WgrNoiseError):
    info = constants.NONCONVERGENT_REFINEMENT


class SolverError(WgrNoiseError):
    info = constants.SOLVER_FAILURE


class NumericalError(WgrNoiseError):
    info = constants.NUMERICAL_FAILURE


class ConfigError(WgrNoiseError):
    info = constants.CONFIG_INVALID


class InsufficientPointsError(WgrNoiseError):
    info = constants.INSUFFICIENT_POINTS


class NonMonotoneVariableError(WgrNoiseError):
    info = constants.NON_MONOTONE_VARIABLE
