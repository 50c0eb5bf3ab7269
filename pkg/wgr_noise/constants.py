from typing import Final

from wgr_noise.types import ErrorInfo

# Physical constants (SI)
K_B: Final[float] = 1.380649e-23
SPEED_OF_LIGHT: Final[float] = 299_792_458.0

# Magnitude of the first zero of the Airy function Ai
AIRY_ZERO_1: Final[float] = 2.338107410459767

# Thermorefractive geometry factor for a 1 mm sphere at low frequency
DEFAULT_GAMMA: Final[float] = 0.847

# Empirical coefficient of the radial mode half-width, w_rho = c * R * m^(-2/3)
W_RHO_COEFFICIENT: Final[float] = 0.80

# Closed-form coefficient of the mode-tube minor radius
MINOR_RADIUS_COEFFICIENT: Final[float] = 0.335

# Asymptotic dispersion relation is trusted above this size parameter 2 pi R n / lambda
MIN_SIZE_PARAMETER: Final[float] = 50.0

# Structural-damping Allan prefactor sqrt(8 ln 2 / pi)
ALLAN_1F_PREFACTOR: Final[float] = (8.0 * 0.6931471805599453 / 3.141592653589793) ** 0.5

# Process exit codes
EXIT_OK: Final[int] = 0
EXIT_CONFIG_ERROR: Final[int] = 1
EXIT_VALIDATION_FAILURE: Final[int] = 2
EXIT_PARTIAL_FAILURE: Final[int] = 3

MATERIAL_PARSE_ERROR = ErrorInfo(100, "Material file does not parse")
MISSING_PROPERTY = ErrorInfo(101, "Required property missing or undersampled")
NON_MONOTONE_TEMPERATURE = ErrorInfo(102, "Sample temperatures are not strictly increasing")
TEMPERATURE_OUT_OF_RANGE = ErrorInfo(103, "Temperature outside the sampled range")
ELASTIC_INSTABILITY = ErrorInfo(104, "Elastic constants violate cubic stability")
INVALID_PROPERTY_VALUE = ErrorInfo(105, "Property value violates its sign constraint")

ASYMPTOTIC_VALIDITY = ErrorInfo(200, "Resonator too small for the asymptotic mode estimate")
MODE_INVARIANT = ErrorInfo(201, "Mode parameters violate a profile invariant")
GEOMETRY_INVALID = ErrorInfo(202, "Resonator geometry is invalid")

MESHING_FAILURE = ErrorInfo(300, "Meshing failed")
REFINEMENT_BUDGET = ErrorInfo(301, "Mesh exceeds the refinement budget")
SINGULAR_SYSTEM = ErrorInfo(302, "Stiffness matrix is singular")
NONCONVERGENT_REFINEMENT = ErrorInfo(303, "Strain energy did not converge under refinement")
SOLVER_FAILURE = ErrorInfo(304, "Linear solver failed")
NUMERICAL_FAILURE = ErrorInfo(305, "Numerical failure outside the typed solver errors")

CONFIG_INVALID = ErrorInfo(400, "Invalid configuration")
INSUFFICIENT_POINTS = ErrorInfo(401, "Not enough points for a scaling fit")
NON_MONOTONE_VARIABLE = ErrorInfo(402, "Fit variable is not strictly monotone")
