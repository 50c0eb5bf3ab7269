from __future__ import annotations

import math
from typing import Annotated, NamedTuple

import msgspec

from wgr_noise.constants import SPEED_OF_LIGHT
from wgr_noise.errors import GeometryError, ModeInvariantError, StabilityError
from wgr_noise.types import EoCombination, Interpolation, LoadKind, ModeSource, Polarization, Shape

PositiveFloat = Annotated[float, msgspec.Meta(gt=0)]


class MaterialProperties(msgspec.Struct, frozen=True):
    """
    Physical constants of the resonator crystal at one temperature.

    Attributes:
        n (float): Refractive index.
        C11, C12, C44 (float): Cubic elastic constants (Pa).
        gamma (float): Thermal conductivity (W m^-1 K^-1).
        dn_dT_over_n (float): Thermorefractive index (1/n)(dn/dT) (K^-1), signed.
        phi (float): Loss angle.
        p11, p12, p44 (float): Elasto-optic constants.
        alpha (float): Thermal expansion coefficient (K^-1). Stored, not used by any noise term.
        shear_modulus (float | None): Optional isotropic shear modulus override (Pa).
    """

    n: float
    C11: float
    C12: float
    C44: float
    gamma: float
    dn_dT_over_n: float
    phi: float
    p11: float
    p12: float
    p44: float
    alpha: float
    shear_modulus: float | None = None

    def check_stability(self) -> None:
        if not self.C11 > 0:
            raise StabilityError(f"C11 must be positive, was {self.C11}")
        if not self.C11 > abs(self.C12):
            raise StabilityError(f"C11 must exceed |C12|, was C11={self.C11}, C12={self.C12}")
        if not self.C44 > 0:
            raise StabilityError(f"C44 must be positive, was {self.C44}")


class PropertySeries(msgspec.Struct, frozen=True):
    """
    Temperature samples of one material property.

    Attributes:
        name (str): Property key, a ``MaterialProperties`` field name.
        scheme (Interpolation): Interpolation scheme between samples.
        temperatures (tuple[float, ...]): Sample temperatures (K), strictly increasing.
        values (tuple[float, ...]): Property values at the sample temperatures.
    """

    name: str
    scheme: Interpolation
    temperatures: tuple[float, ...]
    values: tuple[float, ...]

    @property
    def t_min(self) -> float:
        return self.temperatures[0]

    @property
    def t_max(self) -> float:
        return self.temperatures[-1]


class IsotropicModuli(msgspec.Struct, frozen=True):
    """
    Effective isotropic moduli: bulk modulus kappa (Pa), shear modulus G (Pa), Poisson ratio mu.
    """

    kappa: float
    G: float
    mu: float

    @property
    def lame_lambda(self) -> float:
        return self.kappa - 2.0 * self.G / 3.0

    @property
    def youngs_modulus(self) -> float:
        return 9.0 * self.kappa * self.G / (3.0 * self.kappa + self.G)

    @classmethod
    def from_kappa_g(cls, kappa: float, G: float) -> IsotropicModuli:
        if not (kappa > 0 and G > 0):
            raise StabilityError(f"moduli must be positive, was kappa={kappa}, G={G}")
        return cls(kappa=kappa, G=G, mu=(3.0 * kappa - 2.0 * G) / (2.0 * (3.0 * kappa + G)))


class ResonatorGeometry(msgspec.Struct, frozen=True):
    """
    Sphere or disk shape parameters.

    Attributes:
        shape (Shape): Sphere or disk.
        R (float): Major radius (m).
        S (float | None): Rim vertical radius of curvature (m), disks only.
        thickness (float | None): Disk thickness (m). Defaults to R for disks.
    """

    shape: Shape
    R: PositiveFloat
    S: float | None = None
    thickness: float | None = None

    def __post_init__(self) -> None:
        if not self.R > 0:
            raise GeometryError(f"R must be positive, was {self.R}")
        if self.shape == Shape.DISK:
            if self.S is None or not self.S > 0:
                raise GeometryError(f"disk needs a positive S, was {self.S}")
            if self.thickness is not None and not self.thickness > 0:
                raise GeometryError(f"disk thickness must be positive, was {self.thickness}")

    @classmethod
    def sphere(cls, R: float) -> ResonatorGeometry:
        return cls(shape=Shape.SPHERE, R=R)

    @classmethod
    def disk(cls, R: float, S: float, thickness: float | None = None) -> ResonatorGeometry:
        return cls(shape=Shape.DISK, R=R, S=S, thickness=thickness)

    @property
    def disk_thickness(self) -> float:
        return self.thickness if self.thickness is not None else self.R

    @property
    def geometry_id(self) -> str:
        if self.shape == Shape.SPHERE:
            return f"sphere-R{self.R:.4g}"
        return f"disk-R{self.R:.4g}-S{self.S:.4g}"


class ModeProfile(msgspec.Struct, frozen=True):
    """
    Fundamental whispering-gallery mode descriptors.

    Attributes:
        nu (float): Optical frequency (Hz).
        m (int): Azimuthal index.
        w_z (float): Polar intensity 1/e^2 half-width (m).
        w_rho (float): Radial intensity 1/e^2 half-width (m).
        rho0 (float): Radial position of the mode centre (m).
        lambda_ (float): Vacuum wavelength (m).
        R (float): Major radius of the host resonator (m).
        n (float): Refractive index used for the frequency consistency check.
        polarization (Polarization): TE or TM.
        source (ModeSource): Estimated or supplied.
    """

    nu: float
    m: int
    w_z: float
    w_rho: float
    rho0: float
    lambda_: float
    R: float
    n: float
    polarization: Polarization = Polarization.TM
    source: ModeSource = ModeSource.SUPPLIED

    def check(self, frequency: bool = True) -> None:
        """
        Raise ``ModeInvariantError`` naming the first violated constraint.

        With ``frequency`` False the 2% consistency of nu with m c / (2 pi n rho0) is skipped.
        """
        if not self.m >= 1:
            raise ModeInvariantError("m >= 1", f"m={self.m}")
        if not self.w_rho > 0:
            raise ModeInvariantError("w_rho > 0", f"w_rho={self.w_rho}")
        if not self.w_rho <= self.w_z:
            raise ModeInvariantError("w_rho <= w_z", f"w_rho={self.w_rho}, w_z={self.w_z}")
        if not self.w_z < self.R:
            raise ModeInvariantError("w_z < R", f"w_z={self.w_z}, R={self.R}")
        if not 0 < self.rho0 < self.R:
            raise ModeInvariantError("0 < rho0 < R", f"rho0={self.rho0}, R={self.R}")
        if not frequency:
            return
        expected = self.m * SPEED_OF_LIGHT / (2.0 * math.pi * self.n * self.rho0)
        if abs(self.nu - expected) > 0.02 * expected:
            raise ModeInvariantError(
                "nu ~ m c / (2 pi n rho0) within 2%",
                f"nu={self.nu:.6e}, m c/(2 pi n rho0)={expected:.6e}",
            )


class ModeGeometrySummary(NamedTuple):
    """
    Effective minor radius r (m) and mode volume V_m (m^3).
    """

    r: float
    V_m: float


class LoadSpec(msgspec.Struct, frozen=True):
    """
    Load applied to the resonator, independent of any mesh.

    Attributes:
        kind (LoadKind): Load type.
        amplitude (float): Peak traction A or pressure P (Pa), or body-force amplitude
            Sigma0 (N m^-3).
        w_z (float): Polar 1/e^2 half-width of the profile (m).
        w_rho (float): Radial half-width of the profile (m).
        rho0 (float): Radial position of the profile centre (m).
    """

    kind: LoadKind
    amplitude: PositiveFloat
    w_z: float = 0.0
    w_rho: float = 0.0
    rho0: float = 0.0

    def scaled(self, factor: float) -> LoadSpec:
        return msgspec.structs.replace(self, amplitude=self.amplitude * factor)


class StrainEnergyResult(msgspec.Struct, frozen=True):
    """
    Result of one converged elastostatic solve over the whole revolved body.

    Attributes:
        U (float): Stored strain energy 1/2 u.K.u (J).
        F (float): Conjugate total force (N).
        work (float): Load work f.u (J); equals 2U by Clapeyron's theorem.
        signed_force (float): Signed counterpart of F (N); informative for the EO load.
        dofs (int): Free degrees of freedom on the fine level.
        n_elements (int): Elements on the fine level.
        residual_norm (float): Relative residual ||K u - f|| / ||f|| on the fine level.
        U_coarse (float | None): Energy on the coarser companion level (J).
        discretization_error (float | None): Richardson bound on |U - U_exact| (J).
        truncated (bool): Whether the load profile is cut by the body outside its expected side.
    """

    U: float
    F: float
    work: float
    signed_force: float
    dofs: int
    n_elements: int
    residual_norm: float
    U_coarse: float | None = None
    discretization_error: float | None = None
    truncated: bool = False

    @property
    def relative_error(self) -> float | None:
        if self.discretization_error is None:
            return None
        return self.discretization_error / self.U


class FdtInput(msgspec.Struct, frozen=True):
    """
    Inputs of the structural-damping fluctuation-dissipation relation.

    Attributes:
        U (float): Strain energy (J).
        F (float): Conjugate force (N).
        x_scale (float): Coordinate normaliser (m): R for the path radius, r for the minor radius.
        T (float): Temperature (K).
        phi (float): Loss angle.
    """

    U: float
    F: float
    x_scale: float
    T: float
    phi: float


class NoiseBudget(msgspec.Struct, frozen=True):
    """
    Noise record for one (geometry, temperature, averaging time).
    Failed rows keep their coordinates, carry NaN deviations and a non-``ok`` status.
    """

    geometry_id: str
    shape: str
    R: float
    S: float
    T: float
    tau: float
    sigma_TR: float
    sigma_BB: float
    sigma_dr_over_r: float
    sigma_EO: float
    Gamma: float
    eo_mode: EoCombination
    U_bb: float = math.nan
    F_bb: float = math.nan
    U_eo: float = math.nan
    F_eo: float = math.nan
    status: str = "ok"


class ScalingFit(NamedTuple):
    """
    Log-log least-squares power law for one quantity against one variable.
    """

    quantity: str
    variable: str
    exponent: float
    residual: float
    points: tuple[tuple[float, float], ...]
