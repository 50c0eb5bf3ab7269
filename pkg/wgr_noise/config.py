from __future__ import annotations

from typing import Annotated, Any

import msgspec

from wgr_noise.constants import DEFAULT_GAMMA
from wgr_noise.errors import ConfigError
from wgr_noise.types import EoCombination, ModeSource, Polarization, Shape, SolverKind

Positive = Annotated[float, msgspec.Meta(gt=0)]
PositiveInt = Annotated[int, msgspec.Meta(ge=1)]


class RefinementConfig(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    """
    Mesh refinement and solve settings.

    Attributes:
        mode_size_fraction (float): Longest element edge inside the mode region as a fraction of
            min(w_z, w_rho). Default is 0.25.
        grading (float): Growth of the target element size per unit distance away from the mode
            region and the curved boundary. Default is 0.25.
        chord_tolerance (float): Largest allowed gap between a boundary chord and the true
            curved boundary (m). Default is 10 nm.
        max_size_fraction (float): Largest element edge as a fraction of the body size. Default 1/8.
        level (int): Refinement level; each level halves every target size. Default is 0.
        max_nodes (int): Node budget of the fine level. Default is 400000.
        energy_tolerance (float): Largest accepted relative Richardson error of U. Default is 0.02.
        solver (SolverKind): Direct sparse factorisation or conjugate gradients. Default DIRECT.
        cg_tolerance (float): Relative residual target of the iterative path. Default 1e-10.
    """

    mode_size_fraction: Positive = 0.25
    grading: Positive = 0.25
    chord_tolerance: Positive = 10e-9
    max_size_fraction: Positive = 0.125
    level: int = 0
    max_nodes: PositiveInt = 400_000
    energy_tolerance: Positive = 0.02
    solver: SolverKind = SolverKind.DIRECT
    cg_tolerance: Positive = 1e-10

    @property
    def scale(self) -> float:
        """Multiplier applied to every target size at this level."""
        return 0.5**self.level

    def coarsened(self) -> RefinementConfig:
        return msgspec.structs.replace(self, level=self.level - 1)

    def refined(self) -> RefinementConfig:
        return msgspec.structs.replace(self, level=self.level + 1)


class SuppliedMode(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    """
    Mode parameters supplied verbatim for one geometry (SI units).
    """

    nu: Positive
    m: PositiveInt
    w_z: Positive
    w_rho: Positive
    rho0: Positive


class GeometryEntry(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    """
    One resonator of a scan.

    Attributes:
        shape (Shape): Sphere or disk.
        R (float): Major radius (m).
        S (float | None): Rim radius of curvature (m), disks only.
        thickness (float | None): Disk thickness (m). Defaults to R.
        mode (SuppliedMode | None): Supplied mode parameters, used when the scan's mode source
            is SUPPLIED. Entries without them take the bundled reference row of their geometry.
    """

    shape: Shape
    R: Positive
    S: Positive | None = None
    thickness: Positive | None = None
    mode: SuppliedMode | None = None


class ScanConfig(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    """
    Configuration of a noise-budget scan.

    Attributes:
        material (str): Material file path, or the name of a bundled material ("caf2").
        geometries (list[GeometryEntry]): Resonators to evaluate.
        temperatures (list[float]): Temperatures (K).
        taus (list[float]): Averaging times (s). Default is [1.0].
        mode_source (ModeSource): Estimate modes or use the supplied parameters.
        wavelength (float): Vacuum wavelength (m). Default is 1.565 um.
        polarization (Polarization): Polarization of the estimated mode. Default is TM.
        refinement (RefinementConfig): Mesh and solver settings.
        eo_mode (EoCombination): Elasto-optic combination mode. Default NEGLECT_DR.
        gamma (float): Thermorefractive geometry factor. Default 0.847.
        pressure_amplitude (float): Peak surface traction of the BB load (Pa). Default 1e6.
        eo_amplitude (float): Body-force amplitude of the EO load (N m^-3). Default 1e9.
        allow_extrapolation (bool): Clamp material properties outside the sampled range.
        threads (int): Threads used by the assembly kernels. Default is 1.
        workers (int): Concurrent geometry solves. Default is 1.
        out_dir (str): Output directory. Default "out".
        csv_name (str): Budget CSV file name. Default "budget.csv".
    """

    material: str = "caf2"
    geometries: list[GeometryEntry] = msgspec.field(default_factory=list)
    temperatures: list[Positive] = msgspec.field(default_factory=list)
    taus: list[Positive] = msgspec.field(default_factory=lambda: [1.0])
    mode_source: ModeSource = ModeSource.ESTIMATED
    wavelength: Positive = 1.565e-6
    polarization: Polarization = Polarization.TM
    refinement: RefinementConfig = msgspec.field(default_factory=RefinementConfig)
    eo_mode: EoCombination = EoCombination.NEGLECT_DR
    gamma: Positive = DEFAULT_GAMMA
    pressure_amplitude: Positive = 1e6
    eo_amplitude: Positive = 1e9
    allow_extrapolation: bool = False
    threads: PositiveInt = 1
    workers: PositiveInt = 1
    out_dir: str = "out"
    csv_name: str = "budget.csv"

    def __post_init__(self) -> None:
        if not self.geometries:
            raise ConfigError("geometry list is empty")
        if not self.temperatures:
            raise ConfigError("temperature list is empty")
        if not self.taus:
            raise ConfigError("tau list is empty")
        for entry in self.geometries:
            if entry.shape == Shape.DISK and entry.S is None:
                raise ConfigError(f"disk entry R={entry.R} has no S")


def scan_config_from_dict(data: dict[str, Any]) -> ScanConfig:
    """
    Validate a plain dictionary (from either config format) into a ``ScanConfig``.

    Raises
    ------
    ConfigError
        If a field has the wrong type, violates its range, or a list is empty.

    """
    try:
        return msgspec.convert(data, ScanConfig)
    except msgspec.ValidationError as e:
        raise ConfigError(str(e)) from e


def scan_config_to_dict(config: ScanConfig) -> dict[str, Any]:
    """Builtin-typed dictionary of ``config``, with unset optional fields dropped."""
    return _drop_none(msgspec.to_builtins(config))


def _drop_none(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _drop_none(v) for k, v in value.items() if v is not None}
    if isinstance(value, list):
        return [_drop_none(v) for v in value]
    return value
