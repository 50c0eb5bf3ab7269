"""
Temperature-dependent material properties and effective isotropic moduli.
"""

from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

import msgspec
import numpy as np

from wgr_noise.common import ComponentLogger
from wgr_noise.data_types import IsotropicModuli, MaterialProperties, PropertySeries
from wgr_noise.errors import (
    ConfigError,
    MissingPropertyError,
    NonMonotoneTemperatureError,
    PropertyValueError,
    StabilityError,
    TemperatureRangeError,
)
from wgr_noise.parsing.materials import PROPERTY_KEYS, TEMPERATURE_DEPENDENT
from wgr_noise.parsing.materials import parse_material_document
from wgr_noise.types import Interpolation, ShearAverage

BUNDLED_MATERIALS: tuple[str, ...] = ("caf2",)

_log = ComponentLogger("materials")


class MaterialTable(msgspec.Struct, frozen=True):
    """
    Temperature-sampled physical constants of one crystal.

    Attributes:
        name (str): Material name.
        constants (dict[str, float]): Temperature-independent properties.
        series (dict[str, PropertySeries]): Temperature-sampled properties with their schemes.
        shear_modulus (float | None): Isotropic shear modulus override (Pa).
        shear_average (ShearAverage): Averaging rule used when no override is given.
    """

    name: str
    constants: dict[str, float]
    series: dict[str, PropertySeries]
    shear_modulus: float | None = None
    shear_average: ShearAverage = ShearAverage.HILL

    @property
    def t_min(self) -> float:
        return max(s.t_min for s in self.series.values())

    @property
    def t_max(self) -> float:
        return min(s.t_max for s in self.series.values())

    @property
    def sample_temperatures(self) -> list[float]:
        temps = {t for s in self.series.values() for t in s.temperatures}
        return sorted(t for t in temps if self.t_min <= t <= self.t_max)

    @property
    def samples(self) -> list[tuple[float, MaterialProperties]]:
        """Ordered (temperature, properties) pairs at every sample temperature in range."""
        return [(t, properties_at(self, t)) for t in self.sample_temperatures]

    def moduli_at(self, T: float, extrapolate: bool = False) -> IsotropicModuli:
        return isotropic_moduli(properties_at(self, T, extrapolate), self.shear_average)


def load_material_table(text: str) -> MaterialTable:
    """
    Build a validated material table from the text of a material file.

    Parameters
    ----------
    text : str
        Document in the material file grammar (see ``docs/material_format.md``).

    Returns
    -------
    MaterialTable

    Raises
    ------
    MaterialParseError
        If the document does not parse.
    MissingPropertyError
        If a required property is absent, or a temperature-dependent one has fewer than two samples.
    NonMonotoneTemperatureError
        If sample temperatures are not strictly increasing.
    PropertyValueError
        If a value violates its sign constraint.
    StabilityError
        If the elastic constants are not stable.

    """
    doc = parse_material_document(text)

    for key in PROPERTY_KEYS:
        if key not in doc.constants and key not in doc.series:
            raise MissingPropertyError(f"{doc.name}: property {key!r} is missing")
    for key in TEMPERATURE_DEPENDENT:
        if key in doc.constants or len(doc.series[key].temperatures) < 2:
            raise MissingPropertyError(
                f"{doc.name}: property {key!r} needs at least two temperature samples"
            )

    for prop in doc.series.values():
        _check_series(doc.name, prop)
    for key, value in doc.constants.items():
        if not value > 0:
            raise PropertyValueError(f"{doc.name}: {key} must be positive, was {value}")
    if doc.shear_modulus is not None and not doc.shear_modulus > 0:
        raise PropertyValueError(f"{doc.name}: shear_modulus must be positive")

    table = MaterialTable(
        name=doc.name,
        constants=doc.constants,
        series=doc.series,
        shear_modulus=doc.shear_modulus,
        shear_average=doc.shear_average,
    )
    if not table.t_min < table.t_max:
        raise PropertyValueError(
            f"{doc.name}: temperature-sampled properties share no common range"
        )
    for T in table.sample_temperatures:
        props = properties_at(table, T)
        props.check_stability()
        isotropic_moduli(props, table.shear_average)

    _log.debug(
        f"Loaded material {table.name!r}: {len(doc.series)} sampled properties over "
        f"[{table.t_min}, {table.t_max}] K",
    )
    return table


def load_material_file(path: str | Path) -> MaterialTable:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"material {str(path)!r} is neither bundled nor a file")
    return load_material_table(path.read_text(encoding="utf-8"))


def load_bundled(name: str = "caf2") -> MaterialTable:
    """
    Load a material shipped with the package (``caf2``).
    """
    key = name.lower()
    if key not in BUNDLED_MATERIALS:
        raise MissingPropertyError(f"no bundled material {name!r}; have {list(BUNDLED_MATERIALS)}")
    source = resources.files("wgr_noise").joinpath("data", f"{key}.mat")
    return load_material_table(source.read_text(encoding="utf-8"))


def resolve_material(reference: str) -> MaterialTable:
    """
    Resolve a material reference: a bundled name, or a path to a material file.
    """
    if reference.lower() in BUNDLED_MATERIALS:
        return load_bundled(reference)
    return load_material_file(reference)


def properties_at(
    table: MaterialTable,
    T: float,
    extrapolate: bool = False,
) -> MaterialProperties:
    """
    Interpolate every property of ``table`` at temperature ``T``.

    Parameters
    ----------
    table : MaterialTable
        The material.
    T : float
        Temperature (K).
    extrapolate : bool, default False
        If True, temperatures outside a property's sampled range take that property's
        nearest end value instead of raising.

    Returns
    -------
    MaterialProperties

    Raises
    ------
    TemperatureRangeError
        If ``T`` lies outside the common sampled range and ``extrapolate`` is False.

    """
    if not (table.t_min <= T <= table.t_max):
        if not extrapolate:
            raise TemperatureRangeError(
                f"{table.name}: T={T} K outside [{table.t_min}, {table.t_max}] K"
            )
        _log.warning(f"{table.name}: clamping properties at T={T} K to the sampled range")

    values: dict[str, float] = dict(table.constants)
    for key, prop in table.series.items():
        values[key] = interpolate(prop, min(max(T, prop.t_min), prop.t_max))
    return MaterialProperties(**values, shear_modulus=table.shear_modulus)


def interpolate(prop: PropertySeries, T: float) -> float:
    """
    Evaluate ``prop`` at ``T`` (within its range) by its tagged scheme; exact at sample points.
    """
    ts = prop.temperatures
    k = int(np.searchsorted(ts, T, side="right")) - 1
    if 0 <= k < len(ts) and ts[k] == T:
        return prop.values[k]
    k = min(max(k, 0), len(ts) - 2)
    t0, t1 = ts[k], ts[k + 1]
    v0, v1 = prop.values[k], prop.values[k + 1]

    if prop.scheme == Interpolation.LINEAR or (
        prop.scheme == Interpolation.SIGNED_LOG and not v0 * v1 > 0
    ):
        return v0 + (v1 - v0) * (T - t0) / (t1 - t0)

    sign = math.copysign(1.0, v0)
    frac = (math.log(T) - math.log(t0)) / (math.log(t1) - math.log(t0))
    return sign * math.exp(math.log(abs(v0)) + frac * (math.log(abs(v1)) - math.log(abs(v0))))


def voigt_reuss_hill(C11: float, C12: float, C44: float) -> tuple[float, float, float]:
    """
    Voigt, Reuss and Hill isotropic shear moduli of a cubic crystal.
    """
    g_voigt = (C11 - C12 + 3.0 * C44) / 5.0
    g_reuss = 5.0 * (C11 - C12) * C44 / (4.0 * C44 + 3.0 * (C11 - C12))
    return g_voigt, g_reuss, 0.5 * (g_voigt + g_reuss)


def isotropic_moduli(
    props: MaterialProperties,
    average: ShearAverage = ShearAverage.HILL,
) -> IsotropicModuli:
    """
    Effective isotropic moduli of a cubic crystal.

    The bulk modulus is exact for cubic symmetry, kappa = (C11 + 2 C12)/3. The shear
    modulus is ``props.shear_modulus`` when set, otherwise the ``average`` of the
    Voigt and Reuss bounds.

    Raises
    ------
    StabilityError
        If the elastic constants violate cubic stability.

    """
    props.check_stability()
    kappa = (props.C11 + 2.0 * props.C12) / 3.0
    if props.shear_modulus is not None:
        G = props.shear_modulus
    else:
        g_voigt, g_reuss, g_hill = voigt_reuss_hill(props.C11, props.C12, props.C44)
        G = {
            ShearAverage.VOIGT: g_voigt,
            ShearAverage.REUSS: g_reuss,
            ShearAverage.HILL: g_hill,
        }[average]
    moduli = IsotropicModuli.from_kappa_g(kappa, G)
    if not -1.0 < moduli.mu < 0.5:
        raise StabilityError(f"Poisson ratio {moduli.mu} outside (-1, 0.5)")
    return moduli


def _check_series(material: str, prop: PropertySeries) -> None:
    ts = np.asarray(prop.temperatures)
    vs = np.asarray(prop.values)
    if len(ts) == 0:
        raise MissingPropertyError(f"{material}: property {prop.name!r} has no samples")
    if not np.all(ts > 0):
        raise PropertyValueError(f"{material}: {prop.name} has a non-positive temperature")
    if not np.all(np.diff(ts) > 0):
        raise NonMonotoneTemperatureError(
            f"{material}: {prop.name} temperatures {list(prop.temperatures)}"
        )
    if prop.name == "dn_dT_over_n":
        if prop.scheme == Interpolation.LOG and not (np.all(vs > 0) or np.all(vs < 0)):
            raise PropertyValueError(
                f"{material}: dn_dT_over_n changes sign; use linear or signed_log"
            )
        return
    if not np.all(vs > 0):
        raise PropertyValueError(f"{material}: {prop.name} must be positive")
