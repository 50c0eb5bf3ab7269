"""
Bundled reference tables of mode parameters, strain energies and noise levels for CaF2.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

import msgspec

from wgr_noise.errors import ConfigError, GeometryError
from wgr_noise.parsing.tables import parse_table_text
from wgr_noise.types import Shape


class ModeRow(msgspec.Struct, frozen=True):
    shape: Shape
    R: float
    nu: float
    w_z: float
    w_rho: float
    rho0: float
    S: float | None = None
    m: int | None = None


class StrainRow(msgspec.Struct, frozen=True):
    """
    One strain-energy row: load profile widths, U (J), F (N) and the tabulated Allan deviation.
    """

    shape: Shape
    R: float
    w_z: float
    U: float
    F: float
    sigma: float
    S: float | None = None
    w_rho: float | None = None


class BudgetRow(msgspec.Struct, frozen=True):
    shape: Shape
    R: float
    bb_room: float
    eo_room: float
    bb_cold: float
    eo_cold: float
    S: float | None = None


class ReferenceTables(msgspec.Struct, frozen=True):
    """
    Attributes:
        temperature (float): Temperature of the strain-energy rows (K).
        room_temperature (float): Temperature of the room-temperature budget columns (K).
        phi (float): Loss angle of the strain-energy rows.
        wavelength (float): Vacuum wavelength of the mode rows (m).
        pressure_amplitude (float): BB traction amplitude of the strain-energy rows (Pa).
    """

    temperature: float
    room_temperature: float
    phi: float
    wavelength: float
    pressure_amplitude: float
    mode: list[ModeRow]
    bb: list[StrainRow]
    eo: list[StrainRow]
    budget: list[BudgetRow]

    def find_mode(self, shape: Shape, R: float, S: float | None = None) -> ModeRow:
        return _find(self.mode, shape, R, S)

    def find_budget(self, shape: Shape, R: float, S: float | None = None) -> BudgetRow:
        return _find(self.budget, shape, R, S)


def parse_reference_tables(text: str) -> ReferenceTables:
    try:
        return msgspec.convert(parse_table_text(text), ReferenceTables)
    except msgspec.ValidationError as e:
        raise ConfigError(f"reference table: {e}") from e


@lru_cache(maxsize=1)
def load_reference_tables() -> ReferenceTables:
    """
    The bundled reference tables (parsed once).
    """
    source = resources.files("wgr_noise").joinpath("data", "reference.tbl")
    return parse_reference_tables(source.read_text(encoding="utf-8"))


def _find(rows, shape: Shape, R: float, S: float | None):
    for row in rows:
        if row.shape != shape or not _close(row.R, R):
            continue
        if shape == Shape.SPHERE or (S is not None and row.S is not None and _close(row.S, S)):
            return row
    raise GeometryError(f"no tabulated {shape.value} with R={R}, S={S}")


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 * max(abs(a), abs(b))
