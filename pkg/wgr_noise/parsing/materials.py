from __future__ import annotations

import msgspec

from wgr_noise.data_types import PropertySeries
from wgr_noise.errors import MaterialParseError
from wgr_noise.parsing.grammar import Assign, Block, GrammarError, Row, parse_document
from wgr_noise.types import Interpolation, ShearAverage


PROPERTY_KEYS: tuple[str, ...] = (
    "n",
    "C11",
    "C12",
    "C44",
    "gamma",
    "dn_dT_over_n",
    "phi",
    "p11",
    "p12",
    "p44",
    "alpha",
)

# Properties that must be sampled over temperature (at least two rows)
TEMPERATURE_DEPENDENT: frozenset[str] = frozenset({"gamma", "dn_dT_over_n", "phi", "alpha"})

DEFAULT_SCHEME: dict[str, Interpolation] = {
    "n": Interpolation.LINEAR,
    "C11": Interpolation.LINEAR,
    "C12": Interpolation.LINEAR,
    "C44": Interpolation.LINEAR,
    "p11": Interpolation.LINEAR,
    "p12": Interpolation.LINEAR,
    "p44": Interpolation.LINEAR,
    "gamma": Interpolation.LOG,
    "phi": Interpolation.LOG,
    "alpha": Interpolation.LOG,
    "dn_dT_over_n": Interpolation.SIGNED_LOG,
}

MAP_SCHEME: dict[str, Interpolation] = {s.value: s for s in Interpolation}
MAP_SHEAR_AVERAGE: dict[str, ShearAverage] = {s.value: s for s in ShearAverage}


class MaterialDocument(msgspec.Struct, frozen=True):
    """
    Raw content of a material file before physical validation.

    Attributes:
        name (str): Material name.
        constants (dict[str, float]): Temperature-independent properties given as ``key = value``.
        series (dict[str, PropertySeries]): Temperature-sampled properties given as blocks.
        shear_modulus (float | None): Isotropic shear modulus override (Pa).
        shear_average (ShearAverage): Averaging rule for the shear modulus.
    """

    name: str
    constants: dict[str, float]
    series: dict[str, PropertySeries]
    shear_modulus: float | None = None
    shear_average: ShearAverage = ShearAverage.HILL


def parse_material_document(text: str) -> MaterialDocument:
    """
    Read a material file into its raw constants and property series.

    Structure and key errors carry the offending line. Physical checks
    (monotone temperatures, signs, stability) are left to the caller.

    Raises
    ------
    MaterialParseError
        If the text does not parse, a key is unknown or repeated, or a value has the wrong form.

    """
    try:
        statements = parse_document(text)
    except GrammarError as e:
        raise MaterialParseError(e.msg, e.line, e.column) from e

    name = "unnamed"
    constants: dict[str, float] = {}
    series: dict[str, PropertySeries] = {}
    shear_modulus: float | None = None
    shear_average = ShearAverage.HILL
    seen: set[str] = set()

    def claim(key: str, line: int) -> None:
        if key in seen:
            raise MaterialParseError(f"duplicate key {key!r}", line)
        seen.add(key)

    for stmt in statements:
        if isinstance(stmt, Row):
            raise MaterialParseError("sample row outside a property block", stmt.line)
        if isinstance(stmt, Assign):
            claim(stmt.key, stmt.line)
            if stmt.key == "name":
                name = str(stmt.value)
            elif stmt.key == "shear_average":
                if stmt.value not in MAP_SHEAR_AVERAGE:
                    raise MaterialParseError(
                        f"shear_average must be one of {sorted(MAP_SHEAR_AVERAGE)}, "
                        f"was {stmt.value!r}",
                        stmt.line,
                    )
                shear_average = MAP_SHEAR_AVERAGE[stmt.value]
            elif stmt.key == "shear_modulus":
                shear_modulus = _number(stmt.key, stmt.value, stmt.line)
            elif stmt.key in PROPERTY_KEYS:
                constants[stmt.key] = _number(stmt.key, stmt.value, stmt.line)
            else:
                raise MaterialParseError(f"unknown key {stmt.key!r}", stmt.line)
            continue
        prop = _parse_property_block(stmt)
        claim(prop.name, stmt.line)
        series[prop.name] = prop

    return MaterialDocument(
        name=name,
        constants=constants,
        series=series,
        shear_modulus=shear_modulus,
        shear_average=shear_average,
    )


def _parse_property_block(block: Block) -> PropertySeries:
    head = block.head
    if head[0] != "property" or len(head) not in (2, 3):
        raise MaterialParseError(
            f"expected 'property <key> [scheme] {{...}}', got {' '.join(head)!r}",
            block.line,
        )
    key = head[1]
    if key not in PROPERTY_KEYS:
        raise MaterialParseError(f"unknown property {key!r}", block.line)
    if len(head) == 3:
        if head[2] not in MAP_SCHEME:
            raise MaterialParseError(
                f"interpolation must be one of {sorted(MAP_SCHEME)}, was {head[2]!r}",
                block.line,
            )
        scheme = MAP_SCHEME[head[2]]
    else:
        scheme = DEFAULT_SCHEME[key]

    rows = []
    for item in block.body:
        if not isinstance(item, Row):
            raise MaterialParseError(f"property {key!r} holds only 'T value' rows", item.line)
        rows.append(item.values)

    return PropertySeries(
        name=key,
        scheme=scheme,
        temperatures=tuple(t for t, _ in rows),
        values=tuple(v for _, v in rows),
    )


def _number(key: str, value: object, line: int) -> float:
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise MaterialParseError(f"{key} must be a number, was {value!r}", line)
    return float(value)
