"""
Scan configuration files: the structured-text grammar shared with material files, or TOML.

    material = "caf2"
    temperatures = [5.5, 300]
    refinement { level = 1 }
    geometry sphere { R = [1e-4, 1e-3, 1e-2] }
    geometry disk { R = 1e-3  S = 1.5e-4  mode { nu = 1.9152e14 ... } }

List-valued ``R``, ``S`` or ``thickness`` in a geometry entry expand to one entry per
combination, in the order written.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Any

import toml

from wgr_noise.config import ScanConfig, scan_config_from_dict
from wgr_noise.errors import ConfigError
from wgr_noise.parsing.grammar import Assign, Block, GrammarError, Row, parse_document
from wgr_noise.types import EoCombination

SWEEP_KEYS: tuple[str, ...] = ("R", "S", "thickness")

MAP_EO_MODE: dict[str, EoCombination] = {m.value: m for m in EoCombination}


def parse_config_text(text: str) -> dict[str, Any]:
    """
    Parse a structured-text scan configuration into a plain dictionary.

    Raises
    ------
    ConfigError
        If the text does not parse or repeats a key.

    """
    try:
        statements = parse_document(text)
    except GrammarError as e:
        raise ConfigError(f"{e.msg} (line {e.line}, column {e.column})") from e

    data: dict[str, Any] = {}
    geometries: list[dict[str, Any]] = []
    for stmt in statements:
        if isinstance(stmt, Block) and stmt.head[0] == "geometry":
            if len(stmt.head) != 2:
                raise ConfigError(f"expected 'geometry <sphere|disk> {{...}}' (line {stmt.line})")
            entry = _section(stmt.body)
            entry["shape"] = stmt.head[1]
            geometries.append(entry)
        else:
            _put(data, stmt)
    if geometries:
        if "geometries" in data:
            raise ConfigError("geometries given both as blocks and as a list")
        data["geometries"] = geometries
    return data


def load_config_dict(path: str | Path) -> dict[str, Any]:
    """
    Read a scan configuration file (``.toml`` or structured text) into a dictionary.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {str(path)!r} not found")
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".toml":
        try:
            data = toml.loads(text)
        except toml.TomlDecodeError as e:
            raise ConfigError(f"{path}: {e}") from e
    else:
        data = parse_config_text(text)
    data["geometries"] = expand_geometries(data.get("geometries", []))
    return data


def load_scan_config(path: str | Path, **overrides: Any) -> ScanConfig:
    """
    Load and validate a scan configuration file.

    Parameters
    ----------
    path : str or Path
        Config file; ``.toml`` is read as TOML, anything else with the structured-text grammar.
    **overrides
        Top-level fields replacing the file's values (None values are ignored).

    Returns
    -------
    ScanConfig

    """
    data = load_config_dict(path)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return scan_config_from_dict(data)


def expand_geometries(entries: list[dict[str, Any]]) -> list[dict[str, Any]]:
    expanded = []
    for entry in entries:
        keys = [k for k in SWEEP_KEYS if isinstance(entry.get(k), list)]
        if not keys:
            expanded.append(entry)
            continue
        for combo in itertools.product(*(entry[k] for k in keys)):
            expanded.append({**entry, **dict(zip(keys, combo))})
    return expanded


def _section(body: tuple[Any, ...]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for stmt in body:
        _put(out, stmt)
    return out


def _put(target: dict[str, Any], stmt: Assign | Block | Row) -> None:
    if isinstance(stmt, Row):
        raise ConfigError(f"unexpected numeric row (line {stmt.line})")
    key = stmt.key if isinstance(stmt, Assign) else stmt.head[0]
    if isinstance(stmt, Block) and len(stmt.head) != 1:
        raise ConfigError(f"unexpected block {' '.join(stmt.head)!r} (line {stmt.line})")
    if key in target:
        raise ConfigError(f"duplicate key {key!r} (line {stmt.line})")
    target[key] = stmt.value if isinstance(stmt, Assign) else _section(stmt.body)
