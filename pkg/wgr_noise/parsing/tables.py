from __future__ import annotations

from typing import Any

from wgr_noise.errors import ConfigError
from wgr_noise.parsing.grammar import Assign, Block, GrammarError, parse_document

TABLE_KINDS: tuple[str, ...] = ("mode", "bb", "eo", "budget")


def parse_table_text(text: str) -> dict[str, Any]:
    """
    Parse a reference-table document.

    Top-level assignments become scalar entries; each ``<kind> <shape> { key = value ... }``
    block becomes one row dictionary (with ``shape`` set) appended under ``kind``.
    """
    try:
        statements = parse_document(text)
    except GrammarError as e:
        raise ConfigError(f"{e.msg} (line {e.line}, column {e.column})") from e

    data: dict[str, Any] = {kind: [] for kind in TABLE_KINDS}
    for stmt in statements:
        if isinstance(stmt, Assign):
            data[stmt.key] = stmt.value
        elif isinstance(stmt, Block) and len(stmt.head) == 2 and stmt.head[0] in TABLE_KINDS:
            row: dict[str, Any] = {"shape": stmt.head[1]}
            for item in stmt.body:
                if not isinstance(item, Assign):
                    raise ConfigError(f"table rows hold only assignments (line {item.line})")
                row[item.key] = item.value
            data[stmt.head[0]].append(row)
        else:
            raise ConfigError(f"unexpected statement (line {stmt.line})")
    return data
