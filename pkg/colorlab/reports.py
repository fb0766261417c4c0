# colorlab/reports.py
"""
Report emission: canonical JSON with exact rationals and the CSV gap table
"""
import json
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List

import pandas as pd
from loguru import logger

from colorlab.model import format_rational

CSV_COLUMNS = ["instance", "lp", "ilp", "gap"]


def to_jsonable(value):
    """Recursively convert Fractions to "p/q" strings and dataclasses to dicts"""
    if isinstance(value, Fraction):
        return format_rational(value)
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in value]
        return sorted(items, key=str) if isinstance(value, (set, frozenset)) else items
    return value


def canonical_json(value, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, rationals as strings, no floats"""
    return json.dumps(to_jsonable(value), indent=indent, sort_keys=True, ensure_ascii=False)


def write_json(value, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(value) + "\n", encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path


def gap_table(rows: Iterable[dict]) -> pd.DataFrame:
    """One row per instance; sa_<k> columns follow the fixed ones in level order"""
    rows = list(rows)
    levels: List[str] = sorted(
        {key for row in rows for key in row if key.startswith("sa_")},
        key=lambda key: int(key[3:]),
    )
    frame = pd.DataFrame(rows, columns=CSV_COLUMNS + levels)
    return frame.fillna("")


def write_gap_csv(rows: Iterable[dict], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = gap_table(rows)
    frame.to_csv(path, index=False)
    logger.info(f"✅ Gap table with {len(frame)} row(s) written to {path}")
    return path
