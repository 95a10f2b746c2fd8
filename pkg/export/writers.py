"""
Report Writers
==============
CSV and JSON writers shared by every pipeline stage.

CSV floats are written with '%.17g'; JSON floats keep their exact
round-trip repr. NaN and infinities become JSON null. Keys are sorted so
a fixed seed gives byte-identical files.
"""

import json
import os
from typing import Iterable, Mapping, Optional, Union

import numpy as np
import pandas as pd

from config import settings


def _json_ready(value):
    """Recursively convert numpy scalars and arrays to plain Python; non-finite floats to None."""
    if isinstance(value, Mapping):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_json_ready(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def write_json(payload: Mapping, path: str, quiet: bool = False) -> str:
    """
    Write a report dict as sorted, indented JSON.

    Args:
        payload: Report contents
        path: Output file path
        quiet: Skip the 'Exported:' line

    Returns:
        The path written
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    text = json.dumps(_json_ready(payload), indent=2, sort_keys=True, allow_nan=False)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(text + '\n')
    if not quiet:
        print(f"Exported: {path}")
    return path


def write_csv(rows: Union[pd.DataFrame, Iterable[Mapping]], path: str,
              columns: Optional[list] = None, quiet: bool = False) -> str:
    """
    Write rows (dicts or a DataFrame) to CSV with 17 significant digits.

    Args:
        rows: DataFrame or iterable of row dicts
        path: Output file path
        columns: Column order (default: first-seen order)
        quiet: Skip the 'Exported:' line

    Returns:
        The path written
    """
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=columns)
    if columns is not None and isinstance(rows, pd.DataFrame):
        frame = frame[columns]
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    frame.to_csv(path, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator='\n')
    if not quiet:
        print(f"Exported: {path}")
    return path


def points_frame(points: np.ndarray, labels: Optional[list] = None, **extra) -> pd.DataFrame:
    """
    Phase points as a DataFrame with columns x1..xn, xi1..xin (or `labels`).

    Extra keyword arrays become additional columns.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if labels is None:
        n = points.shape[1] // 2
        labels = ([f'x{k + 1}' for k in range(n)] + [f'xi{k + 1}' for k in range(n)]
                  if points.shape[1] % 2 == 0 else [f'c{k + 1}' for k in range(points.shape[1])])
    frame = pd.DataFrame(points, columns=labels)
    for name, column in extra.items():
        frame[name] = np.asarray(column)
    return frame


def read_json(path: str) -> dict:
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)
