"""CSV ingestion for the real-data commands."""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .exceptions import DataError

logger = logging.getLogger(__name__)


@dataclass
class LoadedSamples:
    """Samples ready for the test engine, with their display labels."""

    labels: List[str]
    samples: List[np.ndarray]
    columns: List[str]


def _read_frame(path: Path, header: bool) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            path,
            header=0 if header else None,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            skip_blank_lines=True,
        )
    except FileNotFoundError:
        raise DataError(f'{path}: file not found')
    except pd.errors.EmptyDataError:
        raise DataError(f'{path}: file is empty')
    except pd.errors.ParserError as exc:
        # pandas names the offending line, e.g. "Expected 2 fields in line 3, saw 3"
        raise DataError(f'{path}: {str(exc).strip()}')
    except UnicodeDecodeError as exc:
        raise DataError(f'{path}: not a UTF-8 text file ({exc.reason})')

    if not header:
        frame.columns = [f'V{position}' for position in range(1, frame.shape[1] + 1)]
    return frame


def _line_number(row: int, header: bool) -> int:
    return row + (2 if header else 1)


def _check_ragged(frame: pd.DataFrame, path: Path, header: bool) -> None:
    missing = frame.isna().to_numpy()
    if missing.any():
        row = int(np.argmax(missing.any(axis=1)))
        present = int((~missing[row]).sum())
        raise DataError(
            f'{path}: line {_line_number(row, header)}: expected {frame.shape[1]} fields, saw {present}'
        )


def _numeric(frame: pd.DataFrame, path: Path, header: bool) -> np.ndarray:
    columns = {}
    for name in frame.columns:
        values = pd.to_numeric(frame[name].str.strip(), errors='coerce')
        bad = values.isna().to_numpy()
        if bad.any():
            row = int(np.argmax(bad))
            raise DataError(
                f'{path}: line {_line_number(row, header)}, column {name}: '
                f'{frame[name].iloc[row]!r} is not numeric'
            )
        columns[name] = values.to_numpy(dtype=float)
    return np.column_stack([columns[name] for name in frame.columns])


def _resolve_column(frame: pd.DataFrame, column: Union[str, int], path: Path) -> str:
    """Column by header name, or by 1-based position."""
    if str(column) in frame.columns:
        return str(column)
    try:
        position = int(column)
    except (TypeError, ValueError):
        raise DataError(f"{path}: no column named {column!r}")
    if not 1 <= position <= frame.shape[1]:
        raise DataError(f'{path}: column position {position} outside 1..{frame.shape[1]}')
    return frame.columns[position - 1]


def load_csv(
    path: Union[str, Path],
    header: bool = True,
    group_col: Optional[Union[str, int]] = None,
    columns: Optional[Sequence[Union[str, int]]] = None,
) -> Union[np.ndarray, Dict[str, np.ndarray]]:
    """
    Read a comma-separated file of observations.

    Args:
        path: CSV file, one observation per line
        header: Whether the first line holds column names
        group_col: Column (name or 1-based position) splitting the rows into
            populations; groups keep their order of first appearance
        columns: Numeric columns to keep (default: all but the group column)

    Returns:
        np.ndarray: n x p matrix when group_col is None, otherwise a dict of
            label -> matrix

    Raises:
        DataError: On missing or malformed files, ragged rows or non-numeric
            cells; the message names the line and column
    """
    path = Path(path)
    frame = _read_frame(path, header)
    _check_ragged(frame, path, header)

    group_name = _resolve_column(frame, group_col, path) if group_col is not None else None
    if columns:
        keep = [_resolve_column(frame, column, path) for column in columns]
    else:
        keep = [name for name in frame.columns if name != group_name]
    if len(keep) < 2:
        raise DataError(f'{path}: need at least two numeric columns, got {len(keep)}')

    data = _numeric(frame[keep], path, header)
    if group_name is None:
        logger.debug(f'Loaded {path}: {data.shape[0]} rows x {data.shape[1]} columns')
        return data

    groups = frame[group_name].str.strip().to_numpy()
    samples = {str(label): data[groups == label] for label in dict.fromkeys(groups)}
    logger.debug(f"Loaded {path}: groups {', '.join(f'{k}={len(v)}' for k, v in samples.items())}")
    return samples


def load_samples(
    paths: Sequence[Union[str, Path]],
    header: bool = True,
    group_col: Optional[Union[str, int]] = None,
    columns: Optional[Sequence[Union[str, int]]] = None,
) -> LoadedSamples:
    """
    Samples from one grouped file or from one file per population.

    Raises:
        DataError: If neither a group column nor several files are given
    """
    if group_col is not None:
        if len(paths) != 1:
            raise DataError('A group column splits exactly one file; got several files')
        groups = load_csv(paths[0], header=header, group_col=group_col, columns=columns)
        names = _column_names(paths[0], header, group_col, columns)
        return LoadedSamples(labels=list(groups), samples=list(groups.values()), columns=names)

    samples = [load_csv(path, header=header, columns=columns) for path in paths]
    labels = [Path(path).stem for path in paths]
    return LoadedSamples(labels=labels, samples=samples, columns=_column_names(paths[0], header, None, columns))


def _column_names(path, header: bool, group_col, columns) -> List[str]:
    frame = _read_frame(Path(path), header).head(0)
    group_name = _resolve_column(frame, group_col, Path(path)) if group_col is not None else None
    if columns:
        return [_resolve_column(frame, column, Path(path)) for column in columns]
    return [name for name in frame.columns if name != group_name]
