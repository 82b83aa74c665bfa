"""
Time Series Ingestion
Validated (t, y) series and the canonical `t,value` CSV format
"""
import hashlib
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

import numpy as np
import pandas as pd

from core.errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

HEADER = ('t', 'value')

# decimal point only; no thousands separators, underscores or hex
_NUMBER = re.compile(r'^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$')
_NON_FINITE = {'nan', '+nan', '-nan', 'inf', '+inf', '-inf', 'infinity', '+infinity', '-infinity'}


@dataclass(frozen=True)
class TimeSeries:
    """An immutable observed series, strictly increasing in t"""

    name: str
    t_unit: str
    y_unit: str
    points: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        points = tuple((float(t), float(y)) for t, y in self.points)
        object.__setattr__(self, 'points', points)
        if len(points) < 2:
            raise ValidationError('at least 2 points', f"{self.name} has {len(points)} point(s)")
        for i, (t, y) in enumerate(points):
            if not (math.isfinite(t) and math.isfinite(y)):
                raise ValidationError('all values finite', f"{self.name} point {i} is ({t}, {y})")
        for i in range(1, len(points)):
            if not points[i][0] > points[i - 1][0]:
                raise ValidationError(
                    'strictly increasing t',
                    f"{self.name} has t={points[i][0]} after t={points[i - 1][0]}",
                )

    @property
    def t(self) -> np.ndarray:
        return np.array([p[0] for p in self.points], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.points], dtype=float)

    def __len__(self) -> int:
        return len(self.points)

    def to_csv_text(self) -> str:
        return to_csv_text(self.points)

    def digest(self) -> str:
        """SHA-256 of the canonical CSV serialization"""
        return hashlib.sha256(self.to_csv_text().encode('utf-8')).hexdigest()


def format_number(value: float) -> str:
    """Shortest text that parses back to the same float"""
    value = float(value)
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def to_csv_text(rows: Iterable[Tuple[float, float]]) -> str:
    lines = [','.join(HEADER)]
    lines.extend(f"{format_number(t)},{format_number(y)}" for t, y in rows)
    return '\n'.join(lines) + '\n'


def _parse_number(token, line: int, column: str) -> float:
    if not isinstance(token, str):
        raise ParseError(f"missing {column} field", line=line)
    text = token.strip()
    if text.lower() in _NON_FINITE:
        raise ValidationError('all values finite', f"line {line}: {column}={text}")
    if not _NUMBER.match(text):
        raise ParseError(f"cannot parse {column} value {token!r}", line=line)
    return float(text)


def load_csv(
    path: Union[str, Path],
    name: Optional[str] = None,
    t_unit: str = '',
    y_unit: str = '',
    t_origin: float = 0.0,
) -> TimeSeries:
    """
    Read a `t,value` CSV file into a validated TimeSeries.

    t_origin is subtracted from every t (calendar-year series use it to put
    t = 0 at the first observation).
    """
    path = Path(path)
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding='utf-8',
        )
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty", line=1) from None
    except pd.errors.ParserError as e:
        raise ParseError(str(e).strip()) from None
    except UnicodeDecodeError as e:
        raise ParseError(f"not UTF-8 text: {e}") from None

    header = tuple(str(c).strip() for c in frame.columns)
    if header != HEADER:
        raise ParseError(f"header must be exactly 't,value', got {','.join(header)!r}", line=1)

    points = []
    for idx, (t_token, y_token) in enumerate(frame.itertuples(index=False, name=None)):
        line = idx + 2
        t = _parse_number(t_token, line, 't')
        y = _parse_number(y_token, line, 'value')
        points.append((t - t_origin, y))

    series = TimeSeries(name=name or path.stem, t_unit=t_unit, y_unit=y_unit, points=tuple(points))
    logger.info("loaded %s: %d points from %s", series.name, len(series), path)
    return series


def save_csv(series: TimeSeries, path: Union[str, Path]) -> Path:
    """Write series in the canonical format; load_csv reproduces the same points"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(series.to_csv_text(), encoding='utf-8')
    return path
