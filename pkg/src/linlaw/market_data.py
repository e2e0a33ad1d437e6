"""Candle CSV ingestion and continuity audit.

Reads the CryptoDataDownload export layout (an optional banner line, then a
header row) into an ascending, de-duplicated series of 1-minute bars.
"""

import csv
import gzip
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import EmptyInputError, ParseError, WindowIncompleteError

INTERVAL_S = 60
FEATURES = ("open", "high", "low", "close", "base_volume", "quote_volume")
MS_THRESHOLD = 10**12
MAX_REJECT_FRACTION = 0.01

_TS_ALIASES = ("unix", "time", "timestamp")
_QUOTE_ALIASES = ("volume usdt", "volume_quote", "quote_volume")


@dataclass(frozen=True)
class Candle:
    timestamp: int
    open: float
    high: float
    low: float
    close: float
    base_volume: float
    quote_volume: float

    def is_valid(self):
        prices = (self.open, self.high, self.low, self.close)
        if not all(math.isfinite(p) and p > 0 for p in prices):
            return False
        vols = (self.base_volume, self.quote_volume)
        if not all(math.isfinite(v) and v >= 0 for v in vols):
            return False
        return self.low <= min(self.open, self.close) and self.high >= max(self.open, self.close)

    def features(self):
        return tuple(getattr(self, f) for f in FEATURES)


@dataclass(frozen=True, eq=False)
class CandleSeries:
    """Ascending 1-minute bars stored column-wise.

    ``timestamps`` is an int64 vector; ``values`` is ``(n, 6)`` in the fixed
    column order of ``FEATURES``.
    """

    symbol: str
    timestamps: np.ndarray
    values: np.ndarray
    interval_s: int = INTERVAL_S
    rejected_rows: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.interval_s != INTERVAL_S:
            raise ParseError(f"interval must be {INTERVAL_S}s, got {self.interval_s}")
        ts = np.asarray(self.timestamps, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64).reshape(len(ts), len(FEATURES))
        if len(ts) > 1 and np.any(np.diff(ts) <= 0):
            raise ParseError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_candles(cls, symbol, candles, **kwargs):
        ts = np.array([c.timestamp for c in candles], dtype=np.int64)
        vals = np.array([c.features() for c in candles], dtype=np.float64).reshape(-1, 6)
        return cls(symbol, ts, vals, **kwargs)

    def __len__(self):
        return len(self.timestamps)

    def __eq__(self, other):
        if not isinstance(other, CandleSeries):
            return NotImplemented
        return (
            self.symbol == other.symbol
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values)
        )

    @property
    def candles(self):
        return [
            Candle(int(t), *map(float, row)) for t, row in zip(self.timestamps, self.values)
        ]

    @property
    def close(self):
        return self.values[:, FEATURES.index("close")]


@dataclass(frozen=True)
class GapReport:
    gaps: list  # (start_ts, end_ts, missing_count), first/last missing bar
    total_missing: int
    coverage_fraction: float


def _norm(name):
    return name.strip().lower()


def _locate_columns(header, symbol):
    names = [_norm(h) for h in header]

    def find(aliases):
        for alias in aliases:
            if alias in names:
                return names.index(alias)
        return None

    cols = {"timestamp": find(_TS_ALIASES)}
    for price in ("open", "high", "low", "close"):
        cols[price] = find((price,))
    cols["quote_volume"] = find(_QUOTE_ALIASES)

    base = None
    base_asset = symbol.replace("-", "/").split("/")[0].lower() if symbol else ""
    candidates = [f"volume {base_asset}"] if base_asset else []
    candidates += ["volume", "base_volume", "volume_base"]
    base = find(candidates)
    if base is None:
        # any "volume <X>" column that is not the quote column
        for i, n in enumerate(names):
            if n.startswith("volume ") and i != cols["quote_volume"]:
                base = i
                break
    cols["base_volume"] = base
    missing = [k for k, v in cols.items() if v is None]
    return cols, missing


def _looks_like_header(row):
    names = {_norm(c) for c in row}
    return bool(names & set(_TS_ALIASES)) and "close" in names


def parse_candle_csv(stream, symbol=""):
    """Parse a candle CSV export into a :class:`CandleSeries`.

    ``stream`` is a text stream or a string holding the file contents.
    Rows breaking the OHLC invariants are dropped and counted in
    ``rejected_rows``; more than 1% rejected rows is an error. Millisecond
    timestamps are converted to seconds, and a repeated timestamp keeps its
    first occurrence.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)

    header = None
    header_line = 0
    for line_no, row in enumerate(reader, start=1):
        if not row or not any(c.strip() for c in row):
            continue
        if _looks_like_header(row):
            header, header_line = row, line_no
            break
        if line_no > 1:
            raise ParseError("no header row with unix/time and close columns", line_no)
    if header is None:
        raise EmptyInputError("no header row found")

    cols, missing = _locate_columns(header, symbol)
    if missing:
        raise ParseError(f"missing columns: {', '.join(missing)}", header_line)

    seen = {}
    n_rows = 0
    rejected = 0
    for line_no, row in enumerate(reader, start=header_line + 1):
        if not row or not any(c.strip() for c in row):
            continue
        n_rows += 1
        try:
            raw_ts = float(row[cols["timestamp"]])
            nums = [float(row[cols[f]]) for f in FEATURES]
        except (ValueError, IndexError) as exc:
            raise ParseError(f"malformed row: {exc}", line_no) from None
        if not math.isfinite(raw_ts):
            raise ParseError("non-finite timestamp", line_no)
        ts = int(raw_ts)
        if ts >= MS_THRESHOLD:
            ts //= 1000
        candle = Candle(ts, *nums)
        if not candle.is_valid():
            rejected += 1
            continue
        seen.setdefault(ts, candle)

    if n_rows == 0:
        raise EmptyInputError("no data rows after header")
    if rejected > MAX_REJECT_FRACTION * n_rows:
        raise ParseError(
            f"{rejected} of {n_rows} rows violate OHLC invariants (limit {MAX_REJECT_FRACTION:.0%})"
        )
    candles = [seen[t] for t in sorted(seen)]
    return CandleSeries.from_candles(symbol, candles, rejected_rows=rejected)


def read_candle_csv(path, symbol=""):
    """Open ``path`` (plain or ``.gz``) and parse it."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8", newline="") as fh:
        return parse_candle_csv(fh, symbol)


def serialize_candle_csv(series):
    """Write ``series`` in the export layout accepted by :func:`parse_candle_csv`."""
    base = series.symbol.replace("-", "/").split("/")[0] or "BASE"
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["unix", "open", "high", "low", "close", f"Volume {base}", "Volume USDT"])
    for t, row in zip(series.timestamps, series.values):
        writer.writerow([int(t)] + [repr(float(v)) for v in row])
    return out.getvalue()


def audit_continuity(series):
    ts = series.timestamps
    if len(ts) == 0:
        return GapReport([], 0, 1.0)
    gaps = []
    steps = np.diff(ts) // series.interval_s
    for i in np.flatnonzero(steps > 1):
        missing = int(steps[i]) - 1
        start = int(ts[i]) + series.interval_s
        gaps.append((start, start + (missing - 1) * series.interval_s, missing))
    total = sum(g[2] for g in gaps)
    present = len(ts)
    return GapReport(gaps, total, present / (present + total))


def feature_matrix(series, start_ts, count):
    """``(count, 6)`` block of consecutive bars starting at ``start_ts``.

    Raises :class:`WindowIncompleteError` if any minute in the span is missing.
    """
    ts = series.timestamps
    i = int(np.searchsorted(ts, start_ts))
    if count < 1 or i + count > len(ts):
        raise WindowIncompleteError(f"span of {count} bars from {start_ts} is not covered")
    expected = start_ts + series.interval_s * np.arange(count, dtype=np.int64)
    if not np.array_equal(ts[i : i + count], expected):
        raise WindowIncompleteError(f"span of {count} bars from {start_ts} has gaps")
    return series.values[i : i + count].copy()
