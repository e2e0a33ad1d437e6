import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

BANNER = "https://www.CryptoDataDownload.com"
HEADER = "unix,date,symbol,open,high,low,close,Volume BTC,Volume USDT,tradecount"


def cdd_row(ts, o, h, l, c, bv=1.0, qv=None, ms=False):
    qv = bv * c if qv is None else qv
    unix = ts * 1000 if ms else ts
    return f"{unix},2019-01-01 00:00:00,BTC/USDT,{o},{h},{l},{c},{bv},{qv},10"


def cdd_text(rows, banner=True):
    lines = ([BANNER] if banner else []) + [HEADER] + list(rows)
    return "\n".join(lines) + "\n"


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


def gapless_series(closes, start=0, symbol="BTC/USDT"):
    """CandleSeries whose close path is ``closes`` (opens = previous close)."""
    from linlaw.market_data import CandleSeries

    closes = np.asarray(closes, dtype=float)
    opens = np.concatenate([[closes[0]], closes[:-1]])
    high = np.maximum(opens, closes) + 0.5
    low = np.minimum(opens, closes) - 0.5
    vals = np.column_stack([opens, high, low, closes, np.ones_like(closes), closes])
    ts = start + 60 * np.arange(len(closes))
    return CandleSeries(symbol, ts, vals)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
