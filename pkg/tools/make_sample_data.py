"""Regenerate src/linlaw/data/sample_BTCUSDT_1m.csv.gz.

The bundled file is a seeded geometric random walk laid out like a
CryptoDataDownload Binance export (banner line, newest bar first, millisecond
timestamps). It is demo data for the CLI, not market data.
"""

import gzip
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

START = 1546300800  # 2019-01-01 00:00 UTC
MINUTES = 60 * 24 * 60
GAPS = [(5000, 3), (21000, 1)]  # (minute offset, missing bars)


def main(out):
    rng = np.random.default_rng(12345)
    logret = 0.0008 * rng.standard_normal(MINUTES)
    close = 3700.0 * np.exp(np.cumsum(logret))
    open_ = np.concatenate([[3700.0], close[:-1]])
    spread = np.abs(0.0004 * rng.standard_normal((2, MINUTES)))
    high = np.maximum(open_, close) * (1 + spread[0])
    low = np.minimum(open_, close) * (1 - spread[1])
    base_vol = rng.gamma(2.0, 5.0, MINUTES)
    drop = set()
    for start, n in GAPS:
        drop.update(range(start, start + n))

    lines = ["https://www.CryptoDataDownload.com",
             "unix,date,symbol,open,high,low,close,Volume BTC,Volume USDT,tradecount"]
    for i in reversed(range(MINUTES)):
        if i in drop:
            continue
        ts = START + 60 * i
        date = datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%d %H:%M:%S")
        o, h, l, c = (round(v, 2) for v in (open_[i], high[i], low[i], close[i]))
        bv = round(base_vol[i], 5)
        lines.append(f"{ts * 1000},{date},BTC/USDT,{o},{h},{l},{c},{bv},{round(bv * c, 2)},"
                     f"{int(bv * 40)}")
    with gzip.open(out, "wt", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else
         Path(__file__).resolve().parents[1] / "src/linlaw/data/sample_BTCUSDT_1m.csv.gz")
