"""Labeled instance windows, class balancing and the stratified split.

Each instance covers ``window_minutes`` consecutive bars: the first
``observe_minutes`` form the input matrix, and the label says whether the
close at the end of the window is above the close at the end of the
observation span.
"""

import struct
from dataclasses import dataclass

import numpy as np

from ._validation import as_generator, check_int
from .exceptions import BalancingError, DomainError, FormatError, SplitError, WindowIncompleteError
from .market_data import FEATURES, feature_matrix

CLOSE = FEATURES.index("close")


@dataclass(frozen=True)
class SamplingConfig:
    window_minutes: int = 840
    observe_minutes: int = 720
    horizon_minutes: int = 120
    test_ratio: float = 0.25
    seed: int = 12345

    def __post_init__(self):
        for name in ("window_minutes", "observe_minutes", "horizon_minutes"):
            check_int(getattr(self, name), name, min_value=1)
        if self.observe_minutes + self.horizon_minutes != self.window_minutes:
            raise DomainError("observe_minutes + horizon_minutes must equal window_minutes")
        if not 0.0 < self.test_ratio < 1.0:
            raise DomainError(f"test_ratio must be in (0, 1), got {self.test_ratio}")


@dataclass(frozen=True, eq=False)
class InstanceWindow:
    instance_id: int
    X: np.ndarray  # (k, m)
    label: int
    anchor_ts: int | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2:
            raise DomainError(f"instance X must be 2-D, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise DomainError(f"instance {self.instance_id} has non-finite values")
        if self.label not in (0, 1):
            raise DomainError(f"label must be 0 or 1, got {self.label!r}")
        object.__setattr__(self, "X", X)

    def __eq__(self, other):
        if not isinstance(other, InstanceWindow):
            return NotImplemented
        return (
            self.instance_id == other.instance_id
            and self.label == other.label
            and self.anchor_ts == other.anchor_ts
            and np.array_equal(self.X, other.X)
        )


@dataclass(frozen=True)
class SplitIndex:
    train_ids: list
    test_ids: list


def stack_instances(instances):
    """Return ``(X, y, ids)`` with ``X`` shaped ``(n, k, m)``."""
    if not instances:
        raise DomainError("no instances")
    X = np.stack([inst.X for inst in instances])
    y = np.array([inst.label for inst in instances], dtype=np.int64)
    ids = np.array([inst.instance_id for inst in instances], dtype=np.int64)
    return X, y, ids


def make_instances(series, cfg=SamplingConfig()):
    """Tile ``series`` into nonoverlapping labeled windows.

    Windows are anchored at ``t0 + b * window`` for block index ``b``, which
    is also used as the instance id. Windows with any missing bar, and windows
    whose two reference closes are equal, are skipped.
    """
    if len(series) == 0:
        return []
    step = series.interval_s
    span = cfg.window_minutes * step
    t0 = int(series.timestamps[0])
    last = int(series.timestamps[-1])
    out = []
    b = 0
    while t0 + b * span + span - step <= last:
        anchor = t0 + b * span
        try:
            block = feature_matrix(series, anchor, cfg.window_minutes)
        except WindowIncompleteError:
            b += 1
            continue
        obs_close = block[cfg.observe_minutes - 1, CLOSE]
        end_close = block[-1, CLOSE]
        if end_close != obs_close:
            label = int(end_close > obs_close)
            out.append(InstanceWindow(b, block[: cfg.observe_minutes], label, anchor))
        b += 1
    return out


def balance_classes(instances, seed):
    """Down-sample the majority class uniformly to the minority count.

    Surviving instances keep their relative order.
    """
    labels = np.array([inst.label for inst in instances], dtype=np.int64)
    idx0 = np.flatnonzero(labels == 0)
    idx1 = np.flatnonzero(labels == 1)
    if len(idx0) == 0 or len(idx1) == 0:
        raise BalancingError("both classes need at least one instance")
    if len(idx0) == len(idx1):
        return list(instances)
    major, minor = (idx0, idx1) if len(idx0) > len(idx1) else (idx1, idx0)
    rng = as_generator(seed, "balance")
    keep = rng.choice(major, size=len(minor), replace=False)
    kept = np.sort(np.concatenate([minor, keep]))
    return [instances[i] for i in kept]


def split_train_test(instances, cfg=SamplingConfig()):
    """Stratified, seeded train/test split of instance ids."""
    labels = np.array([inst.label for inst in instances], dtype=np.int64)
    ids = np.array([inst.instance_id for inst in instances], dtype=np.int64)
    n = len(instances)
    counts = [int(np.sum(labels == c)) for c in (0, 1)]
    if min(counts) < 2:
        raise SplitError(f"each class needs at least 2 instances, got {counts}")
    n_test = int(np.floor(cfg.test_ratio * n + 0.5))
    test0 = int(np.floor(n_test * counts[0] / n + 0.5))
    per_class_test = [test0, n_test - test0]
    for c in (0, 1):
        if not 1 <= per_class_test[c] <= counts[c] - 1:
            raise SplitError(
                f"class {c}: {per_class_test[c]} test of {counts[c]} leaves an empty side"
            )
    rng = as_generator(cfg.seed, "split")
    train, test = [], []
    for c in (0, 1):
        members = ids[labels == c]
        members = members[rng.permutation(len(members))]
        test.extend(members[: per_class_test[c]].tolist())
        train.extend(members[per_class_test[c] :].tolist())
    return SplitIndex(sorted(train), sorted(test))


def select(instances, ids):
    wanted = set(ids)
    return [inst for inst in instances if inst.instance_id in wanted]


# Instance cache layout (little-endian):
#   magic b"LLTW1", then uint32 k, uint32 m, uint32 n
#   per instance: k*m float64 (row-major X), then one uint8 label
_WIN_MAGIC = b"LLTW1"
_WIN_HEADER = struct.Struct("<5sIII")


def dump_instances(instances):
    if instances:
        k, m = instances[0].X.shape
    else:
        k = m = 0
    parts = [_WIN_HEADER.pack(_WIN_MAGIC, k, m, len(instances))]
    for inst in instances:
        if inst.X.shape != (k, m):
            raise DomainError("all instances must share the same (k, m)")
        parts.append(inst.X.astype("<f8").tobytes(order="C"))
        parts.append(bytes([inst.label]))
    return b"".join(parts)


def load_instances(data):
    """Inverse of :func:`dump_instances`; ids are positions, anchors unknown."""
    if len(data) < _WIN_HEADER.size:
        raise FormatError("truncated instance cache header")
    magic, k, m, n = _WIN_HEADER.unpack_from(data)
    if magic != _WIN_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    rec = 8 * k * m + 1
    if len(data) != _WIN_HEADER.size + n * rec:
        raise FormatError("instance cache size does not match header")
    out = []
    off = _WIN_HEADER.size
    for i in range(n):
        X = np.frombuffer(data, dtype="<f8", count=k * m, offset=off).reshape(k, m)
        label = data[off + 8 * k * m]
        out.append(InstanceWindow(i, X.astype(np.float64), int(label)))
        off += rec
    return out
