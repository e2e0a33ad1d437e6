"""Linear law-based feature space transformation.

A series is delay-embedded into a matrix ``A`` whose rows are length-``l``
windows taken every ``lag`` samples. The eigenvector of the smallest
eigenvalue of ``S = A.T @ A`` is the series' linear law: the coefficients of
the linear recurrence the windows satisfy most closely.

Laws are extracted from every training instance and feature and grouped by
class into a :class:`LawBank`. A test instance is transformed by multiplying
its own ``S`` matrices with the banked laws and keeping, for each feature and
class, the product column with the smallest spread.
"""

import csv
import io
import struct
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_finite_array, check_int, check_is_fitted
from .exceptions import DomainError, FormatError
from .linalg_small import SIGN_TOL, eigen_sym_batch, gram, mat_mul
from .windowing import InstanceWindow, stack_instances

CLASSES = (0, 1)
SELECT_RULES = ("var", "mean")


@dataclass(frozen=True)
class EmbeddingConfig:
    l: int = 10
    lag: int = 11

    def __post_init__(self):
        check_int(self.l, "l", min_value=2)
        check_int(self.lag, "lag", min_value=1)

    def n_rows(self, k):
        return (k - self.l) // self.lag + 1

    def check_length(self, k):
        if self.l >= k or self.n_rows(k) < 2:
            raise DomainError(
                f"series of length {k} is too short for l={self.l}, lag={self.lag} "
                f"(need at least {self.l + self.lag} samples)"
            )


@dataclass(frozen=True, eq=False)
class LinearLaw:
    feature_j: int
    class_c: int
    source_instance: int
    v: np.ndarray
    residual: float


def _embed(x, cfg):
    # x: (..., k) -> (..., r, l)
    k = x.shape[-1]
    cfg.check_length(k)
    starts = cfg.lag * np.arange(cfg.n_rows(k))
    return x[..., starts[:, None] + np.arange(cfg.l)[None, :]]


def embed(x, cfg=EmbeddingConfig()):
    """Time-delay embedding of a 1-D series.

    Row ``i`` holds ``x[i*lag : i*lag + l]``; trailing samples that do not
    fill a whole row are dropped.

    >>> embed([1, 2, 3, 4, 5, 6], EmbeddingConfig(l=2, lag=2)).tolist()
    [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]
    """
    x = check_finite_array(x, "x", ndim=1)
    return _embed(x, cfg)


def extract_law(x, cfg=EmbeddingConfig(), feature_j=0, class_c=0, source_instance=0):
    S = gram(embed(x, cfg))
    vals, vecs = eigen_sym_batch(S[None])
    return LinearLaw(feature_j, class_c, source_instance, vecs[0, :, 0], float(vals[0, 0]))


@dataclass(frozen=True, eq=False)
class LawBank:
    """Training laws grouped per feature and class.

    ``laws[j][c]`` is an ``(l, n_c)`` matrix whose columns are the laws of
    feature ``j`` from the class-``c`` training instances, ordered by
    ascending ``sources[c]``.
    """

    l: int
    lag: int
    m: int
    laws: list  # laws[j][c] -> (l, n_c)
    residuals: list  # residuals[j][c] -> (n_c,)
    sources: list  # sources[c] -> (n_c,) instance ids
    classes: tuple = CLASSES

    def __post_init__(self):
        if len(self.laws) != self.m:
            raise DomainError("law bank must hold one entry per feature")
        for c, src in enumerate(self.sources):
            for j in range(self.m):
                V = self.laws[j][c]
                if V.shape != (self.l, len(src)):
                    raise DomainError(f"law matrix ({j}, {c}) has shape {V.shape}")

    @property
    def counts(self):
        return [len(s) for s in self.sources]

    @property
    def n_classes(self):
        return len(self.classes)

    def matrix(self, j):
        """All laws of feature ``j``, class blocks side by side."""
        return np.concatenate([self.laws[j][c] for c in range(self.n_classes)], axis=1)

    def iter_laws(self):
        for j in range(self.m):
            for c in range(self.n_classes):
                for col, src in enumerate(self.sources[c]):
                    yield LinearLaw(
                        j, self.classes[c], int(src), self.laws[j][c][:, col],
                        float(self.residuals[j][c][col]),
                    )

    def __eq__(self, other):
        if not isinstance(other, LawBank):
            return NotImplemented
        return dump_law_bank(self) == dump_law_bank(other)


def _laws_from_array(X, cfg):
    # X: (n, k, m) -> laws (n, m, l), residuals (n, m)
    n, k, m = X.shape
    A = _embed(np.transpose(X, (0, 2, 1)), cfg)  # (n, m, r, l)
    S = gram(A).reshape(n * m, cfg.l, cfg.l)
    vals, vecs = eigen_sym_batch(S)
    return vecs[:, :, 0].reshape(n, m, cfg.l), vals[:, 0].reshape(n, m)


def build_law_bank(train, cfg=EmbeddingConfig()):
    """Extract one law per training instance and feature."""
    if not train:
        raise DomainError("training set is empty")
    train = sorted(train, key=lambda inst: inst.instance_id)
    X, y, ids = stack_instances(train)
    if set(np.unique(y)) != set(CLASSES):
        raise DomainError("training set must contain both classes")
    laws, res = _laws_from_array(X, cfg)
    m = X.shape[2]
    bank_laws = [[laws[y == c, j, :].T.copy() for c in CLASSES] for j in range(m)]
    bank_res = [[res[y == c, j].copy() for c in CLASSES] for j in range(m)]
    sources = [ids[y == c] for c in CLASSES]
    return LawBank(cfg.l, cfg.lag, m, bank_laws, bank_res, sources)


def _column_stat(P, select):
    # statistic over the l entries of every column, fixed summation order
    l = P.shape[-2]
    total = np.zeros(P.shape[:-2] + P.shape[-1:])
    for i in range(l):
        total += P[..., i, :]
    mean = total / l
    if select == "mean":
        return np.abs(mean)
    sq = np.zeros_like(total)
    for i in range(l):
        d = P[..., i, :] - mean
        sq += d * d
    return sq / (l - 1)


def _transform_array(X, bank, select):
    # X: (n, k, m) -> (n, l, m * c)
    if select not in SELECT_RULES:
        raise DomainError(f"select must be one of {SELECT_RULES}, got {select!r}")
    n, k, m = X.shape
    if m != bank.m:
        raise DomainError(f"instances have {m} features, law bank has {bank.m}")
    cfg = EmbeddingConfig(bank.l, bank.lag)
    S = gram(_embed(np.transpose(X, (0, 2, 1)), cfg))  # (n, m, l, l)
    c_count = bank.n_classes
    out = np.empty((n, bank.l, m * c_count))
    rows = np.arange(n)
    for j in range(m):
        P = mat_mul(S[:, j], bank.matrix(j))  # (n, l, p)
        stat = _column_stat(P, select)
        start = 0
        for c in range(c_count):
            width = bank.counts[c]
            # argmin returns the first minimum: lowest source column wins ties
            pick = start + np.argmin(stat[:, start : start + width], axis=1)
            out[:, :, j * c_count + c] = P[rows, :, pick]
            start += width
    return out


def transform_instance(test, bank, select="var"):
    """``(l, m*c)`` transformed block of one test instance.

    Column ``j*c + c_idx`` is the selected product column for feature ``j``
    and class ``c_idx``.
    """
    X = test.X if isinstance(test, InstanceWindow) else check_finite_array(test, "X", ndim=2)
    return _transform_array(X[None], bank, select)[0]


@dataclass(frozen=True, eq=False)
class TransformedDataset:
    """Row-per-(instance, embedding row) table produced by the transform."""

    instance_id: np.ndarray
    row_index: np.ndarray
    features: np.ndarray
    label: np.ndarray

    @property
    def shape(self):
        """``(rows, features + 1)``, counting the label column."""
        return (self.features.shape[0], self.features.shape[1] + 1)

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        n_feat = self.features.shape[1]
        writer.writerow(["instance_id", "row_index"] + [f"f{i}" for i in range(n_feat)] + ["label"])
        for gid, r, feats, lab in zip(self.instance_id, self.row_index, self.features, self.label):
            writer.writerow([int(gid), int(r)] + [repr(float(v)) for v in feats] + [int(lab)])
        return out.getvalue()

    @classmethod
    def from_csv(cls, text):
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or header[:2] != ["instance_id", "row_index"] or header[-1] != "label":
            raise FormatError("transformed CSV needs instance_id,row_index,f...,label header")
        rows = [r for r in reader if r]
        if not rows:
            raise FormatError("transformed CSV has no rows")
        try:
            arr = np.array(rows, dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"non-numeric value in transformed CSV: {exc}") from None
        return cls(
            arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2:-1],
            arr[:, -1].astype(np.int64),
        )


def transform_set(test, bank, select="var"):
    X, y, ids = stack_instances(test)
    blocks = _transform_array(X, bank, select)
    n, l, d = blocks.shape
    return TransformedDataset(
        np.repeat(ids, l), np.tile(np.arange(l), n), blocks.reshape(n * l, d), np.repeat(y, l)
    )


# Law bank layout (little-endian):
#   magic b"LLTB1", uint32 l, lag, m, c, then c x uint32 per-class counts
#   index table, one record per law in (feature, class, column) order:
#       uint32 feature, uint32 class, int64 source_instance, float64 residual
#   law block, same order: l x float64 per law
_BANK_MAGIC = b"LLTB1"
_BANK_HEADER = struct.Struct("<5sIIII")
_BANK_INDEX = struct.Struct("<IIqd")


def dump_law_bank(bank):
    parts = [_BANK_HEADER.pack(_BANK_MAGIC, bank.l, bank.lag, bank.m, bank.n_classes)]
    parts.append(struct.pack(f"<{bank.n_classes}I", *bank.counts))
    vectors = []
    for j in range(bank.m):
        for c in range(bank.n_classes):
            for col, src in enumerate(bank.sources[c]):
                parts.append(_BANK_INDEX.pack(j, c, int(src), float(bank.residuals[j][c][col])))
                vectors.append(bank.laws[j][c][:, col])
    if vectors:
        parts.append(np.asarray(vectors, dtype="<f8").tobytes())
    return b"".join(parts)


def load_law_bank(data):
    if len(data) < _BANK_HEADER.size:
        raise FormatError("truncated law bank header")
    magic, l, lag, m, c = _BANK_HEADER.unpack_from(data)
    if magic != _BANK_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    off = _BANK_HEADER.size
    counts = struct.unpack_from(f"<{c}I", data, off)
    off += 4 * c
    n_laws = m * sum(counts)
    expected = off + n_laws * (_BANK_INDEX.size + 8 * l)
    if len(data) != expected:
        raise FormatError("law bank size does not match header")
    index = [_BANK_INDEX.unpack_from(data, off + i * _BANK_INDEX.size) for i in range(n_laws)]
    off += n_laws * _BANK_INDEX.size
    vecs = np.frombuffer(data, dtype="<f8", count=n_laws * l, offset=off).reshape(n_laws, l)
    laws, residuals = [], []
    pos = 0
    sources = [np.array([rec[2] for rec in index[sum(counts[:cc]) : sum(counts[: cc + 1])]],
                        dtype=np.int64) for cc in range(c)]
    for j in range(m):
        laws.append([])
        residuals.append([])
        for cc in range(c):
            recs = index[pos : pos + counts[cc]]
            if any(r[0] != j or r[1] != cc for r in recs):
                raise FormatError("law bank index table is out of order")
            laws[j].append(vecs[pos : pos + counts[cc]].T.astype(np.float64))
            residuals[j].append(np.array([r[3] for r in recs]))
            pos += counts[cc]
    return LawBank(l, lag, m, laws, residuals, sources, tuple(range(c)))


class LinearLawTransformer(TransformerMixin, BaseEstimator):
    """Scikit-learn style wrapper around the law bank and transform.

    Parameters
    ----------
    dim : int, default=10
        Embedding order ``l``.
    lag : int, default=11
        Row stride of the delay embedding.
    select : {"var", "mean"}, default="var"
        Column selection rule: smallest sample variance or smallest absolute
        mean of the ``l`` entries.

    ``fit`` takes ``X`` of shape ``(n_instances, k, m)`` and binary ``y``;
    ``transform`` returns ``(n_instances * dim, m * 2)`` rows, ``dim``
    consecutive rows per instance.
    """

    def __init__(self, dim=10, lag=11, select="var"):
        self.dim = dim
        self.lag = lag
        self.select = select

    def fit(self, X, y, instance_ids=None):
        X = check_finite_array(X, "X", ndim=3)
        y = np.asarray(y)
        if instance_ids is None:
            instance_ids = np.arange(len(X))
        train = [InstanceWindow(int(i), x, int(c)) for i, x, c in zip(instance_ids, X, y)]
        self.bank_ = build_law_bank(train, EmbeddingConfig(self.dim, self.lag))
        self.n_features_in_ = X.shape[2]
        return self

    def transform(self, X):
        check_is_fitted(self, "bank_")
        X = check_finite_array(X, "X", ndim=3)
        blocks = _transform_array(X, self.bank_, self.select)
        n, l, d = blocks.shape
        return blocks.reshape(n * l, d)

    def groups(self, n_instances):
        """Instance index of every row produced by :meth:`transform`."""
        return np.repeat(np.arange(n_instances), self.dim)
