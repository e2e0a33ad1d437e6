"""Grouped cross-validation and seeded random-search tuning."""

import time
from dataclasses import dataclass, field

import numpy as np

from .._validation import check_binary_labels, check_finite_array, check_int, substream
from ..exceptions import DomainError
from .ensemble import BaggedTrees
from .knn import KNeighborsVote
from .svm import LinearSVM
from .tree import CartTree

KINDS = ("ensemble", "knn", "tree", "svm_linear")
ESTIMATORS = {
    "knn": KNeighborsVote,
    "tree": CartTree,
    "svm_linear": LinearSVM,
    "ensemble": BaggedTrees,
}
DEFAULT_PARAMS = {
    "knn": {"k": 5, "weighting": "uniform"},
    "tree": {"max_depth": 10, "min_leaf": 5},
    "svm_linear": {"C": 1.0, "epochs": 20},
    "ensemble": {"n_trees": 30, "sample_fraction": 1.0, "feature_fraction": 0.7,
                 "max_depth": 10, "min_leaf": 1},
}


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rows with binary labels and a group (instance) id per row."""

    X: np.ndarray
    y: np.ndarray
    groups: np.ndarray

    def __post_init__(self):
        X = check_finite_array(self.X, "X", ndim=2)
        y = check_binary_labels(self.y)
        groups = np.asarray(self.groups, dtype=np.int64)
        if not len(X) == len(y) == len(groups):
            raise DomainError("X, y and groups must have the same length")
        if len(np.unique(y)) != 2:
            raise DomainError("dataset must contain both labels")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "groups", groups)

    @classmethod
    def from_transformed(cls, td):
        return cls(td.features, td.label, td.instance_id)

    @classmethod
    def from_instances(cls, instances):
        """Raw baseline: each instance window flattened into one row."""
        X = np.stack([inst.X.reshape(-1) for inst in instances])
        y = np.array([inst.label for inst in instances])
        g = np.array([inst.instance_id for inst in instances])
        return cls(X, y, g)

    @property
    def feature_count(self):
        return self.X.shape[1]

    def group_labels(self):
        """``(unique_groups, label_per_group)``; rows of a group must agree."""
        uniq, first, inverse = np.unique(self.groups, return_index=True, return_inverse=True)
        labels = self.y[first]
        if np.any(self.y != labels[inverse]):
            raise DomainError("rows of one group carry different labels")
        return uniq, labels


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ESTIMATORS:
            raise DomainError(f"unknown classifier kind {self.kind!r}; expected one of {KINDS}")

    def build(self, seed=0):
        est = ESTIMATORS[self.kind](**self.params)
        if "seed" in est.get_params():
            est.set_params(seed=seed)
        return est


@dataclass
class EvalReport:
    """Cross-validation outcome for one classifier on one dataset."""

    classifier: str
    params: dict
    fold_accuracies: list
    row_accuracy: float
    instance_accuracy: float
    confusion: list  # [[tn, fp], [fn, tp]] over instances
    seed: int
    wall_ms: float
    dims: dict = field(default_factory=dict)

    def to_dict(self, timing=True):
        out = {
            "classifier": self.classifier,
            "params": self.params,
            "fold_accuracies": self.fold_accuracies,
            "row_accuracy": self.row_accuracy,
            "instance_accuracy": self.instance_accuracy,
            "confusion": self.confusion,
            "seed": self.seed,
            "wall_ms": self.wall_ms,
            "dims": self.dims,
        }
        if not timing:
            del out["wall_ms"]
        return out


def group_folds(ds, folds=10, seed=0):
    """Assign every group to a fold, stratified by group label.

    Groups of each class are shuffled, class 0 first then class 1 are dealt
    round-robin over the folds, so fold sizes differ by at most one group
    overall and per class.

    Returns ``(groups, fold_of_group)``.
    """
    folds = check_int(folds, "folds", min_value=2)
    uniq, labels = ds.group_labels()
    if len(uniq) < folds:
        raise DomainError(f"{len(uniq)} groups cannot fill {folds} folds")
    rng = substream(seed, "folds")
    ordered = []
    for c in (0, 1):
        members = uniq[labels == c]
        ordered.append(members[rng.permutation(len(members))])
    ordered = np.concatenate(ordered)
    fold_of = np.empty(len(uniq), dtype=np.int64)
    pos = np.searchsorted(uniq, ordered)
    fold_of[pos] = np.arange(len(ordered)) % folds
    return uniq, fold_of


def majority_vote(groups, preds):
    """Instance-level prediction per group; ties go to 0."""
    uniq, inverse = np.unique(groups, return_inverse=True)
    ones = np.bincount(inverse, weights=preds, minlength=len(uniq))
    total = np.bincount(inverse, minlength=len(uniq))
    return uniq, (2 * ones > total).astype(np.int64)


def cross_validate(ds, spec, folds=10, seed=0):
    """Grouped, stratified k-fold evaluation of ``spec`` on ``ds``."""
    t0 = time.perf_counter()
    uniq, fold_of = group_folds(ds, folds, seed)
    row_fold = fold_of[np.searchsorted(uniq, ds.groups)]
    model_seed = int(substream(seed, "model").integers(2**31))
    row_pred = np.empty(len(ds.y), dtype=np.int64)
    fold_acc = []
    for f in range(folds):
        test = row_fold == f
        model = spec.build(model_seed).fit(ds.X[~test], ds.y[~test])
        row_pred[test] = model.predict(ds.X[test])
        g, vote = majority_vote(ds.groups[test], row_pred[test])
        _, truth = majority_vote(ds.groups[test], ds.y[test])
        fold_acc.append(float(np.mean(vote == truth)))

    g, vote = majority_vote(ds.groups, row_pred)
    _, truth = majority_vote(ds.groups, ds.y)
    confusion = [
        [int(np.sum((truth == 0) & (vote == 0))), int(np.sum((truth == 0) & (vote == 1)))],
        [int(np.sum((truth == 1) & (vote == 0))), int(np.sum((truth == 1) & (vote == 1)))],
    ]
    return EvalReport(
        classifier=spec.kind,
        params=dict(spec.params),
        fold_accuracies=fold_acc,
        row_accuracy=float(np.mean(row_pred == ds.y)),
        instance_accuracy=float(np.mean(vote == truth)),
        confusion=confusion,
        seed=int(seed),
        wall_ms=round(1000.0 * (time.perf_counter() - t0), 3),
        dims={"rows": int(len(ds.y)), "features": int(ds.feature_count),
              "instances": int(len(g)), "folds": int(folds)},
    )


def _min_train_rows(ds, folds, seed):
    uniq, fold_of = group_folds(ds, folds, seed)
    row_fold = fold_of[np.searchsorted(uniq, ds.groups)]
    return int(min(np.sum(row_fold != f) for f in range(folds)))


def sample_params(kind, rng, max_k=50):
    """One random draw from the search space of ``kind``."""
    if kind == "knn":
        return {"k": int(rng.integers(1, max_k + 1)),
                "weighting": str(rng.choice(["uniform", "distance"]))}
    if kind == "tree":
        return {"max_depth": int(rng.integers(1, 31)), "min_leaf": int(rng.integers(1, 51))}
    if kind == "svm_linear":
        return {"C": float(10.0 ** rng.uniform(-3.0, 3.0)), "epochs": int(rng.integers(5, 51))}
    if kind == "ensemble":
        return {
            "n_trees": int(rng.integers(10, 201)),
            "sample_fraction": float(rng.uniform(0.3, 1.0)),
            "feature_fraction": float(rng.uniform(0.3, 1.0)),
            "max_depth": int(rng.integers(1, 31)),
            "min_leaf": int(rng.integers(1, 51)),
        }
    raise DomainError(f"unknown classifier kind {kind!r}")


def tune(ds, kind, budget=60, folds=10, seed=0, callback=None):
    """Random search; the best draw has the highest instance-level CV accuracy.

    Ties keep the earlier draw. Returns ``(best_spec, best_report, history)``.
    """
    budget = check_int(budget, "budget", min_value=1)
    rng = substream(seed, f"search/{kind}")
    max_k = min(50, _min_train_rows(ds, folds, seed)) if kind == "knn" else 50
    best = None
    history = []
    for draw in range(budget):
        spec = ClassifierSpec(kind, sample_params(kind, rng, max_k=max_k))
        report = cross_validate(ds, spec, folds, seed)
        history.append(report)
        if callback is not None:
            callback(draw, spec, report)
        if best is None or report.instance_accuracy > best[1].instance_accuracy:
            best = (spec, report)
    return best[0], best[1], history

