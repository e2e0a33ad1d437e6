import numpy as np
import pytest

from oracles import brute_force_knn, hinge_objective as hinge_oracle
from linlaw.classifiers import (
    DEFAULT_PARAMS,
    KINDS,
    BaggedTrees,
    CartTree,
    ClassifierSpec,
    Dataset,
    KNeighborsVote,
    LinearSVM,
    cross_validate,
    fit_ensemble,
    fit_predict_knn,
    fit_svm_linear,
    fit_tree,
    group_folds,
    majority_vote,
    predict_ensemble,
    predict_svm,
    predict_tree,
    render_table,
    report_json,
    tune,
)
from linlaw.exceptions import DomainError


class Train:
    def __init__(self, X, y):
        self.X = np.asarray(X, dtype=float)
        self.y = np.asarray(y)


def blobs(rng, n=60, d=2, gap=4.0):
    y = np.arange(n) % 2
    X = rng.normal(size=(n, d)) + gap * y[:, None]
    return X, y


def grouped(rng, n_groups=40, rows=3, d=2, gap=4.0, informative=True):
    labels = np.arange(n_groups) % 2
    groups = np.repeat(np.arange(n_groups) * 7 + 3, rows)
    y = np.repeat(labels, rows)
    X = rng.normal(size=(len(y), d))
    if informative:
        X += gap * y[:, None]
    return Dataset(X, y, groups)


# knn

def test_knn_examples():
    assert fit_predict_knn(Train([[0, 0], [1, 1]], [0, 1]), [[0.1, 0.1]], {"k": 1}).tolist() == [0]
    train = Train([[0.0], [5.0], [9.0]], [0, 0, 1])
    assert fit_predict_knn(train, [[9.0], [-3.0], [100.0]], {"k": 3}).tolist() == [0, 0, 0]


@pytest.mark.parametrize("weighting", ["uniform", "distance"])
def test_knn_matches_brute_force(rng, weighting):
    X = rng.normal(size=(100, 3))
    y = (rng.random(100) < 0.5).astype(int)
    Q = np.vstack([rng.normal(size=(40, 3)), X[:5]])
    model = KNeighborsVote(k=5, weighting=weighting, standardize=False).fit(X, y)
    assert model.predict(Q).tolist() == brute_force_knn(X, y, Q, 5, weighting)


def test_knn_vote_tie_goes_to_nearest():
    model = KNeighborsVote(k=2, standardize=False).fit([[0.0], [1.0]], [1, 0])
    assert model.predict([[0.2], [0.9]]).tolist() == [1, 0]


def test_knn_distance_tie_prefers_lower_row():
    model = KNeighborsVote(k=1, standardize=False).fit([[-1.0], [1.0]], [1, 0])
    assert model.predict([[0.0]]).tolist() == [1]


def test_knn_memorizes(rng):
    X, y = blobs(rng, gap=0.0)
    assert np.array_equal(KNeighborsVote(k=1).fit(X, y).predict(X), y)


def test_knn_errors():
    with pytest.raises(DomainError):
        KNeighborsVote(k=0).fit([[0.0], [1.0]], [0, 1])
    with pytest.raises(DomainError):
        KNeighborsVote(k=3).fit([[0.0], [1.0]], [0, 1])


# tree

def test_stump():
    X = np.array([[-3.0], [-2.0], [-0.5], [0.5], [1.0], [4.0]])
    y = np.array([0, 0, 0, 1, 1, 1])
    tree = fit_tree(Train(X, y), {"max_depth": 1})
    assert tree.n_nodes == 3
    assert tree.threshold_[0] == pytest.approx(0.0)
    assert np.array_equal(predict_tree(tree, X), y)


def test_pure_labels_give_single_leaf():
    tree = CartTree().fit(np.arange(10.0).reshape(5, 2), [1] * 5)
    assert tree.n_nodes == 1 and tree.depth == 0
    assert tree.predict([[100.0, -1.0]]).tolist() == [1]


def test_xor_depth_two():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] * 5)
    y = np.array([0, 1, 1, 0] * 5)
    tree = CartTree(max_depth=2).fit(X, y)
    # by hand: every first split has zero gain, the lowest (feature 0, 0.5) wins,
    # then each side splits on feature 1 at 0.5
    assert tree.feature_[0] == 0 and tree.threshold_[0] == 0.5
    assert np.mean(tree.predict(X) == y) >= 0.99
    assert tree.depth == 2


def test_tree_leaf_tie_goes_to_zero():
    tree = CartTree(max_depth=3).fit([[2.0], [2.0], [2.0], [2.0]], [0, 1, 1, 0])
    assert tree.n_nodes == 1
    assert tree.predict([[0.0]]).tolist() == [0]


def test_tree_min_leaf_respected(rng):
    X, y = blobs(rng, n=80, gap=0.5)
    tree = CartTree(max_depth=30, min_leaf=7).fit(X, y)
    sizes = np.bincount(tree.apply(X))
    assert sizes[sizes > 0].min() >= 7


def test_tree_gini_choice_against_enumeration(rng):
    X = rng.integers(0, 6, size=(30, 3)).astype(float)
    y = (rng.random(30) < 0.5).astype(int)
    tree = CartTree(max_depth=1).fit(X, y)
    best = None
    for f in range(3):
        vals = np.unique(X[:, f])
        for a, b in zip(vals, vals[1:]):
            thr = (a + b) / 2
            imp = 0.0
            for side in (X[:, f] <= thr, X[:, f] > thr):
                p = y[side].mean()
                imp += side.sum() / 30 * 2 * p * (1 - p)
            if best is None or imp < best[0] - 1e-15:
                best = (imp, f, thr)
    assert (tree.feature_[0], tree.threshold_[0]) == (best[1], best[2])


# svm

def test_svm_separable(rng):
    X, y = blobs(rng, n=80, gap=6.0)
    model = fit_svm_linear(Train(X, y), {"C": 10.0, "epochs": 30})
    assert np.array_equal(predict_svm(model, X), y)


def test_svm_zero_decision_is_class_zero():
    model = LinearSVM().fit([[0.0], [1.0]], [0, 1])
    model.coef_ = np.zeros(2)
    assert model.predict([[0.3], [7.0]]).tolist() == [0, 0]


def test_svm_objective_not_worse_than_zero(rng):
    for trial in range(5):
        X = rng.normal(size=(50, 4))
        y = (rng.random(50) < 0.5).astype(int)
        C = [0.001, 0.1, 1.0, 10.0, 1000.0][trial]
        model = LinearSVM(C=C, epochs=7, seed=trial).fit(X, y)
        Z = np.hstack([model.scaler_(X), np.ones((50, 1))])
        lam = 1.0 / (C * 50)
        obj = hinge_oracle(model.coef_, Z, y, lam)
        assert obj == pytest.approx(model.objective_, rel=1e-12)
        assert obj <= 1.0


def test_svm_constant_labels():
    model = LinearSVM().fit([[0.0], [1.0], [2.0]], [1, 1, 1])
    assert model.predict([[-5.0], [5.0]]).tolist() == [1, 1]


def test_svm_rejects_bad_c():
    with pytest.raises(DomainError):
        LinearSVM(C=0).fit([[0.0], [1.0]], [0, 1])


# ensemble

def test_degenerate_ensemble_equals_tree(rng):
    X, y = blobs(rng, n=50, d=3, gap=0.7)
    ens = BaggedTrees(n_trees=1, sample_fraction=1.0, feature_fraction=1.0,
                      bootstrap=False, max_depth=4, seed=3).fit(X, y)
    tree = CartTree(max_depth=4).fit(X, y)
    Q = rng.normal(size=(200, 3))
    assert np.array_equal(ens.predict(Q), tree.predict(Q))


def test_ensemble_separable_and_deterministic(rng):
    X, y = blobs(rng, n=60, d=4)
    model = fit_ensemble(Train(X, y), {"n_trees": 15, "seed": 4})
    assert np.array_equal(predict_ensemble(model, X), y)
    Q = rng.normal(size=(50, 4)) * 3
    again = fit_ensemble(Train(X, y), {"n_trees": 15, "seed": 4})
    assert np.array_equal(model.predict(Q), again.predict(Q))


def test_ensemble_vote_tie_goes_to_zero():
    ens = BaggedTrees(n_trees=2, bootstrap=False, feature_fraction=1.0).fit([[0.0], [1.0]], [0, 1])
    a, b = CartTree().fit([[0.0], [1.0]], [0, 1]), CartTree().fit([[0.0], [1.0]], [1, 0])
    ens.estimators_ = [a, b]
    assert ens.predict([[0.0], [1.0]]).tolist() == [0, 0]


@pytest.mark.parametrize("kind", KINDS)
def test_every_estimator_is_deterministic(rng, kind):
    X, y = blobs(rng, n=40, d=3, gap=1.0)
    Q = rng.normal(size=(30, 3))
    a = ClassifierSpec(kind, DEFAULT_PARAMS[kind]).build(seed=11).fit(X, y).predict(Q)
    b = ClassifierSpec(kind, DEFAULT_PARAMS[kind]).build(seed=11).fit(X, y).predict(Q)
    assert np.array_equal(a, b)


# model selection

def test_group_folds_partition_and_balance(rng):
    ds = grouped(rng, n_groups=43)
    uniq, fold_of = group_folds(ds, folds=10, seed=5)
    assert len(uniq) == 43
    sizes = np.bincount(fold_of, minlength=10)
    assert sizes.max() - sizes.min() <= 1
    _, labels = ds.group_labels()
    for c in (0, 1):
        per_class = np.bincount(fold_of[labels == c], minlength=10)
        assert per_class.max() - per_class.min() <= 1


def test_cv_group_integrity(rng):
    ds = grouped(rng)
    uniq, fold_of = group_folds(ds, folds=5, seed=1)
    row_fold = fold_of[np.searchsorted(uniq, ds.groups)]
    for g in np.unique(ds.groups):
        assert len(np.unique(row_fold[ds.groups == g])) == 1


def test_cv_too_few_groups(rng):
    ds = grouped(rng, n_groups=6)
    with pytest.raises(DomainError):
        cross_validate(ds, ClassifierSpec("knn", {"k": 1}), folds=10)


@pytest.mark.parametrize("kind", KINDS)
def test_cv_separable_is_perfect(rng, kind):
    n = 40
    labels = np.arange(n) % 2
    y = np.repeat(labels, 3)
    X = rng.normal(size=(3 * n, 2))
    X[:, 0] = np.abs(X[:, 0]) * np.where(y == 1, 1, -1) + np.where(y == 1, 0.5, -0.5)
    ds = Dataset(X, y, np.repeat(np.arange(n), 3))
    params = dict(DEFAULT_PARAMS[kind])
    if kind == "tree":
        params["min_leaf"] = 1
    report = cross_validate(ds, ClassifierSpec(kind, params), folds=10, seed=2)
    assert report.instance_accuracy == 1.0
    assert report.confusion == [[20, 0], [0, 20]]


def test_cv_random_labels_near_chance():
    rng = np.random.default_rng(77)
    n = 200
    ds = Dataset(rng.normal(size=(n, 5)), np.arange(n) % 2, np.arange(n))
    ds = Dataset(ds.X, rng.permutation(ds.y), ds.groups)
    report = cross_validate(ds, ClassifierSpec("knn", {"k": 1}), folds=10, seed=3)
    assert 0.35 <= report.instance_accuracy <= 0.65


def test_majority_vote_tie_to_zero():
    g, v = majority_vote(np.array([5, 5, 2, 2, 2]), np.array([1, 0, 1, 1, 0]))
    assert g.tolist() == [2, 5] and v.tolist() == [1, 0]


def test_dataset_rejects_mixed_group_labels():
    ds = Dataset([[0.0], [1.0], [2.0]], [0, 1, 1], [1, 1, 2])
    with pytest.raises(DomainError):
        ds.group_labels()


def test_tune_budget_one(rng):
    ds = grouped(rng)
    seen = []
    spec, report, history = tune(ds, "tree", budget=1, folds=5, seed=4,
                                 callback=lambda i, s, r: seen.append(s))
    assert len(history) == 1 and seen == [spec]
    assert report is history[0]


def test_tune_deterministic_and_picks_best(rng):
    ds = grouped(rng, gap=1.0)
    a = tune(ds, "knn", budget=6, folds=5, seed=9)
    b = tune(ds, "knn", budget=6, folds=5, seed=9)
    assert a[0] == b[0]
    assert [r.params for r in a[2]] == [r.params for r in b[2]]
    accs = [r.instance_accuracy for r in a[2]]
    assert a[1].instance_accuracy == max(accs)
    assert a[1] is a[2][accs.index(max(accs))]
    assert all(1 <= r.params["k"] <= 50 for r in a[2])


@pytest.mark.parametrize("kind", ["knn", "tree"])
def test_tune_on_blobs_matches_default(rng, kind):
    ds = grouped(rng, gap=5.0)
    _, best, _ = tune(ds, kind, budget=5, folds=5, seed=1)
    default = cross_validate(ds, ClassifierSpec(kind, DEFAULT_PARAMS[kind]), folds=5, seed=1)
    assert best.instance_accuracy >= default.instance_accuracy


def test_report_json_and_table(rng):
    report = cross_validate(grouped(rng), ClassifierSpec("knn", {"k": 1}), folds=5, seed=0)
    text = report_json(report, timing=False)
    assert '"wall_ms"' not in text
    assert list(report.to_dict()) == ["classifier", "params", "fold_accuracies", "row_accuracy",
                                      "instance_accuracy", "confusion", "seed", "wall_ms", "dims"]
    table = render_table({"raw": {"BTC": {"knn": 0.5}}, "llt": {"BTC": {"knn": 0.75}}},
                         ["BTC"], ["knn", "tree"])
    assert "Original feature space" in table and "75.0" in table
    assert table.splitlines()[-1].split() == ["DT", "-"]
