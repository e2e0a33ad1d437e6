import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_finite_array, check_int, check_is_fitted, check_X_y

_LEAF = -1


def _best_split(xs, ys, min_leaf):
    """Lowest weighted-Gini split given per-feature sorted values and labels.

    ``xs`` and ``ys`` are ``(n, d)``: column ``f`` holds the node's values of
    feature ``f`` in ascending order and the matching labels. Returns
    ``(feature, threshold, impurity)`` or ``None``. Ties prefer the lower
    feature index, then the lower threshold.
    """
    n, d = xs.shape
    # candidate i splits after sorted position i; both sides keep >= min_leaf rows
    lo, hi = min_leaf - 1, n - min_leaf
    if hi <= lo:
        return None
    n_left = np.arange(lo + 1, hi + 1, dtype=np.float64)[:, None]
    n_right = n - n_left
    cum = np.cumsum(ys, axis=0, dtype=np.float64)
    pos_left = cum[lo:hi]
    pos_right = cum[-1] - pos_left
    # n_side * gini_side = 2 * pos * neg / n_side
    impurity = pos_left * (n_left - pos_left) / n_left
    impurity += pos_right * (n_right - pos_right) / n_right
    impurity *= 2.0 / n
    valid = xs[lo + 1 : hi + 1] > xs[lo:hi]
    if not valid.any():
        return None
    impurity[~valid] = np.inf
    pos = np.argmin(impurity, axis=0)
    per_feature = impurity[pos, np.arange(d)]
    f = int(np.argmin(per_feature))
    i = lo + int(pos[f])
    a, b = xs[i, f], xs[i + 1, f]
    thr = a + (b - a) / 2.0
    if not a <= thr < b:
        thr = a
    return f, float(thr), float(per_feature[f])


class CartTree(ClassifierMixin, BaseEstimator):
    """Binary CART classifier grown greedily on weighted Gini impurity.

    Split candidates are midpoints between consecutive distinct values. A
    node becomes a leaf when it is pure, at ``max_depth``, or when no split
    leaves ``min_leaf`` rows on both sides. Leaves predict the majority label,
    ties going to 0.
    """

    def __init__(self, max_depth=10, min_leaf=1):
        self.max_depth = max_depth
        self.min_leaf = min_leaf

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_int(self.max_depth, "max_depth", min_value=1)
        check_int(self.min_leaf, "min_leaf", min_value=1)
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(rows):
            n1 = int(y[rows].sum())
            feature.append(_LEAF)
            threshold.append(0.0)
            left.append(_LEAF)
            right.append(_LEAF)
            value.append(int(n1 > len(rows) - n1))
            return len(feature) - 1

        n, d = X.shape
        cols = np.arange(d)
        is_left = np.zeros(n, dtype=bool)
        # per-feature ascending row order, kept sorted while partitioning
        root_order = np.argsort(X, axis=0, kind="stable")
        root = new_node(np.arange(n))
        stack = [(root, root_order, 0)]
        while stack:
            node, order, depth = stack.pop()
            rows = order[:, 0]
            yr = y[rows]
            if depth >= self.max_depth or yr.min() == yr.max() or len(rows) < 2 * self.min_leaf:
                continue
            split = _best_split(X[order, cols], y[order], self.min_leaf)
            if split is None:
                continue
            f, thr, _ = split
            go_left = X[rows, f] <= thr
            is_left[rows] = go_left
            mask = is_left[order].T
            n_left = int(go_left.sum())
            left_order = order.T[mask].reshape(d, n_left).T
            right_order = order.T[~mask].reshape(d, len(rows) - n_left).T
            feature[node] = f
            threshold[node] = thr
            left[node] = new_node(rows[go_left])
            right[node] = new_node(rows[~go_left])
            stack.append((right[node], right_order, depth + 1))
            stack.append((left[node], left_order, depth + 1))

        self.feature_ = np.array(feature, dtype=np.int64)
        self.threshold_ = np.array(threshold)
        self.left_ = np.array(left, dtype=np.int64)
        self.right_ = np.array(right, dtype=np.int64)
        self.value_ = np.array(value, dtype=np.int64)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    @property
    def n_nodes(self):
        return len(self.feature_)

    @property
    def depth(self):
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature_[node] != _LEAF:
                depths[self.left_[node]] = depths[self.right_[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X):
        """Leaf index reached by every row of ``X``."""
        check_is_fitted(self, "feature_")
        X = check_finite_array(X, "X", ndim=2)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature_[node]
            inner = f != _LEAF
            if not inner.any():
                return node
            r = rows[inner]
            n = node[inner]
            go_left = X[r, f[inner]] <= self.threshold_[n]
            node[inner] = np.where(go_left, self.left_[n], self.right_[n])

    def predict(self, X):
        return self.value_[self.apply(X)]
