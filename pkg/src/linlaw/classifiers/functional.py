"""Function-style entry points over the estimator classes."""

from .ensemble import BaggedTrees
from .knn import KNeighborsVote
from .svm import LinearSVM
from .tree import CartTree


def _xy(train):
    return train.X, train.y


def fit_predict_knn(train, queries, params=None):
    return KNeighborsVote(**(params or {})).fit(*_xy(train)).predict(queries)


def fit_tree(train, params=None):
    return CartTree(**(params or {})).fit(*_xy(train))


def predict_tree(model, queries):
    return model.predict(queries)


def fit_svm_linear(train, params=None):
    return LinearSVM(**(params or {})).fit(*_xy(train))


def predict_svm(model, queries):
    return model.predict(queries)


def fit_ensemble(train, params=None):
    return BaggedTrees(**(params or {})).fit(*_xy(train))


def predict_ensemble(model, queries):
    return model.predict(queries)
