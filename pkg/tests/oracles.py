"""Independent reference computations used by the tests.

None of these share code with the package: they are deliberately naive
(pure Python loops, exact rational arithmetic, bisection) so they can check
the vectorized implementations.
"""

import math
from fractions import Fraction

import numpy as np


def count_eigenvalues_below(S, shifts):
    """Number of eigenvalues of ``S`` below each shift.

    Counts negative pivots of the unpivoted elimination of ``S - x I``, which
    equals the number of sign changes in the sequence of leading principal
    minors of the characteristic matrix (Sylvester's law of inertia).
    """
    S = np.asarray(S, dtype=np.float64)
    n = S.shape[0]
    shifts = np.asarray(shifts, dtype=np.float64)
    M = S[None, :, :] - shifts[:, None, None] * np.eye(n)[None]
    tiny = np.finfo(float).tiny ** 0.5 * max(1.0, np.abs(S).max())
    count = np.zeros(len(shifts), dtype=np.int64)
    for k in range(n):
        piv = M[:, k, k]
        piv = np.where(np.abs(piv) < tiny, -tiny, piv)
        count += piv < 0
        if k + 1 < n:
            M[:, k + 1 :, k + 1 :] -= (
                M[:, k + 1 :, k, None] * M[:, None, k, k + 1 :] / piv[:, None, None]
            )
    return count


def bisection_eigenvalues(S, iterations=80):
    """All eigenvalues of symmetric ``S`` by bisection on the inertia count."""
    S = np.asarray(S, dtype=np.float64)
    n = S.shape[0]
    radius = float(np.max(np.sum(np.abs(S), axis=1))) + 1.0
    lo = np.full(n, -radius)
    hi = np.full(n, radius)
    target = np.arange(1, n + 1)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = count_eigenvalues_below(S, mid)
        enough = below >= target
        hi = np.where(enough, mid, hi)
        lo = np.where(enough, lo, mid)
    return 0.5 * (lo + hi)


def cubic_char_poly_roots(S):
    """Roots of det(xI - S) for a 3x3 symmetric matrix via bracketing + bisection."""
    a = [[float(v) for v in row] for row in S]
    tr = a[0][0] + a[1][1] + a[2][2]
    minors = (
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
        + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2] - a[1][2] * a[2][1]
    )
    det = (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )

    def p(x):
        return ((x - tr) * x + minors) * x - det

    bound = 1.0 + max(sum(abs(v) for v in row) for row in a)
    grid = [-bound + 2 * bound * i / 20000 for i in range(20001)]
    roots = []
    for x0, x1 in zip(grid, grid[1:]):
        f0, f1 = p(x0), p(x1)
        if f0 == 0.0:
            roots.append(x0)
            continue
        if f0 * f1 < 0:
            for _ in range(200):
                xm = 0.5 * (x0 + x1)
                if p(x0) * p(xm) <= 0:
                    x1 = xm
                else:
                    x0 = xm
            roots.append(0.5 * (x0 + x1))
    return sorted(roots)


def bareiss_determinant(S):
    """Exact determinant by fraction-free Gaussian elimination on rationals."""
    M = [[Fraction(float(v)) for v in row] for row in S]
    n = len(M)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if M[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def brute_force_knn(train_X, train_y, queries, k, weighting="uniform"):
    """Reference k-NN with the tie rules of the package, in plain Python."""
    preds = []
    for q in queries:
        dists = []
        for idx, row in enumerate(train_X):
            d2 = sum((float(a) - float(b)) ** 2 for a, b in zip(q, row))
            dists.append((d2, idx))
        dists.sort()
        nearest = dists[:k]
        votes = {0: 0.0, 1: 0.0}
        zero = [idx for d2, idx in nearest if d2 == 0.0]
        for d2, idx in nearest:
            if weighting == "uniform":
                w = 1.0
            elif zero:
                w = 1.0 if d2 == 0.0 else 0.0
            else:
                w = 1.0 / math.sqrt(d2)
            votes[int(train_y[idx])] += w
        if votes[1] > votes[0]:
            preds.append(1)
        elif votes[0] > votes[1]:
            preds.append(0)
        else:
            preds.append(int(train_y[nearest[0][1]]))
    return preds


def hinge_objective(w, X, y, lam):
    """Plain-loop regularized hinge objective with labels in {0, 1}."""
    total = 0.0
    for row, label in zip(X, y):
        s = 1.0 if label == 1 else -1.0
        margin = s * sum(float(a) * float(b) for a, b in zip(w, row))
        total += max(0.0, 1.0 - margin)
    return 0.5 * lam * sum(float(v) ** 2 for v in w) + total / len(X)


def binomial_band(n, p=0.5, level=0.99):
    """Two-sided ``level`` band of the success fraction of Binomial(n, p).

    Lower bound: largest k with P(X < k) <= alpha/2; upper: smallest k with
    P(X > k) <= alpha/2. Exact summation with integer binomials.
    """
    alpha = 1.0 - level
    pmf = [math.comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(n + 1)]
    cdf = 0.0
    lo = 0
    for i in range(n + 1):
        if cdf + pmf[i] > alpha / 2:
            lo = i
            break
        cdf += pmf[i]
    tail = 0.0
    hi = n
    for i in range(n, -1, -1):
        if tail + pmf[i] > alpha / 2:
            hi = i
            break
        tail += pmf[i]
    return lo / n, hi / n


def recompute_label(closes, observe, window):
    """Label of a window from raw closes (None when the closes tie)."""
    a, b = closes[observe - 1], closes[window - 1]
    if b == a:
        return None
    return 1 if b > a else 0
