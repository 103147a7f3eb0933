"""Independent reference computations used to freeze expected values.

Nothing here imports the code under test.
"""

from fractions import Fraction

import numpy as np


def skewness_fractions(xs):
    """Exact biased skewness pieces (m2, m3) with rational arithmetic."""
    xs = [Fraction(x) for x in xs]
    n = len(xs)
    mean = sum(xs) / n
    m2 = sum((x - mean) ** 2 for x in xs) / n
    m3 = sum((x - mean) ** 3 for x in xs) / n
    return m2, m3


def exhaustive_best_split(X, g, h, lam, gamma=0.0, min_child_hessian=0.0):
    """Try every (feature, midpoint) by direct row partitioning.

    Returns (gain, feature, threshold) or None. Ties: lowest feature, then
    lowest threshold (strict improvement required to replace).
    """
    X = np.asarray(X, dtype=float)
    G, H = sum(g), sum(h)
    best = None
    for f in range(X.shape[1]):
        vals = sorted(set(X[:, f].tolist()))
        for a, b in zip(vals, vals[1:]):
            thr = (a + b) / 2
            left = [i for i in range(len(g)) if X[i, f] < thr]
            right = [i for i in range(len(g)) if X[i, f] >= thr]
            GL, HL = sum(g[i] for i in left), sum(h[i] for i in left)
            GR, HR = sum(g[i] for i in right), sum(h[i] for i in right)
            if HL < min_child_hessian or HR < min_child_hessian:
                continue
            gain = 0.5 * (GL**2 / (HL + lam) + GR**2 / (HR + lam) - G**2 / (H + lam)) - gamma
            if gain <= 1e-12:
                continue
            if best is None or gain > best[0] + 1e-12:
                best = (gain, f, thr)
    return best


def largest_remainder_fraction(sizes, n_test):
    """Largest-remainder allocation computed with exact fractions."""
    n = sum(sizes)
    quotas = [Fraction(s * n_test, n) for s in sizes]
    alloc = [q.numerator // q.denominator for q in quotas]
    rem = sorted(range(len(sizes)), key=lambda i: (-(quotas[i] - alloc[i]), i))
    for i in rem[: n_test - sum(alloc)]:
        alloc[i] += 1
    return alloc


def linear_quantile(sorted_vals, q):
    """Linear interpolation between order statistics at position q*(n-1)."""
    n = len(sorted_vals)
    pos = q * (n - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, n - 1)
    return sorted_vals[lo] + (pos - lo) * (sorted_vals[hi] - sorted_vals[lo])


def pearson(a, b):
    a = np.asarray(a) - np.mean(a)
    b = np.asarray(b) - np.mean(b)
    return float(a @ b / np.sqrt((a @ a) * (b @ b)))


def count_sign_changes(x):
    signs = [1 if v > 0 else -1 for v in x if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_extrema_bruteforce(x):
    """Interior extrema, collapsing plateaus, by a direct scan."""
    runs = []
    for v in x:
        if not runs or runs[-1] != v:
            runs.append(v)
    return sum(
        1
        for a, b, c in zip(runs, runs[1:], runs[2:])
        if (b > a and b > c) or (b < a and b < c)
    )


# Published confusion matrix of the reference method; rows actual, columns predicted,
# class order PD, D1, D2, T1, T2, T3.
PUBLISHED_CONFUSION = [
    [5, 2, 0, 0, 0, 0],
    [0, 10, 1, 0, 0, 0],
    [0, 1, 18, 0, 0, 0],
    [0, 0, 0, 9, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1, 8],
]


def label_streams(matrix, classes):
    """Expand a confusion matrix into (actual, predicted) label lists."""
    actual, predicted = [], []
    for i, row in enumerate(matrix):
        for j, n in enumerate(row):
            actual += [classes[i]] * n
            predicted += [classes[j]] * n
    return actual, predicted
