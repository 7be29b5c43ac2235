"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written as plain Python loops over scalars
or lists, with no imports from the package under test, so that agreement
between these oracles and the numpy/numba implementations is meaningful.
"""

import math


def skew_tent_scalar(x, b):
    if x < b:
        return x / b
    return (1.0 - x) / (1.0 - b)


def first_passage_oracle(q, b, epsilon, stimulus, max_iter):
    """First index whose orbit point is within epsilon of the stimulus.

    Returns max_iter when the orbit never enters the neighborhood. The
    orbit starts at q and iterates the skew tent map one scalar at a time.
    """
    y = q
    for t in range(max_iter):
        if abs(y - stimulus) < epsilon:
            return t
        y = skew_tent_scalar(y, b)
    return max_iter


def features_oracle(trace, b):
    """(firing time, firing rate, energy, entropy) from a raw trace list."""
    n = len(trace)
    if n == 0:
        return (0, 0.0, 0.0, 0.0)
    ones = sum(1 for y in trace if y >= b)
    rate = ones / n
    energy = sum(y * y for y in trace)
    entropy = 0.0
    for p in (rate, 1.0 - rate):
        if p > 0.0:
            entropy -= p * math.log2(p)
    return (n, rate, energy, entropy)


def cosine_oracle(u, v):
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


def macro_f1_oracle(y_true, y_pred, n_classes):
    """Macro F1 from scratch via per-class confusion counts; 0/0 -> 0."""
    f1s = []
    for k in range(n_classes):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == k and p == k)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != k and p == k)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == k and p != k)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    return sum(f1s) / n_classes


def nsrps_reference(seq):
    """Pair-substitution step count on a plain list of hashable symbols.

    At each step: count non-overlapping adjacent pairs left to right,
    pick the most frequent (ties to the earliest first occurrence),
    replace its non-overlapping occurrences left to right with a fresh
    symbol, and repeat until the sequence is homogeneous or has length 1.
    """
    s = list(seq)
    fresh = 0
    steps = 0
    while len(s) > 1 and any(c != s[0] for c in s):
        counts = {}
        first = {}
        i = 0
        while i < len(s) - 1:
            pair = (s[i], s[i + 1])
            if pair not in first:
                first[pair] = i
            counts[pair] = counts.get(pair, 0) + 1
            if s[i] == s[i + 1] and i + 2 < len(s) and s[i + 2] == s[i]:
                i += 2  # aaa counts aa once; resume after the counted pair
            else:
                i += 1
        best = min(counts, key=lambda p: (-counts[p], first[p]))
        label = ("fresh", fresh)
        fresh += 1
        out = []
        i = 0
        while i < len(s):
            if i < len(s) - 1 and (s[i], s[i + 1]) == best:
                out.append(label)
                i += 2
            else:
                out.append(s[i])
                i += 1
        s = out
        steps += 1
    return steps
