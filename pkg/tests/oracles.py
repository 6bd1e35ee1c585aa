"""Straight-line reference computations, independent of the library code."""

import math


def chunks(values, n):
    return [values[i:i + n] for i in range(0, len(values), n)]


def own_range_normalize(values, n):
    """Every window scaled by its own extrema (per-window strategy)."""
    out = []
    for w in chunks(values, n):
        lo, hi = min(w), max(w)
        for x in w:
            out.append(0.5 if hi == lo else (x - lo) / (hi - lo))
    return out


def prefix_extrema(values, n):
    """(min, max) of everything seen up to and including each window."""
    out = []
    for k in range(1, len(chunks(values, n)) + 1):
        seen = values[: k * n]
        out.append((min(seen), max(seen)))
    return out


def window_means(values, n):
    return [sum(w) / len(w) for w in chunks(values, n)]


def rmse(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)) / len(a))
