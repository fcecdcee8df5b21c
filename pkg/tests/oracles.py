"""Slow reference implementations used only by the tests."""
import numpy as np


def k(u):
    return 0.75 * (1 - u * u) if abs(u) <= 1 else 0.0


def naive_surface(px, py, h, points, normalization="paper"):
    n = len(px)
    p = 1.5 if normalization == "paper" else 2.0
    L1 = len(points)
    out = np.zeros((L1, L1))
    for a in range(L1):
        for b in range(L1):
            s, t = points[a], points[b]
            joint = 0.0
            f1 = 0.0
            f2 = 0.0
            for i in range(n):
                ks = k((px[i] - s) / h)
                kt = k((py[i] - t) / h)
                joint += ks * kt
                f1 += ks
                f2 += kt
            out[a, b] = abs(joint / (n * h ** p) - (f1 / (n * h)) * (f2 / (n * h)))
    return out
