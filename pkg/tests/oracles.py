"""Brute-force reference implementations used by the tests."""
import itertools
import math
from collections import Counter


def set_partitions(n):
    """All partitions of ``n`` nodes as restricted growth strings (labels from 1)."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(1, top + 2):
            yield from grow(prefix + [c], max(top, c))
    yield from grow([], 0)


def entropy(counts, N):
    return -sum((c / N) * math.log2(c / N) for c in counts if c)


def nmi_bruteforce(a, b):
    N = len(a)
    joint = Counter(zip(a, b))
    h_ab = entropy(joint.values(), N)
    if h_ab == 0:
        return 1.0
    mi = 0.0
    ca, cb = Counter(a), Counter(b)
    for (x, y), c in joint.items():
        mi += (c / N) * math.log2(c * N / (ca[x] * cb[y]))
    return mi / h_ab


def monolayer_modularity(edges, labels, n, gamma=1.0):
    A = [[0.0] * n for _ in range(n)]
    for i, j in edges:
        A[i][j] += 1
        A[j][i] += 1
    k = [sum(r) for r in A]
    two_m = sum(k)
    q = 0.0
    for i, j in itertools.product(range(n), repeat=2):
        if labels[i] == labels[j]:
            q += A[i][j] - gamma * k[i] * k[j] / two_m
    return q / two_m
