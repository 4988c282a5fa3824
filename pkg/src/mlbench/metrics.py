"""Joint-entropy normalized mutual information and layer summaries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MultilayerPartition, ShapeError


def _as_labels(x) -> np.ndarray:
    if isinstance(x, dict):
        return np.array([x[k] for k in sorted(x)])
    return np.asarray(x).ravel()


def _xlogx_sum(counts: np.ndarray) -> float:
    c = counts[counts > 0].astype(float)
    return float(np.sum(c * np.log2(c)))


def nmi_joint(A, B) -> float:
    """``I(A;B) / H(A,B)`` from empirical joint label frequencies (base 2).

    ``A`` and ``B`` are label arrays over the same nodes, or dicts keyed by
    node. Returns 1 when both partitions are constant.
    """
    if isinstance(A, dict) or isinstance(B, dict):
        if not (isinstance(A, dict) and isinstance(B, dict)) or set(A) != set(B):
            raise ValueError("partitions must be defined on the same node set")
    a, b = _as_labels(A), _as_labels(B)
    if a.size != b.size:
        raise ValueError(f"node-set mismatch: {a.size} vs {b.size} nodes")
    if a.size == 0:
        raise ValueError("partitions must be nonempty")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    N = a.size
    ka = ia.max() + 1
    joint = np.bincount(ia * (ib.max() + 1) + ib)
    # entropies from integer counts: H = log2 N - sum(c log2 c) / N
    logN = np.log2(N)
    h_ab = logN - _xlogx_sum(joint) / N
    if h_ab <= 0:
        return 1.0
    h_a = logN - _xlogx_sum(np.bincount(ia, minlength=ka)) / N
    h_b = logN - _xlogx_sum(np.bincount(ib)) / N
    value = (h_a + h_b - h_ab) / h_ab
    return float(min(max(value, 0.0), 1.0))


@dataclass(frozen=True)
class LayerNmiSummary:
    per_layer: np.ndarray       # mean over runs, one entry per layer
    per_run: np.ndarray         # (runs, l)
    mean: float
    pairwise: np.ndarray | None = None


def per_layer_mean_nmi(planted: MultilayerPartition, found, pairwise: bool = False) -> LayerNmiSummary:
    """NMI between induced partitions of ``planted`` and each found partition, per layer.

    With ``pairwise=True`` the planted pairwise-layer NMI matrix is attached.
    """
    if isinstance(found, MultilayerPartition):
        found = [found]
    if not found:
        raise ValueError("need at least one found partition")
    for f in found:
        if f.shape != planted.shape:
            raise ShapeError(f"shape mismatch: {f.shape} vs {planted.shape}")
    l = planted.shape.n_layers
    per_run = np.array([[nmi_joint(planted.labels[a], f.labels[a]) for a in range(l)] for f in found])
    return LayerNmiSummary(per_run.mean(axis=0), per_run, float(per_run.mean()),
                           pairwise_layer_nmi(planted) if pairwise else None)


def pairwise_layer_nmi(S: MultilayerPartition) -> np.ndarray:
    """``l x l`` matrix of NMI between the partitions induced on each pair of layers."""
    l = S.shape.n_layers
    out = np.eye(l)
    for a in range(l):
        for b in range(a + 1, l):
            out[a, b] = out[b, a] = nmi_joint(S.labels[a], S.labels[b])
    return out


def mean_nmi_by_distance(matrix: np.ndarray) -> np.ndarray:
    """Mean off-diagonal NMI at each layer distance ``k = 1..l-1``."""
    l = matrix.shape[0]
    return np.array([np.diagonal(matrix, offset=k).mean() for k in range(1, l)])
