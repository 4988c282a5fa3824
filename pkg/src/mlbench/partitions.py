"""Gibbs copying process for multilayer partitions.

Every state-node update consumes exactly one uniform ``u``: the interval
``[0, p_hat)`` is split between copy sources in ascending (layer, node)
order, and ``[p_hat, 1)`` is rescaled to ``[0, 1)`` and fed to the layer's
null inverse CDF. Layers are visited in a linear extension of the layer
partial order and nodes in ascending order, so a seed fully determines the
result and the vectorised layer-coupled path reproduces the generic
node-level path draw for draw.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    LayerDependencyTensor,
    MultilayerPartition,
    MultilayerShape,
    StateNode,
    layer_partial_order_rank,
)
from .nulldist import NullSet

DEFAULT_ITERATIONS = 200


@dataclass(frozen=True)
class SamplerConfig:
    """Number of sweeps and of independent chains.

    ``iterations=None`` picks the default: one sweep for fully ordered
    shapes, :data:`DEFAULT_ITERATIONS` otherwise. Fully ordered shapes always
    use a single sweep since later sweeps cannot change the distribution.
    """

    iterations: int | None = None
    chains: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.iterations is not None and self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.chains < 1:
            raise ValueError("chains must be at least 1")

    def sweeps_for(self, shape: MultilayerShape) -> int:
        if shape.fully_ordered:
            return 1
        return DEFAULT_ITERATIONS if self.iterations is None else self.iterations


def _check_nulls(nulls: NullSet, shape: MultilayerShape):
    if nulls.shape.n_layers != shape.n_layers:
        raise ValueError("null set does not cover the layers of the shape")


def sample_null_partition(nulls: NullSet, shape: MultilayerShape, rng: np.random.Generator) -> MultilayerPartition:
    """Every state node labelled independently from its layer's null."""
    _check_nulls(nulls, shape)
    labels = np.empty((shape.n_layers, shape.n), dtype=np.int64)
    for layer in range(shape.n_layers):
        labels[layer] = nulls.draw_from_uniform(layer, rng.random(shape.n))
    return MultilayerPartition(shape, labels)


def _resolve(u, p_hat, cum_weights, source_labels, nulls, layer):
    """Labels for uniforms ``u`` given cumulative copy weights.

    ``cum_weights`` has one entry per source; ``source_labels`` is
    ``(n_sources, size)``.
    """
    out = np.empty(u.shape, dtype=np.int64)
    copy = u < p_hat
    if cum_weights.size:
        k = np.searchsorted(cum_weights, u[copy], side="right")
        k = np.minimum(k, cum_weights.size - 1)
        out[copy] = source_labels[k, np.flatnonzero(copy)] if source_labels.ndim == 2 else source_labels[k]
    if p_hat < 1:
        rest = ~copy
        out[rest] = nulls.draw_from_uniform(layer, (u[rest] - p_hat) / (1.0 - p_hat))
    return out


def update_state_node(S: MultilayerPartition, P, nulls: NullSet, target: StateNode,
                      rng: np.random.Generator) -> int:
    """New label of ``target`` drawn from the copying update rule.

    ``P`` is an :class:`InterlayerDependencyTensor` or a
    :class:`LayerDependencyTensor`. ``S`` is not modified.
    """
    j, b = int(target[0]), int(target[1])
    if isinstance(P, LayerDependencyTensor):
        src, w = P.sources(b)
        labels = S.labels[src, j]
    else:
        inc = P.incoming(StateNode(j, b))
        w = np.array([x[1] for x in inc], dtype=float)
        labels = np.array([S.labels[s.layer, s.node] for s, _ in inc], dtype=np.int64)
    cum = np.cumsum(w)
    p_hat = float(cum[-1]) if cum.size else 0.0
    return int(_resolve(np.array([rng.random()]), p_hat, cum, labels, nulls, b)[0])


def gibbs_sweep(S: MultilayerPartition, P, nulls: NullSet, order, rng: np.random.Generator) -> MultilayerPartition:
    """Update every state node once, layers in ``order``, nodes ascending."""
    shape = S.shape
    _check_nulls(nulls, shape)
    labels = np.array(S.labels)
    if isinstance(P, LayerDependencyTensor):
        for b in order:
            src, w = P.sources(b)
            cum = np.cumsum(w)
            p_hat = float(cum[-1]) if cum.size else 0.0
            u = rng.random(shape.n)
            labels[b] = _resolve(u, p_hat, cum, labels[src], nulls, b)
    else:
        for b in order:
            for j in range(shape.n):
                inc = P.incoming(StateNode(j, b))
                u = rng.random()
                if not inc:
                    labels[b, j] = nulls.draw_from_uniform(b, u)
                    continue
                w = np.array([x[1] for x in inc])
                src_labels = np.array([labels[s.layer, s.node] for s, _ in inc])
                cum = np.cumsum(w)
                labels[b, j] = _resolve(np.array([u]), float(cum[-1]), cum, src_labels, nulls, b)[0]
    return MultilayerPartition(shape, labels)


def chain_rngs(seed: int, chains: int) -> list[np.random.Generator]:
    """Independent generators for chains ``0..chains-1`` derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(chains)
    return [np.random.default_rng(c) for c in children]


def run_chain(P, nulls: NullSet, shape: MultilayerShape, sweeps: int,
              rng: np.random.Generator, order=None) -> MultilayerPartition:
    order = layer_partial_order_rank(shape) if order is None else order
    S = sample_null_partition(nulls, shape, rng)
    for _ in range(sweeps):
        S = gibbs_sweep(S, P, nulls, order, rng)
    return S


def sample_partition(P, nulls: NullSet, shape: MultilayerShape,
                     config: SamplerConfig | None = None, rngs=None) -> list[MultilayerPartition]:
    """Final state of each independently reinitialised chain.

    ``rngs`` overrides the per-chain generators derived from ``config.seed``.
    """
    config = config or SamplerConfig()
    sweeps = config.sweeps_for(shape)
    rngs = chain_rngs(config.seed, config.chains) if rngs is None else rngs
    order = layer_partial_order_rank(shape)
    return [run_chain(P, nulls, shape, sweeps, rng, order) for rng in rngs]


def sample_temporal_partition(p, nulls: NullSet, shape: MultilayerShape,
                              rng: np.random.Generator) -> MultilayerPartition:
    """Single pass: layer 1 from its null, then copy the previous layer with probability ``p``.

    ``p`` may be a scalar or a vector ``p_2..p_l`` (change points).
    """
    if shape.d != 1 or not shape.aspects[0].ordered:
        raise ValueError("temporal sampling needs a single ordered aspect")
    l, n = shape.n_layers, shape.n
    p = np.broadcast_to(np.asarray(p, dtype=float), (l - 1,)) if np.ndim(p) == 0 else np.asarray(p, float)
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("p must lie in [0, 1]")
    _check_nulls(nulls, shape)
    labels = np.empty((l, n), dtype=np.int64)
    labels[0] = nulls.draw_from_uniform(0, rng.random(n))
    for a in range(1, l):
        pa = float(p[a - 1])
        u = rng.random(n)
        copy = u < pa
        row = np.empty(n, dtype=np.int64)
        row[copy] = labels[a - 1, copy]
        if pa < 1:
            row[~copy] = nulls.draw_from_uniform(a, (u[~copy] - pa) / (1.0 - pa))
        labels[a] = row
    return MultilayerPartition(shape, labels)


def marginal_label_probability(p: float, nulls, layer: int, s: int) -> float:
    """Marginal probability that a state node of ``layer`` (0-based) has label ``s``.

    Temporal copying with uniform ``p``; ``nulls`` is a :class:`NullSet` or an
    ``(l, n_c)`` array of null probabilities.
    """
    probs = nulls.probs if isinstance(nulls, NullSet) else np.asarray(nulls, dtype=float)
    if not 0 <= layer < probs.shape[0]:
        raise IndexError(f"layer {layer} out of range")
    q = probs[:, s - 1] if 1 <= s <= probs.shape[1] else np.zeros(probs.shape[0])
    if layer == 0:
        return float(q[0])
    a = layer + 1  # 1-based
    total = q[0] * p ** (a - 1)
    for b in range(2, a):
        total += (1 - p) * q[b - 1] * p ** (a - b)
    total += (1 - p) * q[a - 1]
    return float(total)


def label_disappearance_probability(p: float, null_s: float, m: int, n: int) -> float:
    """Probability that a label held by ``m`` of ``n`` nodes is absent in the next layer.

    ``null_s`` is the null probability of that label in the next layer.
    """
    if not 0 <= m <= n:
        raise ValueError("community size must satisfy 0 <= m <= n")
    return float(((1 - p) * (1 - null_s)) ** m * (p + (1 - p) * (1 - null_s)) ** (n - m))


def label_appearance_probability(p: float, null_probs, present_labels, n: int) -> float:
    """Probability that a label absent from the previous layer appears.

    ``null_probs[s - 1]`` is the next layer's null probability of label ``s``
    and ``present_labels`` are the labels used in the previous layer.
    """
    null_probs = np.asarray(null_probs, dtype=float)
    present = np.unique(np.asarray(present_labels, dtype=np.int64))
    mass = float(null_probs[present - 1].sum()) if present.size else 0.0
    return float(1 - (p + (1 - p) * mass) ** n)
