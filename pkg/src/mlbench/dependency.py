"""Builders and validation for layer dependency tensors.

Every builder returns a :class:`~mlbench.core.LayerDependencyTensor` whose
``matrix[a, b]`` is the probability that a state node in layer ``b`` copies
the label of the same node in layer ``a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import PROB_TOL, DependencyError, LayerDependencyTensor, MultilayerShape


def _check_prob(value, name):
    arr = np.asarray(value, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise DependencyError(f"{name} must lie in [0, 1], got {value!r}")
    return arr


def _check_nonneg(value, name):
    x = float(value)
    if not np.isfinite(x) or x < 0:
        raise DependencyError(f"{name} must be a non-negative probability, got {value!r}")
    return x


def _raise_on_mass(shape, matrix):
    mass = matrix.sum(axis=0)
    bad = np.flatnonzero(mass > 1.0 + PROB_TOL)
    if bad.size:
        b = int(bad[0])
        raise DependencyError(
            f"total copy probability {mass[b]:.6g} > 1 into layer {shape.unflatten(b)}"
        )


def build_temporal(l: int, p, n: int = 1) -> LayerDependencyTensor:
    """Copying only from the previous layer: ``P[b-1, b] = p_b``.

    ``p`` is a scalar (uniform) or a sequence of length ``l - 1`` giving
    ``p_2, ..., p_l``.
    """
    if l < 2:
        raise DependencyError("a temporal tensor needs at least two layers")
    p = np.asarray(p, dtype=float)
    p = np.broadcast_to(p, (l - 1,)) if p.ndim == 0 else p
    if p.shape != (l - 1,):
        raise DependencyError(f"expected {l - 1} copying probabilities, got {p.size}")
    bad = np.flatnonzero(~np.isfinite(p) | (p < 0) | (p > 1))
    if bad.size:
        b = int(bad[0])
        raise DependencyError(f"copy probability {p[b]!r} into layer ({b + 2},) must lie in [0, 1]")
    matrix = np.zeros((l, l))
    idx = np.arange(l - 1)
    matrix[idx, idx + 1] = p
    return LayerDependencyTensor(MultilayerShape.temporal(n, l), matrix)


def build_uniform_multiplex(l: int, p_hat: float, n: int = 1) -> LayerDependencyTensor:
    """Every layer copies from every other with ``p = p_hat / (l - 1)``."""
    if l < 2:
        raise DependencyError("a multiplex tensor needs at least two layers")
    _check_nonneg(p_hat, "p_hat")
    matrix = np.full((l, l), p_hat / (l - 1))
    np.fill_diagonal(matrix, 0.0)
    shape = MultilayerShape.multiplex(n, l)
    _raise_on_mass(shape, matrix)
    return LayerDependencyTensor(shape, matrix)


def build_temporal_multiplex(l1: int, l2: int, p, n: int = 1) -> LayerDependencyTensor:
    """Multiplex aspect of size ``l1`` (unordered) times temporal aspect ``l2``.

    Layer ``(b1, b2)`` copies with probability ``p[b1, b2]`` from each other
    platform at the same time and from the same platform at time ``b2 - 1``.
    """
    if l1 < 1 or l2 < 1:
        raise DependencyError("aspect sizes must be positive")
    p = _check_prob(p, "p")
    p = np.broadcast_to(p, (l1, l2)) if p.ndim == 0 else p
    if p.shape != (l1, l2):
        raise DependencyError(f"p table must have shape {(l1, l2)}, got {p.shape}")
    shape = MultilayerShape(n, ((l1, False), (l2, True)))
    matrix = np.zeros((shape.n_layers, shape.n_layers))
    for b1 in range(l1):
        for b2 in range(l2):
            tgt = b1 * l2 + b2
            for a1 in range(l1):
                if a1 != b1:
                    matrix[a1 * l2 + b2, tgt] = p[b1, b2]
            if b2 > 0:
                matrix[b1 * l2 + b2 - 1, tgt] = p[b1, b2]
    _raise_on_mass(shape, matrix)
    return LayerDependencyTensor(shape, matrix)


def build_block_multiplex(l: int, blocks, p_hat, n: int = 1) -> LayerDependencyTensor:
    """Uniform multiplex dependencies inside each block of layers, none across.

    ``blocks[a]`` is the block id of (0-based) layer ``a``; ``p_hat`` maps a
    block id to its total copy probability (a dict or a sequence indexed by
    the sorted block ids).
    """
    blocks = np.asarray(blocks)
    if blocks.shape != (l,):
        raise DependencyError(f"need one block id per layer ({l}), got {blocks.size}")
    ids = sorted(set(blocks.tolist()))
    if not isinstance(p_hat, dict):
        seq = np.atleast_1d(np.asarray(p_hat, dtype=float))
        if seq.size == 1:
            seq = np.repeat(seq, len(ids))
        if seq.size != len(ids):
            raise DependencyError(f"need one p_hat per block ({len(ids)}), got {seq.size}")
        p_hat = dict(zip(ids, seq.tolist()))
    matrix = np.zeros((l, l))
    for b in ids:
        if b not in p_hat:
            raise DependencyError(f"no p_hat given for block {b!r}")
        ph = float(_check_nonneg(p_hat[b], f"p_hat[{b!r}]"))
        members = np.flatnonzero(blocks == b)
        if members.size < 2:
            if ph > 0:
                raise DependencyError(f"block {b!r} has a single layer but p_hat = {ph}")
            continue
        matrix[np.ix_(members, members)] = ph / (members.size - 1)
    np.fill_diagonal(matrix, 0.0)
    shape = MultilayerShape.multiplex(n, l)
    _raise_on_mass(shape, matrix)
    return LayerDependencyTensor(shape, matrix)


def build_custom(shape: MultilayerShape, matrix) -> LayerDependencyTensor:
    """Accept a user matrix verbatim; raises if it breaks tensor invariants."""
    return LayerDependencyTensor(shape, matrix)


@dataclass
class ValidationReport:
    mass_violations: list[tuple[int, float]] = field(default_factory=list)
    diagonal_violations: list[int] = field(default_factory=list)
    # (aspect, source layer, target layer), flat layer indices
    causal_violations: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.mass_violations or self.diagonal_violations or self.causal_violations)

    def __str__(self):
        if self.ok:
            return "valid"
        parts = []
        if self.mass_violations:
            parts.append("mass > 1 at layers " + ", ".join(f"{b} ({m:.4g})" for b, m in self.mass_violations))
        if self.diagonal_violations:
            parts.append(f"nonzero diagonal at layers {self.diagonal_violations}")
        if self.causal_violations:
            parts.append("causal violations " + ", ".join(
                f"{a}->{b} (aspect {k})" for k, a, b in self.causal_violations))
        return "; ".join(parts)


def validate(P, shape: MultilayerShape) -> ValidationReport:
    """Check copy mass, zero diagonal and causal ordering of every ordered aspect.

    ``P`` may be a :class:`LayerDependencyTensor` or a raw ``(l, l)`` array,
    so that matrices the tensor constructor would reject can be diagnosed.
    A nonzero entry from layer ``a`` into layer ``b`` violates causality on an
    ordered aspect ``k`` when ``a_k > b_k``.
    """
    matrix = np.asarray(P.matrix if isinstance(P, LayerDependencyTensor) else P, dtype=float)
    l = shape.n_layers
    if matrix.shape != (l, l):
        raise DependencyError(f"matrix shape {matrix.shape} does not match {l} layers")
    report = ValidationReport()
    mass = matrix.sum(axis=0)
    report.mass_violations = [(int(b), float(mass[b])) for b in np.flatnonzero(mass > 1.0 + PROB_TOL)]
    report.diagonal_violations = [int(a) for a in np.flatnonzero(np.diag(matrix) != 0)]
    coords = shape.layer_coords()
    src, tgt = np.nonzero(matrix)
    for k in shape.ordered_aspects:
        bad = coords[src, k] > coords[tgt, k]
        report.causal_violations.extend((k, int(a), int(b)) for a, b in zip(src[bad], tgt[bad]))
    return report
