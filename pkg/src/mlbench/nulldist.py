"""Per-layer categorical null distributions and their supports."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import MultilayerShape

SUM_TOL = 1e-12
SUPPORT_RETRIES = 1000


class SupportError(RuntimeError):
    """A support process kept producing empty supports."""


def sample_dirichlet(theta: float, q: int, rng: np.random.Generator) -> np.ndarray:
    """One draw from the symmetric Dirichlet ``Dir(theta, q)``."""
    if not theta > 0:
        raise ValueError(f"concentration must be positive, got {theta!r}")
    if int(q) != q or q < 1:
        raise ValueError(f"dimension must be a positive integer, got {q!r}")
    if q == 1:
        return np.ones(1)
    x = rng.dirichlet(np.full(int(q), float(theta)))
    # tiny concentrations can underflow to exact zeros
    if np.any(x <= 0):
        x = np.maximum(x, np.finfo(float).tiny)
    return x / x.sum()


@dataclass(frozen=True)
class SupportProcessSpec:
    """How active labels are chosen per layer.

    ``full``: every label ``1..n_c`` is active in every layer.
    ``temporal_birth_death``: along the (single, ordered) aspect each active
    label dies with probability ``r_d`` and ``Poisson(r_b)`` fresh labels are
    born; the first layer starts with ``initial_size`` labels.
    ``multiplex_presence``: each label ``1..n_c`` is active independently with
    probability ``q_presence``.
    """

    kind: Literal["full", "temporal_birth_death", "multiplex_presence"] = "full"
    r_d: float = 0.0
    r_b: float = 0.0
    initial_size: int = 1
    q_presence: float = 1.0

    def __post_init__(self):
        if self.kind not in ("full", "temporal_birth_death", "multiplex_presence"):
            raise ValueError(f"unknown support process {self.kind!r}")
        if not 0 <= self.r_d <= 1:
            raise ValueError(f"r_d must be in [0, 1], got {self.r_d}")
        if not self.r_b >= 0:
            raise ValueError(f"r_b must be non-negative, got {self.r_b}")
        if self.kind == "temporal_birth_death" and self.initial_size < 1:
            raise ValueError("initial support size must be at least 1")
        if not 0 <= self.q_presence <= 1:
            raise ValueError(f"q_presence must be in [0, 1], got {self.q_presence}")


class NullSet:
    """One categorical null distribution per layer over labels ``1..n_c``.

    ``probs[layer, s - 1]`` is the probability of label ``s`` in ``layer``.
    """

    def __init__(self, shape: MultilayerShape, probs):
        probs = np.array(probs, dtype=float)
        if probs.ndim != 2 or probs.shape[0] != shape.n_layers:
            raise ValueError(f"probs must have shape (l, n_c) with l = {shape.n_layers}")
        if probs.shape[1] > shape.n * shape.n_layers:
            raise ValueError("more labels than state nodes")
        if np.any(probs < 0):
            raise ValueError("null probabilities must be non-negative")
        sums = probs.sum(axis=1)
        if np.any(np.abs(sums - 1) > SUM_TOL):
            bad = int(np.argmax(np.abs(sums - 1)))
            raise ValueError(f"null probabilities of layer {bad} sum to {sums[bad]!r}")
        self.shape = shape
        self.probs = probs
        self.probs.setflags(write=False)
        cdf = np.cumsum(probs, axis=1)
        self._cdf = cdf
        self._last = np.array([np.flatnonzero(row)[-1] for row in probs])

    @property
    def n_c(self) -> int:
        return self.probs.shape[1]

    def support(self, layer: int) -> np.ndarray:
        """Active labels (1-based) of ``layer``."""
        return np.flatnonzero(self.probs[layer]) + 1

    def draw_from_uniform(self, layer: int, v) -> np.ndarray:
        """Inverse-CDF draw: map uniforms ``v`` in ``[0, 1)`` to labels of ``layer``."""
        cdf = self._cdf[layer]
        idx = np.searchsorted(cdf, np.asarray(v) * cdf[-1], side="right")
        return np.minimum(idx, self._last[layer]) + 1

    def draw(self, layer: int, rng: np.random.Generator, size=None):
        v = rng.random(size)
        out = self.draw_from_uniform(layer, v)
        return int(out) if size is None else out

    def __eq__(self, other):
        if not isinstance(other, NullSet):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.probs, other.probs)


def null_draw(nulls: NullSet, layer: int, rng: np.random.Generator) -> int:
    return nulls.draw(layer, rng)


def _birth_death_supports(shape, spec, rng):
    if shape.d != 1 or not shape.aspects[0].ordered:
        raise ValueError("the birth/death support process needs a single ordered aspect")
    supports = [list(range(1, spec.initial_size + 1))]
    next_label = spec.initial_size + 1
    for _ in range(1, shape.n_layers):
        prev = supports[-1]
        for _attempt in range(SUPPORT_RETRIES):
            keep = rng.random(len(prev)) >= spec.r_d
            survivors = [s for s, k in zip(prev, keep) if k]
            births = int(rng.poisson(spec.r_b))
            if survivors or births:
                break
        else:
            raise SupportError(f"empty support after {SUPPORT_RETRIES} attempts")
        new = list(range(next_label, next_label + births))
        next_label += births
        supports.append(survivors + new)
    return supports


def _presence_supports(shape, n_c, q, rng):
    supports = []
    for _ in range(shape.n_layers):
        for _attempt in range(SUPPORT_RETRIES):
            active = np.flatnonzero(rng.random(n_c) < q) + 1
            if active.size:
                break
        else:
            raise SupportError(f"empty support after {SUPPORT_RETRIES} attempts (q = {q})")
        supports.append(active.tolist())
    return supports


def build_null_set(shape: MultilayerShape, n_c: int | None, theta: float,
                   support: SupportProcessSpec | None, rng: np.random.Generator,
                   shared: bool = False) -> NullSet:
    """Sample supports, then Dirichlet probabilities on each layer's support.

    With ``shared=True`` (``full`` supports only) one probability vector is
    drawn and reused in every layer.
    """
    support = support or SupportProcessSpec()
    if support.kind == "full":
        if n_c is None or n_c < 1:
            raise ValueError("n_c must be a positive integer")
        supports = [list(range(1, n_c + 1))] * shape.n_layers
    elif support.kind == "temporal_birth_death":
        supports = _birth_death_supports(shape, support, rng)
    else:
        if n_c is None or n_c < 1:
            raise ValueError("n_c must be a positive integer")
        supports = _presence_supports(shape, n_c, support.q_presence, rng)
    if shared and support.kind != "full":
        raise ValueError("shared probabilities need identical supports (kind 'full')")

    total = max(max(s) for s in supports)
    probs = np.zeros((shape.n_layers, total))
    if shared:
        p = sample_dirichlet(theta, total, rng)
        probs[:] = p
    else:
        for layer, active in enumerate(supports):
            probs[layer, np.asarray(active) - 1] = sample_dirichlet(theta, len(active), rng)
    return NullSet(shape, probs)
