"""Multilayer degree-corrected SBM: expected degrees, block tensor, edge sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MultilayerNetwork, MultilayerPartition, MultilayerShape

DENSE_THRESHOLD = 0.25
RETRY_FACTOR = 100


class DegenerateCommunityError(ValueError):
    """A community that must receive edges has zero expected degree."""


@dataclass(frozen=True)
class TruncatedPowerLaw:
    """Continuous power law ``p(x) = C x**(-tau)`` on ``[k_min, k_max]``."""

    tau: float
    k_min: float
    k_max: float

    def __post_init__(self):
        if not self.tau > 1:
            raise ValueError(f"exponent tau must exceed 1, got {self.tau}")
        if not 0 < self.k_min <= self.k_max < np.inf:
            raise ValueError(f"need 0 < k_min <= k_max < inf, got {self.k_min}, {self.k_max}")

    @classmethod
    def from_exponent(cls, exponent: float, k_min: float, k_max: float) -> "TruncatedPowerLaw":
        """Build from the literal power of the density, e.g. ``-2`` for ``x**-2``."""
        return cls(-float(exponent), k_min, k_max)

    @property
    def degenerate(self) -> bool:
        return self.k_min == self.k_max

    @property
    def C(self) -> float:
        if self.degenerate:
            return np.inf
        a = self.tau - 1
        return a / (self.k_min ** -a - self.k_max ** -a)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.k_min) & (x <= self.k_max)
        return np.where(inside, self.C * np.power(x, -self.tau, where=inside, out=np.ones_like(x)), 0.0)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.k_min, self.k_max)
        if self.degenerate:
            return np.ones_like(x)
        a = self.tau - 1
        return self.C / a * (self.k_min ** -a - x ** -a)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        if self.degenerate:
            return np.full(u.shape, float(self.k_min))
        a = self.tau - 1
        x = (self.k_min ** -a - u * a / self.C) ** (-1 / a)
        return np.clip(x, self.k_min, self.k_max)

    def mean(self) -> float:
        if self.degenerate:
            return float(self.k_min)
        if self.tau == 2:
            return self.C * np.log(self.k_max / self.k_min)
        b = 2 - self.tau
        return self.C * (self.k_max ** b - self.k_min ** b) / b

    def sample(self, size, rng: np.random.Generator) -> np.ndarray:
        return self.ppf(rng.random(size))


def sample_expected_degrees(dist: TruncatedPowerLaw, shape: MultilayerShape,
                            rng: np.random.Generator) -> np.ndarray:
    """I.i.d. expected degrees ``e[layer, node]`` by inverse-CDF sampling."""
    return dist.sample((shape.n_layers, shape.n), rng)


@dataclass(frozen=True)
class LayerBlocks:
    """Block structure of one layer: communities present and their block matrix."""

    labels: np.ndarray        # community labels present, ascending
    members: tuple            # node indices of each community
    kappa: np.ndarray         # summed expected degree per community
    w: float                  # expected number of edges in the layer
    W: np.ndarray             # (c, c) block matrix; diagonal is twice the expected edge count


@dataclass(frozen=True)
class DcsbmParams:
    partition: MultilayerPartition
    degrees: np.ndarray       # e[layer, node]
    sigma: np.ndarray         # sigma[layer, node]
    mu: float
    layers: tuple             # LayerBlocks per layer

    @property
    def shape(self) -> MultilayerShape:
        return self.partition.shape

    def block(self, layer: int, r: int, s: int) -> float:
        """``W`` between communities ``r`` and ``s`` of ``layer`` (0 if absent)."""
        lb = self.layers[layer]
        ir = np.searchsorted(lb.labels, r)
        js = np.searchsorted(lb.labels, s)
        if ir >= lb.labels.size or lb.labels[ir] != r or js >= lb.labels.size or lb.labels[js] != s:
            return 0.0
        return float(lb.W[ir, js])

    def kappa(self, layer: int, s: int) -> float:
        lb = self.layers[layer]
        k = np.searchsorted(lb.labels, s)
        return float(lb.kappa[k]) if k < lb.labels.size and lb.labels[k] == s else 0.0


def build_dcsbm(S: MultilayerPartition, e, mu: float) -> DcsbmParams:
    """Undirected intralayer M-DCSBM parameters for partition ``S`` and degrees ``e``."""
    if not 0 <= mu <= 1:
        raise ValueError(f"mixing parameter must be in [0, 1], got {mu}")
    shape = S.shape
    e = np.asarray(e, dtype=float)
    if e.shape != (shape.n_layers, shape.n):
        raise ValueError(f"expected degrees must have shape {(shape.n_layers, shape.n)}")
    if np.any(e < 0):
        raise ValueError("expected degrees must be non-negative")
    sigma = np.zeros_like(e)
    layers = []
    for a in range(shape.n_layers):
        row = S.labels[a]
        labels, inverse = np.unique(row, return_inverse=True)
        kappa = np.bincount(inverse, weights=e[a], minlength=labels.size)
        if np.any(kappa <= 0):
            bad = labels[np.flatnonzero(kappa <= 0)[0]]
            raise DegenerateCommunityError(f"community {bad} in layer {a} has zero expected degree")
        w = 0.5 * e[a].sum()
        W = mu * np.outer(kappa, kappa) / (2 * w)
        W[np.diag_indices_from(W)] += (1 - mu) * kappa
        sigma[a] = e[a] / kappa[inverse]
        members = tuple(np.flatnonzero(inverse == k) for k in range(labels.size))
        layers.append(LayerBlocks(labels, members, kappa, float(w), W))
    return DcsbmParams(S, e, sigma, float(mu), tuple(layers))


def edge_probability(params: DcsbmParams, src, tgt) -> float:
    """Expected edge count ``sigma_i W_rs sigma_j`` between two state nodes."""
    (i, a), (j, b) = src, tgt
    if a != b:
        return 0.0
    S = params.partition
    return float(params.sigma[a, i] * params.block(a, S[i, a], S[j, b]) * params.sigma[b, j])


@dataclass
class SamplingStats:
    bernoulli_blocks: int = 0
    rejection_blocks: int = 0
    fallbacks: int = 0
    clamped_pairs: int = 0


def _pick(cum, u):
    return np.minimum(np.searchsorted(cum, u * cum[-1], side="right"), cum.size - 1)


def _rejection(src_nodes, src_w, tgt_nodes, tgt_w, m, same_pool, undirected, rng, budget):
    """Draw ``m`` distinct edges by rejection; ``None`` if the budget runs out."""
    cum_s, cum_t = np.cumsum(src_w), np.cumsum(tgt_w)
    seen = set()
    out_i, out_j = [], []
    draws = 0
    while len(out_i) < m:
        if draws >= budget:
            return None
        batch = int(min(max(2 * (m - len(out_i)), 8), budget - draws))
        ii = src_nodes[_pick(cum_s, rng.random(batch))]
        jj = tgt_nodes[_pick(cum_t, rng.random(batch))]
        draws += batch
        for i, j in zip(ii.tolist(), jj.tolist()):
            if same_pool and i == j:
                continue
            key = (min(i, j), max(i, j)) if undirected else (i, j)
            if key in seen:
                continue
            seen.add(key)
            out_i.append(i)
            out_j.append(j)
            if len(out_i) == m:
                break
    return np.array(out_i, dtype=np.int64), np.array(out_j, dtype=np.int64)


def _bernoulli(src_nodes, src_sig, tgt_nodes, tgt_sig, W, same_pool, rng, stats):
    prob = W * np.outer(src_sig, tgt_sig)
    if same_pool:
        iu, ju = np.triu_indices(src_nodes.size, k=1)
        prob = prob[iu, ju]
        pi, pj = src_nodes[iu], tgt_nodes[ju]
    else:
        pi = np.repeat(src_nodes, tgt_nodes.size)
        pj = np.tile(tgt_nodes, src_nodes.size)
        prob = prob.ravel()
    over = prob > 1
    stats.clamped_pairs += int(over.sum())
    hit = rng.random(prob.size) < np.minimum(prob, 1.0)
    return pi[hit], pj[hit]


def _sample_block(src_nodes, src_sig, tgt_nodes, tgt_sig, W, mean, same_pool, undirected,
                  rng, stats, dense_threshold, retry_factor):
    if same_pool:
        pairs = src_nodes.size * (src_nodes.size - 1) // (2 if undirected else 1)
    else:
        pairs = src_nodes.size * tgt_nodes.size
    if pairs == 0 or mean <= 0:
        return None
    if mean / pairs > dense_threshold:
        stats.bernoulli_blocks += 1
        return _bernoulli(src_nodes, src_sig, tgt_nodes, tgt_sig, W, same_pool, rng, stats)
    stats.rejection_blocks += 1
    m = int(rng.poisson(mean))
    if m == 0:
        return None
    if m <= pairs:
        got = _rejection(src_nodes, src_sig, tgt_nodes, tgt_sig, m, same_pool, undirected,
                         rng, retry_factor * m)
        if got is not None:
            return got
    stats.fallbacks += 1
    return _bernoulli(src_nodes, src_sig, tgt_nodes, tgt_sig, W, same_pool, rng, stats)


def sample_network(params: DcsbmParams, rng: np.random.Generator,
                   dense_threshold: float = DENSE_THRESHOLD, retry_factor: int = RETRY_FACTOR,
                   return_stats: bool = False):
    """Sample an undirected intralayer network from the M-DCSBM.

    Blocks are visited layer by layer and, within a layer, for community pairs
    ``r <= s``. Sparse blocks draw ``Poisson(W/2)`` (``r == s``) or
    ``Poisson(W)`` edges with endpoints proportional to ``sigma`` and reject
    self-loops and repeats. Blocks whose expected edge count per node pair
    exceeds ``dense_threshold``, or whose rejection loop exceeds
    ``retry_factor * m`` draws, use independent Bernoulli trials with
    probability ``min(1, sigma_i W sigma_j)``.
    """
    stats = SamplingStats()
    per_layer = {}
    for a, lb in enumerate(params.layers):
        sig = params.sigma[a]
        ii, jj = [], []
        c = lb.labels.size
        for r in range(c):
            for s in range(r, c):
                same = r == s
                mean = lb.W[r, s] / 2 if same else lb.W[r, s]
                got = _sample_block(lb.members[r], sig[lb.members[r]], lb.members[s], sig[lb.members[s]],
                                    lb.W[r, s], mean, same, True, rng, stats,
                                    dense_threshold, retry_factor)
                if got is not None:
                    ii.append(got[0]), jj.append(got[1])
        if ii:
            per_layer[a] = (np.concatenate(ii), np.concatenate(jj))
    net = MultilayerNetwork.from_layer_edges(params.shape, per_layer)
    return (net, stats) if return_stats else net


# directed model with interlayer edges


@dataclass(frozen=True)
class DirectedDcsbmParams:
    """Directed M-DCSBM with layer-specific in/out degrees.

    ``e_out[a, i, b]`` is the expected number of edges from ``(i, a)`` into
    layer ``b``; ``e_in[b, j, a]`` the expected number of edges into
    ``(j, b)`` from layer ``a``. ``W[(a, b)]`` is indexed by the communities
    present in ``a`` (rows) and ``b`` (columns).
    """

    partition: MultilayerPartition
    e_out: np.ndarray
    e_in: np.ndarray
    sigma_out: np.ndarray
    sigma_in: np.ndarray
    w: np.ndarray             # w[a, b]
    mu: float
    labels: tuple             # communities present per layer
    members: tuple
    W: dict

    @property
    def shape(self) -> MultilayerShape:
        return self.partition.shape

    def edge_probability(self, src, tgt) -> float:
        (i, a), (j, b) = src, tgt
        if (a, b) not in self.W:
            return 0.0
        S = self.partition
        r = np.searchsorted(self.labels[a], S[i, a])
        s = np.searchsorted(self.labels[b], S[j, b])
        return float(self.sigma_out[a, i, b] * self.W[(a, b)][r, s] * self.sigma_in[b, j, a])


def build_directed_interlayer_dcsbm(S: MultilayerPartition, e_out, e_in, mu: float,
                                    tol: float = 1e-9) -> DirectedDcsbmParams:
    if not 0 <= mu <= 1:
        raise ValueError(f"mixing parameter must be in [0, 1], got {mu}")
    shape = S.shape
    l, n = shape.n_layers, shape.n
    e_out = np.asarray(e_out, dtype=float)
    e_in = np.asarray(e_in, dtype=float)
    if e_out.shape != (l, n, l) or e_in.shape != (l, n, l):
        raise ValueError(f"layer-specific degrees must have shape {(l, n, l)}")
    if np.any(e_out < 0) or np.any(e_in < 0):
        raise ValueError("expected degrees must be non-negative")
    w = e_out.sum(axis=1)                 # w[a, b]
    w_in = e_in.sum(axis=1).T             # sum_j e_in[b, j, a] -> [a, b]
    if not np.allclose(w, w_in, rtol=0, atol=tol * max(1.0, np.abs(w).max())):
        a, b = np.unravel_index(np.argmax(np.abs(w - w_in)), w.shape)
        raise ValueError(f"in/out expected degree totals differ for layers {a}->{b}: "
                         f"{w[a, b]} vs {w_in[a, b]}")
    labels, members, inverses = [], [], []
    for a in range(l):
        lab, inv = np.unique(S.labels[a], return_inverse=True)
        labels.append(lab)
        inverses.append(inv)
        members.append(tuple(np.flatnonzero(inv == k) for k in range(lab.size)))
    sigma_out = np.zeros_like(e_out)
    sigma_in = np.zeros_like(e_in)
    W = {}
    for a in range(l):
        for b in range(l):
            if w[a, b] <= 0:
                continue
            k_out = np.bincount(inverses[a], weights=e_out[a, :, b], minlength=labels[a].size)
            k_in = np.bincount(inverses[b], weights=e_in[b, :, a], minlength=labels[b].size)
            block = mu * np.outer(k_out, k_in) / w[a, b]
            common, ia, ib = np.intersect1d(labels[a], labels[b], return_indices=True)
            block[ia, ib] += (1 - mu) * (k_out[ia] + k_in[ib]) / 2
            rows = np.flatnonzero(block.sum(axis=1) > 0)
            cols = np.flatnonzero(block.sum(axis=0) > 0)
            if np.any(k_out[rows] <= 0) or np.any(k_in[cols] <= 0):
                raise DegenerateCommunityError(
                    f"a community between layers {a}->{b} must receive edges but has zero expected degree")
            with np.errstate(invalid="ignore", divide="ignore"):
                sigma_out[a, :, b] = np.nan_to_num(e_out[a, :, b] / k_out[inverses[a]])
                sigma_in[b, :, a] = np.nan_to_num(e_in[b, :, a] / k_in[inverses[b]])
            W[(a, b)] = block
    return DirectedDcsbmParams(S, e_out, e_in, sigma_out, sigma_in, w, float(mu),
                               tuple(labels), tuple(members), W)


def sample_directed_network(params: DirectedDcsbmParams, rng: np.random.Generator,
                            dense_threshold: float = DENSE_THRESHOLD,
                            retry_factor: int = RETRY_FACTOR, return_stats: bool = False):
    """Directed edges, ``Poisson(W)`` per ordered block, with rejection of self-loops and repeats."""
    stats = SamplingStats()
    si, sa, tj, tb = [], [], [], []
    for (a, b) in sorted(params.W):
        block = params.W[(a, b)]
        for r, src in enumerate(params.members[a]):
            for s, tgt in enumerate(params.members[b]):
                same = a == b and params.labels[a][r] == params.labels[b][s]
                got = _sample_block(src, params.sigma_out[a, src, b], tgt, params.sigma_in[b, tgt, a],
                                    block[r, s], block[r, s], same, False, rng, stats,
                                    dense_threshold, retry_factor)
                if got is None:
                    continue
                si.append(got[0]), tj.append(got[1])
                sa.append(np.full(got[0].size, a)), tb.append(np.full(got[0].size, b))
    cat = (lambda xs: np.concatenate(xs) if xs else np.zeros(0, dtype=np.int64))
    net = MultilayerNetwork(params.shape, cat(si), cat(sa), cat(tj), cat(tb), directed=True)
    return (net, stats) if return_stats else net
