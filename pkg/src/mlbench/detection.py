"""Multilayer modularity with uniform diagonal coupling and Louvain-style maximisation.

Both heuristics work on the supra-modularity matrix ``B`` (state node
``(i, a)`` at index ``a*n + i``): per-layer Newman-Girvan blocks
``A - gamma k k^T / 2m`` plus ``omega`` between copies of the same node in
coupled layers. Phase 1 moves single (super) nodes; phase 2 aggregates
``B' = S^T B S`` and repeats until a level makes no move.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numba
import numpy as np
import scipy.sparse as sp

from .core import MultilayerNetwork, MultilayerPartition, ShapeError
from .metrics import per_layer_mean_nmi
from .seeding import substream

GAIN_TOL = 1e-10


class MoveRule(str, enum.Enum):
    MAX_GAIN = "max_gain"                    # GenLouvain
    PROPORTIONAL_GAIN = "proportional_gain"  # GenLouvainRand


class Topology(str, enum.Enum):
    ORDINAL = "ordinal"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class ModularityConfig:
    omega: float = 0.0
    topology: Topology = Topology.ORDINAL
    gamma: float = 1.0

    def __post_init__(self):
        if not self.omega >= 0:
            raise ValueError(f"omega must be non-negative, got {self.omega}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        object.__setattr__(self, "topology", Topology(self.topology))


def coupled_layer_pairs(l: int, topology: Topology) -> list[tuple[int, int]]:
    if Topology(topology) is Topology.ORDINAL:
        return [(a, a + 1) for a in range(l - 1)]
    return [(a, b) for a in range(l) for b in range(a + 1, l)]


def _check_network(network: MultilayerNetwork):
    if network.shape.d != 1:
        raise ShapeError("multilayer modularity supports single-aspect shapes only")
    if network.directed:
        raise ValueError("multilayer modularity needs an undirected network")
    if not np.all(network.intralayer):
        raise ValueError("multilayer modularity needs intralayer edges only")


def modularity_matrix(network: MultilayerNetwork, config: ModularityConfig) -> tuple[sp.csr_matrix, float]:
    """Symmetric supra-modularity matrix and its normalisation ``2 mu_tot``."""
    _check_network(network)
    n, l = network.shape.n, network.shape.n_layers
    rows, cols, vals = [], [], []
    two_mu = 0.0
    for a in range(l):
        i, j = network.layer_edges(a)
        w = network.weight[(network.src_layer == a) & (network.tgt_layer == a)]
        A = np.zeros((n, n))
        np.add.at(A, (i, j), w)
        np.add.at(A, (j, i), w)
        k = A.sum(axis=1)
        two_m = k.sum()
        two_mu += two_m
        if two_m == 0:
            continue
        Bl = A - config.gamma * np.outer(k, k) / two_m
        r, c = np.nonzero(Bl)
        rows.append(r + a * n), cols.append(c + a * n), vals.append(Bl[r, c])
    if config.omega > 0:
        pairs = coupled_layer_pairs(l, config.topology)
        node = np.arange(n)
        for a, b in pairs:
            rows += [a * n + node, b * n + node]
            cols += [b * n + node, a * n + node]
            vals += [np.full(n, config.omega)] * 2
        two_mu += 2 * config.omega * n * len(pairs)
    N = n * l
    if rows:
        B = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))
    else:
        B = sp.csr_matrix((N, N))
    B.sort_indices()
    return B, two_mu


def quality(B: sp.spmatrix, membership: np.ndarray) -> float:
    """``sum_ij B_ij delta(c_i, c_j)`` (unnormalised)."""
    coo = B.tocoo()
    same = membership[coo.row] == membership[coo.col]
    return float(coo.data[same].sum())


def multilayer_modularity(S: MultilayerPartition, network: MultilayerNetwork, config: ModularityConfig) -> float:
    if S.shape != network.shape:
        raise ShapeError("partition and network shapes differ")
    B, two_mu = modularity_matrix(network, config)
    if two_mu == 0:
        return 0.0
    return quality(B, S.labels.ravel()) / two_mu


def aggregate(B: sp.spmatrix, comm: np.ndarray) -> sp.csr_matrix:
    """``S^T B S`` for community indicator ``S`` (labels ``0..K-1``)."""
    K = int(comm.max()) + 1
    S = sp.csr_matrix((np.ones(comm.size), (np.arange(comm.size), comm)), shape=(comm.size, K))
    out = (S.T @ B @ S).tocsr()
    out.sort_indices()
    return out


@numba.njit(cache=True)
def _choose(touched, nt, acc, a, proportional, tol):
    """Target community for a node currently in ``a``; ``a`` itself if no positive gain."""
    base = acc[a]
    best = -1
    best_gain = tol
    npos = 0
    total = 0.0
    for t in range(nt):
        c = touched[t]
        if c == a:
            continue
        g = acc[c] - base
        if g > tol:
            npos += 1
            total += g
            if g > best_gain or (g == best_gain and c < best):
                best_gain = g
                best = c
    if best < 0:
        return a
    if not proportional or npos == 1:
        return best
    r = np.random.random() * total
    last = best
    for t in range(nt):
        c = touched[t]
        if c == a:
            continue
        g = acc[c] - base
        if g > tol:
            last = c
            r -= g
            if r < 0:
                return c
    return last


@numba.njit(cache=True)
def _phase1(indptr, indices, data, comm, proportional, seed, tol):
    """Local moves until no state node can improve; returns the number of moves."""
    N = comm.size
    if proportional:
        np.random.seed(seed)
    acc = np.zeros(N)
    seen = np.zeros(N, dtype=np.bool_)
    touched = np.empty(N, dtype=np.int64)
    order = np.arange(N)
    moves = 0
    while True:
        if proportional:
            order = np.random.permutation(N)
        moved = 0
        for v in order:
            a = comm[v]
            nt = 0
            for p in range(indptr[v], indptr[v + 1]):
                u = indices[p]
                if u == v:
                    continue
                c = comm[u]
                if not seen[c]:
                    seen[c] = True
                    touched[nt] = c
                    nt += 1
                acc[c] += data[p]
            target = _choose(touched, nt, acc, a, proportional, tol)
            for t in range(nt):
                acc[touched[t]] = 0.0
                seen[touched[t]] = False
            if target != a:
                comm[v] = target
                moved += 1
        moves += moved
        if moved == 0:
            break
    return moves


@dataclass
class LouvainResult:
    partition: MultilayerPartition
    quality_trace: list   # normalised modularity after each level, starting from singletons
    levels: int


def genlouvain(network: MultilayerNetwork, config: ModularityConfig, rule: MoveRule | str,
               rng: np.random.Generator | None = None, return_result: bool = False):
    """Two-phase multilayer modularity maximisation from the singleton partition.

    ``max_gain`` moves each state node to the community with the largest
    positive gain (lowest label on ties) and visits nodes in ascending order.
    ``proportional_gain`` picks among positive-gain moves with probability
    proportional to the gain and shuffles the visit order every sweep.
    """
    rule = MoveRule(rule)
    proportional = rule is MoveRule.PROPORTIONAL_GAIN
    if proportional and rng is None:
        raise ValueError("proportional_gain needs a random generator")
    B, two_mu = modularity_matrix(network, config)
    shape = network.shape
    N = B.shape[0]
    norm = two_mu if two_mu > 0 else 1.0
    membership = np.arange(N)
    trace = [quality(B, membership) / norm]
    level_B = B
    levels = 0
    while True:
        comm = np.arange(level_B.shape[0], dtype=np.int64)
        seed = int(rng.integers(2 ** 32)) if proportional else 0
        moves = _phase1(level_B.indptr, level_B.indices.astype(np.int64), level_B.data,
                        comm, proportional, seed, GAIN_TOL)
        if moves == 0:
            break
        levels += 1
        _, comm = np.unique(comm, return_inverse=True)
        membership = comm[membership]
        q = quality(B, membership) / norm
        if q < trace[-1] - 1e-9:
            raise AssertionError(f"modularity decreased from {trace[-1]} to {q}")
        trace.append(q)
        level_B = aggregate(level_B, comm)
        if level_B.shape[0] == 1:
            break
    # relabel 1..K in order of first appearance
    _, first, inv = np.unique(membership, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    labels = (rank[inv] + 1).reshape(shape.n_layers, shape.n)
    S = MultilayerPartition(shape, labels)
    return LouvainResult(S, trace, levels) if return_result else S


@dataclass(frozen=True)
class SweepRow:
    mu: float
    omega: float
    rule: str
    run: int
    mean_nmi: float


SWEEP_HEADER = ("mu", "omega", "rule", "run", "mean_nmi")


def nmi_sweep(planted: MultilayerPartition,
              make_network: Callable[[float, int], MultilayerNetwork],
              mus: Sequence[float], omegas: Sequence[float],
              rules: Sequence[MoveRule | str] = (MoveRule.MAX_GAIN, MoveRule.PROPORTIONAL_GAIN),
              runs: int = 10, seed: int = 0, topology: Topology | str = Topology.ORDINAL,
              gamma: float = 1.0, progress: Callable[[str], None] | None = None) -> list[SweepRow]:
    """Mean per-layer NMI against ``planted`` for every (mu, omega, rule, run).

    ``make_network(mu, index)`` builds the benchmark network for the
    ``index``-th mu; it is called once per mu and shared by all omegas,
    rules and runs. Run ``j`` of a detector uses the stream
    ``detector/mu-i/omega-k/rule/run-j`` of ``seed``. ``max_gain`` is
    deterministic, so its result is computed once per (mu, omega) and
    reported for every run.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    rules = [MoveRule(r) for r in rules]
    rows = []
    for i, mu in enumerate(mus):
        network = make_network(mu, i)
        for k, omega in enumerate(omegas):
            config = ModularityConfig(omega, topology, gamma)
            for rule in rules:
                cached = None
                for j in range(runs):
                    if rule is MoveRule.MAX_GAIN and cached is not None:
                        value = cached
                    else:
                        rng = substream(seed, "detector", f"mu-{i}", f"omega-{k}", rule.value, f"run-{j}")
                        found = genlouvain(network, config, rule, rng)
                        value = per_layer_mean_nmi(planted, found).mean
                        cached = value
                    rows.append(SweepRow(float(mu), float(omega), rule.value, j, value))
                if progress:
                    progress(f"mu={mu} omega={omega} rule={rule.value}: "
                             f"{np.mean([r.mean_nmi for r in rows[-runs:]]):.4f}")
    return rows
