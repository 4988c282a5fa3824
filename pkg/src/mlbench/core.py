"""Shapes, partitions, dependency tensors and networks for multilayer benchmarks.

Conventions
-----------
Nodes and layers are 0-based integers inside the package. A layer is stored
by its flat (mixed-radix) index; the 1-based coordinate vector of a layer is
only used at the I/O boundary and in :meth:`MultilayerShape.flatten` /
:meth:`MultilayerShape.unflatten`. Community labels are positive integers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

PROB_TOL = 1e-12


class ShapeError(ValueError):
    """Index or dimension outside the bounds of a multilayer shape."""


class DependencyError(ValueError):
    """Invalid copying probabilities (mass above one, self-layer copying, ...)."""


@dataclass(frozen=True)
class AspectSpec:
    size: int
    ordered: bool = False

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ShapeError(f"aspect size must be a positive integer, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))


@dataclass(frozen=True)
class MultilayerShape:
    """Node count plus an ordered list of aspects.

    Layers are flattened in row-major order: the last aspect varies fastest,
    so for aspects ``(2, 3)`` the layer ``(1, 1)`` is flat index 0 and
    ``(2, 3)`` is flat index 5.
    """

    n: int
    aspects: tuple[AspectSpec, ...]

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ShapeError(f"node count must be a positive integer, got {self.n!r}")
        aspects = tuple(a if isinstance(a, AspectSpec) else AspectSpec(*a) for a in self.aspects)
        if not aspects:
            raise ShapeError("a multilayer shape needs at least one aspect")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "aspects", aspects)

    @classmethod
    def temporal(cls, n: int, l: int) -> "MultilayerShape":
        return cls(n, (AspectSpec(l, ordered=True),))

    @classmethod
    def multiplex(cls, n: int, l: int) -> "MultilayerShape":
        return cls(n, (AspectSpec(l, ordered=False),))

    @property
    def d(self) -> int:
        return len(self.aspects)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.aspects)

    @property
    def n_layers(self) -> int:
        return int(np.prod(self.sizes))

    @property
    def n_state_nodes(self) -> int:
        return self.n * self.n_layers

    @property
    def ordered_aspects(self) -> tuple[int, ...]:
        return tuple(a for a, spec in enumerate(self.aspects) if spec.ordered)

    @property
    def fully_ordered(self) -> bool:
        return all(a.ordered for a in self.aspects)

    def flatten(self, coords: Sequence[int]) -> int:
        """Flat index of the layer with 1-based coordinates ``coords``."""
        coords = tuple(coords)
        if len(coords) != self.d:
            raise ShapeError(f"expected {self.d} coordinates, got {len(coords)}")
        flat = 0
        for c, size in zip(coords, self.sizes):
            if int(c) != c or not 1 <= c <= size:
                raise ShapeError(f"layer coordinate {c!r} outside 1..{size}")
            flat = flat * size + (int(c) - 1)
        return flat

    def unflatten(self, flat: int) -> tuple[int, ...]:
        """1-based coordinates of flat layer ``flat``."""
        if int(flat) != flat or not 0 <= flat < self.n_layers:
            raise ShapeError(f"flat layer index {flat!r} outside 0..{self.n_layers - 1}")
        flat = int(flat)
        coords = []
        for size in reversed(self.sizes):
            flat, rem = divmod(flat, size)
            coords.append(rem + 1)
        return tuple(reversed(coords))

    def layer_coords(self) -> np.ndarray:
        """Array of shape ``(l, d)`` with 1-based coordinates of every layer."""
        grids = itertools.product(*(range(1, s + 1) for s in self.sizes))
        return np.array(list(grids), dtype=np.int64).reshape(self.n_layers, self.d)

    def precedes(self, a: int, b: int) -> bool:
        """Partial order on flat layers: ``a <= b`` on every ordered aspect."""
        ca, cb = self.unflatten(a), self.unflatten(b)
        return all(ca[k] <= cb[k] for k in self.ordered_aspects)

    def check_layer(self, layer: int) -> int:
        if int(layer) != layer or not 0 <= layer < self.n_layers:
            raise ShapeError(f"layer {layer!r} outside 0..{self.n_layers - 1}")
        return int(layer)

    def check_node(self, node: int) -> int:
        if int(node) != node or not 0 <= node < self.n:
            raise ShapeError(f"node {node!r} outside 0..{self.n - 1}")
        return int(node)


def flatten_layer(shape: MultilayerShape, coords: Sequence[int]) -> int:
    return shape.flatten(coords)


def unflatten_layer(shape: MultilayerShape, flat: int) -> tuple[int, ...]:
    return shape.unflatten(flat)


def layer_partial_order_rank(shape: MultilayerShape) -> list[int]:
    """Deterministic update order of flat layers that respects the partial order.

    Layers are sorted lexicographically by their ordered coordinates, ties
    broken by flat index. A lexicographic order is a linear extension of the
    componentwise order, so no layer is ever emitted after a layer it precedes.
    """
    coords = shape.layer_coords()
    ordered = list(shape.ordered_aspects)
    keys = [tuple(coords[f, ordered]) + (f,) for f in range(shape.n_layers)]
    return [k[-1] for k in sorted(keys)]


class StateNode(NamedTuple):
    node: int
    layer: int


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class MultilayerPartition:
    """Partition tensor: ``labels[layer, node]`` is a positive community label."""

    def __init__(self, shape: MultilayerShape, labels):
        labels = np.asarray(labels)
        if labels.shape != (shape.n_layers, shape.n):
            raise ShapeError(
                f"labels must have shape (l, n) = {(shape.n_layers, shape.n)}, got {labels.shape}"
            )
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == np.round(labels)):
                raise ValueError("community labels must be integers")
        labels = labels.astype(np.int64)
        if labels.size and labels.min() < 1:
            raise ValueError("community labels must be positive")
        self.shape = shape
        self.labels = _frozen(labels)

    def __getitem__(self, state: tuple[int, int]) -> int:
        node, layer = state
        return int(self.labels[layer, node])

    def __eq__(self, other):
        if not isinstance(other, MultilayerPartition):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.labels, other.labels)

    def __repr__(self):
        return f"MultilayerPartition(n={self.shape.n}, l={self.shape.n_layers}, c={self.n_communities})"

    @property
    def n_communities(self) -> int:
        return int(np.unique(self.labels).size)

    def induced(self, layer: int) -> np.ndarray:
        """Labels of all ``n`` nodes in ``layer`` (the induced partition)."""
        return self.labels[self.shape.check_layer(layer)]

    def community_sizes(self, layer: int) -> dict[int, int]:
        vals, counts = np.unique(self.induced(layer), return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))

    def with_labels(self, labels) -> "MultilayerPartition":
        return MultilayerPartition(self.shape, labels)


def induced_partition(S: MultilayerPartition, layer: int) -> dict[int, int]:
    """Restriction of ``S`` to ``layer`` as a ``node -> label`` mapping."""
    return {i: int(s) for i, s in enumerate(S.induced(layer))}


class InterlayerDependencyTensor:
    """Sparse node-level copying probabilities ``P[(i, a) -> (j, b)]``.

    Stored as parallel arrays of triplets. Entries within one layer are
    rejected, as is any target whose total incoming mass exceeds one.
    """

    def __init__(self, shape: MultilayerShape, entries: Iterable[tuple[StateNode, StateNode, float]]):
        src_n, src_l, tgt_n, tgt_l, w = [], [], [], [], []
        for (si, sa), (tj, tb), weight in entries:
            shape.check_node(si), shape.check_node(tj)
            shape.check_layer(sa), shape.check_layer(tb)
            if sa == tb:
                raise DependencyError(f"copying within layer {sa} is not allowed")
            if not 0.0 < weight <= 1.0:
                raise DependencyError(f"copy weight must be in (0, 1], got {weight}")
            src_n.append(si), src_l.append(sa), tgt_n.append(tj), tgt_l.append(tb), w.append(weight)
        self.shape = shape
        self.src_node = _frozen(np.array(src_n, dtype=np.int64))
        self.src_layer = _frozen(np.array(src_l, dtype=np.int64))
        self.tgt_node = _frozen(np.array(tgt_n, dtype=np.int64))
        self.tgt_layer = _frozen(np.array(tgt_l, dtype=np.int64))
        self.weight = _frozen(np.array(w, dtype=float))
        mass = self.incoming_mass()
        bad = np.argwhere(mass > 1.0 + PROB_TOL)
        if bad.size:
            b, j = bad[0]
            raise DependencyError(
                f"incoming copy mass {mass[b, j]:.6g} > 1 for state node (node {j}, layer {b})"
            )
        self._incoming = None

    def __len__(self):
        return int(self.weight.size)

    def incoming_mass(self) -> np.ndarray:
        """``p_hat`` for every state node, shape ``(l, n)``."""
        mass = np.zeros((self.shape.n_layers, self.shape.n))
        np.add.at(mass, (self.tgt_layer, self.tgt_node), self.weight)
        return mass

    def incoming(self, target: StateNode) -> list[tuple[StateNode, float]]:
        """Copy sources of ``target`` in ascending (layer, node) order."""
        if self._incoming is None:
            table: dict[tuple[int, int], list] = {}
            order = np.lexsort((self.src_node, self.src_layer))
            for k in order:
                key = (int(self.tgt_node[k]), int(self.tgt_layer[k]))
                src = StateNode(int(self.src_node[k]), int(self.src_layer[k]))
                table.setdefault(key, []).append((src, float(self.weight[k])))
            self._incoming = table
        return self._incoming.get((int(target[0]), int(target[1])), [])

    def to_dense(self) -> np.ndarray:
        """Flattened ``(n*l, n*l)`` matrix, state node ``(i, a)`` at ``a*n + i``."""
        n = self.shape.n
        N = self.shape.n_state_nodes
        dense = np.zeros((N, N))
        np.add.at(dense, (self.src_layer * n + self.src_node, self.tgt_layer * n + self.tgt_node), self.weight)
        return dense


class LayerDependencyTensor:
    """Layer-coupled copying probabilities ``matrix[source_layer, target_layer]``."""

    def __init__(self, shape: MultilayerShape, matrix):
        matrix = np.array(matrix, dtype=float)
        l = shape.n_layers
        if matrix.shape != (l, l):
            raise ShapeError(f"layer dependency matrix must be {l}x{l}, got {matrix.shape}")
        if np.any(matrix < 0) or np.any(matrix > 1):
            raise DependencyError("copying probabilities must lie in [0, 1]")
        if np.any(np.diag(matrix) != 0):
            raise DependencyError("layer dependency matrix must have a zero diagonal")
        mass = matrix.sum(axis=0)
        bad = np.flatnonzero(mass > 1.0 + PROB_TOL)
        if bad.size:
            b = int(bad[0])
            raise DependencyError(
                f"incoming copy mass {mass[b]:.6g} > 1 for layer {shape.unflatten(b)}"
            )
        self.shape = shape
        self.matrix = _frozen(matrix)

    def __eq__(self, other):
        if not isinstance(other, LayerDependencyTensor):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        return f"LayerDependencyTensor(l={self.shape.n_layers}, nnz={np.count_nonzero(self.matrix)})"

    def incoming_mass(self) -> np.ndarray:
        """``p_hat`` per target layer."""
        return self.matrix.sum(axis=0)

    def sources(self, target: int) -> tuple[np.ndarray, np.ndarray]:
        """Source layers (ascending) and weights copying into ``target``."""
        col = self.matrix[:, target]
        src = np.flatnonzero(col)
        return src, col[src]

    def expand(self) -> InterlayerDependencyTensor:
        """Node-level tensor with ``P[(i,a)->(j,b)] = delta(i,j) * matrix[a,b]``."""
        src_l, tgt_l = np.nonzero(self.matrix)
        entries = [
            (StateNode(i, int(a)), StateNode(i, int(b)), float(self.matrix[a, b]))
            for a, b in zip(src_l, tgt_l)
            for i in range(self.shape.n)
        ]
        return InterlayerDependencyTensor(self.shape, entries)


@dataclass(frozen=True)
class MultilayerNetwork:
    """Edge list over state nodes.

    Undirected edges are stored once with ``(src_layer, src_node) <
    (tgt_layer, tgt_node)``. Self-loops and duplicate edges are rejected.
    """

    shape: MultilayerShape
    src_node: np.ndarray
    src_layer: np.ndarray
    tgt_node: np.ndarray
    tgt_layer: np.ndarray
    weight: np.ndarray = None
    directed: bool = False

    def __post_init__(self):
        arrays = [np.asarray(getattr(self, k), dtype=np.int64).ravel()
                  for k in ("src_node", "src_layer", "tgt_node", "tgt_layer")]
        m = arrays[0].size
        if any(a.size != m for a in arrays):
            raise ValueError("edge arrays must have equal length")
        weight = np.ones(m) if self.weight is None else np.asarray(self.weight, dtype=float).ravel()
        if weight.size != m:
            raise ValueError("weight array must match edge count")
        si, sa, tj, tb = arrays
        if m:
            if si.min() < 0 or tj.min() < 0 or max(si.max(), tj.max()) >= self.shape.n:
                raise ShapeError("edge endpoint node out of range")
            if sa.min() < 0 or tb.min() < 0 or max(sa.max(), tb.max()) >= self.shape.n_layers:
                raise ShapeError("edge endpoint layer out of range")
        if np.any((si == tj) & (sa == tb)):
            raise ValueError("self-loops are not allowed")
        if not self.directed:
            swap = (sa > tb) | ((sa == tb) & (si > tj))
            si, tj = np.where(swap, tj, si), np.where(swap, si, tj)
            sa, tb = np.where(swap, tb, sa), np.where(swap, sa, tb)
        order = np.lexsort((tj, si, tb, sa))
        si, sa, tj, tb, weight = si[order], sa[order], tj[order], tb[order], weight[order]
        if m > 1:
            same = (np.diff(si) == 0) & (np.diff(sa) == 0) & (np.diff(tj) == 0) & (np.diff(tb) == 0)
            if same.any():
                raise ValueError("duplicate edges are not allowed")
        for name, arr in zip(("src_node", "src_layer", "tgt_node", "tgt_layer", "weight"),
                             (si, sa, tj, tb, weight)):
            object.__setattr__(self, name, _frozen(arr))

    @property
    def n_edges(self) -> int:
        return int(self.src_node.size)

    @property
    def intralayer(self) -> np.ndarray:
        """Boolean mask of intralayer edges (E_L); the rest are interlayer (E_C)."""
        return self.src_layer == self.tgt_layer

    def layer_edges(self, layer: int) -> tuple[np.ndarray, np.ndarray]:
        mask = (self.src_layer == layer) & (self.tgt_layer == layer)
        return self.src_node[mask], self.tgt_node[mask]

    def out_degrees(self, toward: int) -> np.ndarray:
        """Layer-``toward``-specific out-degree of every state node, shape ``(l, n)``."""
        k = np.zeros((self.shape.n_layers, self.shape.n))
        mask = self.tgt_layer == toward
        np.add.at(k, (self.src_layer[mask], self.src_node[mask]), self.weight[mask])
        if not self.directed:
            mask = self.src_layer == toward
            np.add.at(k, (self.tgt_layer[mask], self.tgt_node[mask]), self.weight[mask])
        return k

    def in_degrees(self, source: int) -> np.ndarray:
        """Layer-``source``-specific in-degree of every state node, shape ``(l, n)``."""
        if not self.directed:
            return self.out_degrees(source)
        k = np.zeros((self.shape.n_layers, self.shape.n))
        mask = self.src_layer == source
        np.add.at(k, (self.tgt_layer[mask], self.tgt_node[mask]), self.weight[mask])
        return k

    def intralayer_degrees(self) -> np.ndarray:
        """Intralayer degree of every state node, shape ``(l, n)`` (out-degree if directed)."""
        k = np.zeros((self.shape.n_layers, self.shape.n))
        mask = self.intralayer
        np.add.at(k, (self.src_layer[mask], self.src_node[mask]), self.weight[mask])
        if not self.directed:
            np.add.at(k, (self.tgt_layer[mask], self.tgt_node[mask]), self.weight[mask])
        return k

    def supra_adjacency(self) -> sp.csr_matrix:
        """Flattened adjacency, state node ``(i, a)`` at row ``a*n + i``."""
        n = self.shape.n
        N = self.shape.n_state_nodes
        rows = self.src_layer * n + self.src_node
        cols = self.tgt_layer * n + self.tgt_node
        if not self.directed:
            rows, cols = np.concatenate([rows, cols]), np.concatenate([cols, rows])
            data = np.concatenate([self.weight, self.weight])
        else:
            data = self.weight
        return sp.csr_matrix((data, (rows, cols)), shape=(N, N))

    def __eq__(self, other):
        if not isinstance(other, MultilayerNetwork):
            return NotImplemented
        return (self.shape == other.shape and self.directed == other.directed
                and all(np.array_equal(getattr(self, k), getattr(other, k))
                        for k in ("src_node", "src_layer", "tgt_node", "tgt_layer", "weight")))

    @classmethod
    def from_layer_edges(cls, shape: MultilayerShape, per_layer: dict[int, tuple], directed=False):
        """Build an intralayer network from ``{layer: (i_array, j_array)}``."""
        si, sa, tj = [], [], []
        for layer, (i, j) in per_layer.items():
            i = np.asarray(i, dtype=np.int64)
            si.append(i), tj.append(np.asarray(j, dtype=np.int64))
            sa.append(np.full(i.size, layer, dtype=np.int64))
        if not si:
            empty = np.zeros(0, dtype=np.int64)
            return cls(shape, empty, empty, empty, empty, directed=directed)
        sa = np.concatenate(sa)
        return cls(shape, np.concatenate(si), sa, np.concatenate(tj), sa.copy(), directed=directed)
