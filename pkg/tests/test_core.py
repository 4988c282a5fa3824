import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mlbench.core import (
    DependencyError,
    InterlayerDependencyTensor,
    LayerDependencyTensor,
    MultilayerNetwork,
    MultilayerPartition,
    MultilayerShape,
    ShapeError,
    StateNode,
    induced_partition,
    layer_partial_order_rank,
)

aspects = st.lists(st.tuples(st.integers(1, 4), st.booleans()), min_size=1, max_size=3)


def test_flatten_examples():
    shape = MultilayerShape(3, ((2, False), (3, False)))
    assert shape.flatten((1, 1)) == 0
    assert shape.flatten((2, 3)) == 5
    assert shape.unflatten(shape.flatten((1, 2))) == (1, 2)


@given(aspects)
def test_flatten_round_trip(asp):
    shape = MultilayerShape(2, tuple(asp))
    for f in range(shape.n_layers):
        assert shape.flatten(shape.unflatten(f)) == f
    assert np.array_equal(shape.layer_coords(), [shape.unflatten(f) for f in range(shape.n_layers)])


def test_flatten_out_of_range():
    shape = MultilayerShape(3, ((2, False), (3, False)))
    with pytest.raises(ShapeError):
        shape.flatten((3, 1))
    with pytest.raises(ShapeError):
        shape.flatten((1,))
    with pytest.raises(ShapeError):
        shape.unflatten(6)


def test_order_total_for_single_ordered_aspect():
    assert layer_partial_order_rank(MultilayerShape.temporal(1, 4)) == [0, 1, 2, 3]


def test_order_time_before_platform():
    # aspects (ordered time, unordered platform)
    shape = MultilayerShape(1, ((2, True), (2, False)))
    order = layer_partial_order_rank(shape)
    times = [shape.unflatten(f)[0] for f in order]
    assert times == sorted(times)


@given(aspects)
def test_order_is_linear_extension(asp):
    shape = MultilayerShape(1, tuple(asp))
    order = layer_partial_order_rank(shape)
    assert sorted(order) == list(range(shape.n_layers))
    pos = {f: k for k, f in enumerate(order)}
    for a, b in itertools.permutations(range(shape.n_layers), 2):
        strictly_before = shape.precedes(a, b) and not shape.precedes(b, a)
        if strictly_before:
            assert pos[a] < pos[b]


def test_partition_validation():
    shape = MultilayerShape.temporal(3, 2)
    with pytest.raises(ValueError):
        MultilayerPartition(shape, np.zeros((2, 3), dtype=int))
    with pytest.raises(ShapeError):
        MultilayerPartition(shape, np.ones((3, 2), dtype=int))
    S = MultilayerPartition(shape, [[1, 2, 3], [1, 1, 1]])
    assert S[2, 0] == 3 and S[2, 1] == 1
    assert induced_partition(S, 0) == {0: 1, 1: 2, 2: 3}
    assert S.community_sizes(1) == {1: 3}
    with pytest.raises(ValueError):
        S.labels[0, 0] = 5


def test_induced_partitions_recover_S(rng):
    shape = MultilayerShape.temporal(5, 2)
    labels = rng.integers(1, 4, size=(2, 5))
    S = MultilayerPartition(shape, labels)
    rebuilt = np.array([[induced_partition(S, a)[i] for i in range(5)] for a in range(2)])
    assert np.array_equal(rebuilt, labels)


def test_interlayer_tensor_rejects_bad_entries():
    shape = MultilayerShape.multiplex(2, 3)
    with pytest.raises(DependencyError):
        InterlayerDependencyTensor(shape, [(StateNode(0, 1), StateNode(1, 1), 0.5)])
    with pytest.raises(DependencyError):
        InterlayerDependencyTensor(shape, [(StateNode(0, 0), StateNode(0, 2), 0.7),
                                           (StateNode(1, 1), StateNode(0, 2), 0.4)])
    P = InterlayerDependencyTensor(shape, [(StateNode(1, 1), StateNode(0, 2), 0.4),
                                           (StateNode(0, 0), StateNode(0, 2), 0.6)])
    srcs = P.incoming(StateNode(0, 2))
    assert [s for s, _ in srcs] == [StateNode(0, 0), StateNode(1, 1)]
    assert P.incoming_mass()[2, 0] == pytest.approx(1.0)


def test_layer_tensor_invariants():
    shape = MultilayerShape.multiplex(2, 3)
    with pytest.raises(DependencyError):
        LayerDependencyTensor(shape, np.eye(3) * 0.5)
    with pytest.raises(DependencyError, match="layer"):
        LayerDependencyTensor(shape, [[0, 0.5, 0.7], [0.5, 0, 0.7], [0, 0, 0]])
    P = LayerDependencyTensor(shape, [[0, 0.5, 0], [0.5, 0, 0], [0, 0, 0]])
    dense = P.expand().to_dense()
    # node i of layer 0 copies into node i of layer 1 only
    assert dense[0 * 2 + 1, 1 * 2 + 1] == 0.5 and dense[0, 1 * 2 + 1] == 0


def test_network_canonical_and_degrees():
    shape = MultilayerShape.temporal(3, 2)
    net = MultilayerNetwork(shape, [2, 0], [0, 1], [1, 2], [0, 1])
    assert list(net.src_node) == [1, 0] and list(net.tgt_node) == [2, 2]
    k = net.intralayer_degrees()
    assert k.tolist() == [[0, 1, 1], [1, 0, 1]]
    A = net.supra_adjacency()
    assert (A != A.T).nnz == 0
    with pytest.raises(ValueError):
        MultilayerNetwork(shape, [0, 1], [0, 0], [1, 0], [0, 0])
    with pytest.raises(ValueError):
        MultilayerNetwork(shape, [0], [0], [0], [0])


@given(st.integers(0, 2 ** 32 - 1))
def test_network_from_layer_edges_matches_edges(seed):
    rng = np.random.default_rng(seed)
    shape = MultilayerShape.temporal(6, 2)
    per_layer = {}
    for a in range(2):
        pairs = [p for p in itertools.combinations(range(6), 2) if rng.random() < 0.3]
        if pairs:
            i, j = np.array(pairs).T
            per_layer[a] = (j, i)   # reversed order on purpose
    net = MultilayerNetwork.from_layer_edges(shape, per_layer)
    for a in range(2):
        i, j = net.layer_edges(a)
        assert np.all(i < j)
        expected = sorted(zip(*per_layer[a][::-1])) if a in per_layer else []
        assert list(zip(i.tolist(), j.tolist())) == [tuple(map(int, e)) for e in expected]
