import numpy as np
import pytest
from hypothesis import given, strategies as st

from mlbench.core import MultilayerPartition, MultilayerShape
from mlbench.metrics import mean_nmi_by_distance, nmi_joint, pairwise_layer_nmi, per_layer_mean_nmi
from oracles import nmi_bruteforce, set_partitions

labels = st.lists(st.integers(1, 5), min_size=1, max_size=30)


def test_nmi_examples():
    assert nmi_joint([1, 1, 2, 2], [3, 3, 1, 1]) == 1.0
    assert nmi_joint([1, 1, 2, 2], [1, 2, 1, 2]) == pytest.approx(0.0, abs=1e-15)
    assert nmi_joint([1, 1, 2, 2], [1, 1, 1, 2]) == pytest.approx(0.207519, abs=1e-6)
    assert nmi_joint([1, 1, 2, 2], [1, 1, 1, 2]) == pytest.approx(nmi_bruteforce([1, 1, 2, 2], [1, 1, 1, 2]), abs=1e-12)
    assert nmi_joint([4, 4, 4], [2, 2, 2]) == 1.0


def test_nmi_errors():
    with pytest.raises(ValueError):
        nmi_joint([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        nmi_joint([], [])
    with pytest.raises(ValueError):
        nmi_joint({0: 1, 1: 2}, {0: 1, 2: 2})
    assert nmi_joint({0: 1, 1: 2}, {1: 5, 0: 7}) == 1.0


def test_nmi_exhaustive_six_nodes():
    parts = list(set_partitions(6))
    assert len(parts) == 203
    worst = 0.0
    for a in parts:
        for b in parts:
            value = nmi_joint(a, b)
            worst = max(worst, abs(value - nmi_bruteforce(a, b)))
            assert (value == 1.0) == (a == b)
    assert worst <= 1e-12


@given(labels, st.integers(0, 2 ** 32 - 1))
def test_nmi_properties(a, seed):
    rng = np.random.default_rng(seed)
    a = np.array(a)
    b = rng.integers(1, 4, size=a.size)
    perm = rng.permutation(10) + 1
    v = nmi_joint(a, b)
    assert 0 <= v <= 1
    assert v == pytest.approx(nmi_joint(perm[a - 1], b), abs=1e-12)
    assert v == pytest.approx(nmi_joint(b, a), abs=1e-12)
    assert nmi_joint(a, perm[a - 1]) == 1.0


def test_per_layer_examples(rng):
    shape = MultilayerShape.temporal(8, 3)
    planted = MultilayerPartition(shape, rng.integers(1, 4, size=(3, 8)))
    s = per_layer_mean_nmi(planted, planted)
    assert np.all(s.per_layer == 1) and s.mean == 1
    perm = np.array([3, 1, 2])
    s = per_layer_mean_nmi(planted, [planted.with_labels(perm[planted.labels - 1]), planted])
    assert s.mean == 1 and s.per_run.shape == (2, 3)
    one = MultilayerPartition(shape, np.ones((3, 8), dtype=int))
    singletons = MultilayerPartition(shape, np.tile(np.arange(1, 9), (3, 1)))
    assert np.allclose(per_layer_mean_nmi(one, singletons).per_layer, 0)
    with pytest.raises(ValueError):
        per_layer_mean_nmi(planted, MultilayerPartition(MultilayerShape.temporal(8, 2), np.ones((2, 8), dtype=int)))


@given(st.integers(0, 2 ** 32 - 1))
def test_pairwise_symmetric(seed):
    rng = np.random.default_rng(seed)
    S = MultilayerPartition(MultilayerShape.temporal(10, 4), rng.integers(1, 4, size=(4, 10)))
    M = pairwise_layer_nmi(S)
    assert np.array_equal(M, M.T) and np.all(np.diag(M) == 1)
    assert np.all((M >= 0) & (M <= 1))


def test_pairwise_constant_layers():
    S = MultilayerPartition(MultilayerShape.temporal(5, 3), np.tile([1, 2, 2, 3, 1], (3, 1)))
    assert np.all(pairwise_layer_nmi(S) == 1)
    assert np.all(mean_nmi_by_distance(pairwise_layer_nmi(S)) == 1)
