"""Config-driven generation: nulls, partition chains, expected degrees, network.

Random streams (all derived from ``config.seed``): ``nulls``,
``partition/chain-k``, ``degrees``, ``edges`` (``edges/mu-i`` in sweeps),
``detector/...`` (see :func:`mlbench.detection.nmi_sweep`).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import BenchmarkConfig
from .core import LayerDependencyTensor, MultilayerNetwork, MultilayerPartition, MultilayerShape
from .detection import nmi_sweep
from .edges import TruncatedPowerLaw, build_dcsbm, sample_expected_degrees, sample_network
from .nulldist import NullSet, build_null_set
from .partitions import sample_partition
from .seeding import substream


@dataclass
class Benchmark:
    shape: MultilayerShape
    dependency: LayerDependencyTensor
    nulls: NullSet
    partitions: list            # one per chain
    degrees: np.ndarray
    network: MultilayerNetwork | None = None

    @property
    def planted(self) -> MultilayerPartition:
        return self.partitions[0]


def generate_partitions(config: BenchmarkConfig):
    shape = config.build_shape()
    P = config.build_dependency()
    nulls = build_null_set(shape, config.null_model.n_c, config.null_model.theta, config.support_spec(),
                           substream(config.seed, "nulls"), shared=config.null_model.shared)
    sampler = config.sampler_config()
    rngs = [substream(config.seed, "partition", f"chain-{k}") for k in range(sampler.chains)]
    return shape, P, nulls, sample_partition(P, nulls, shape, sampler, rngs=rngs)


def expected_degrees(config: BenchmarkConfig, shape: MultilayerShape) -> np.ndarray:
    e = config.edges
    dist = TruncatedPowerLaw.from_exponent(e.exponent, e.k_min, e.k_max)
    return sample_expected_degrees(dist, shape, substream(config.seed, "degrees"))


def generate(config: BenchmarkConfig, with_network: bool = True) -> Benchmark:
    shape, P, nulls, partitions = generate_partitions(config)
    degrees = expected_degrees(config, shape)
    bench = Benchmark(shape, P, nulls, partitions, degrees)
    if with_network:
        params = build_dcsbm(bench.planted, degrees, config.edges.mu)
        bench.network = sample_network(params, substream(config.seed, "edges"))
    return bench


def sweep(config: BenchmarkConfig, runs: int | None = None, progress=None):
    """Detector sweep over ``config.sweep``; the planted partition is shared by all mu."""
    if config.sweep is None:
        raise ValueError("sweep: missing section")
    s = config.sweep
    bench = generate(config, with_network=False)

    def make_network(mu, i):
        params = build_dcsbm(bench.planted, bench.degrees, mu)
        return sample_network(params, substream(config.seed, "edges", f"mu-{i}"))

    return nmi_sweep(bench.planted, make_network, s.mu, s.omega, s.rule,
                     runs=s.runs if runs is None else runs, seed=config.seed,
                     topology=s.topology, progress=progress)
