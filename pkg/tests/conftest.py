import numpy as np
import pytest

from linkspectra import GraphBasis, GraphSlice, full_space
from linkspectra.partition import PartitionTree
from linkspectra import synth


@pytest.fixture
def osc_space():
    return synth.oscillating_space()


@pytest.fixture
def fig_basis():
    return GraphBasis(synth.fig_partition(), 3)


@pytest.fixture
def osc_stream():
    return synth.gen_oscillating(32)


def random_tree(m, rng):
    return PartitionTree(rng.permutation(m))


def random_unweighted(space, rng, density=0.4):
    return GraphSlice(space, (rng.random(space.num_relations) < density).astype(float))


def random_weighted(space, rng):
    w = rng.standard_normal(space.num_relations)
    w[space.inert] = 0.0
    return GraphSlice(space, w)


@pytest.fixture
def rng():
    return np.random.default_rng(20240911)


@pytest.fixture
def space16():
    return full_space(4)
