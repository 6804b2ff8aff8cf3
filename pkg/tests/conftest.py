import hypothesis
import hypothesis.strategies as st
import numpy as np

from graphtree import BlockPartition, StepGraphon

hypothesis.settings.register_profile("default", deadline=None)
hypothesis.settings.load_profile("default")

# dyadic grid keeps every breakpoint exactly representable
GRID = [i / 64 for i in range(1, 64)]


@st.composite
def breakpoint_tuples(draw, max_blocks=6):
    k = draw(st.integers(1, max_blocks))
    interior = draw(
        st.lists(st.sampled_from(GRID), min_size=k - 1, max_size=k - 1, unique=True)
    )
    return (0.0, *sorted(interior), 1.0)


@st.composite
def step_graphons(draw, max_blocks=6):
    bps = draw(breakpoint_tuples(max_blocks=max_blocks))
    k = len(bps) - 1
    tri = draw(
        st.lists(st.integers(0, 10), min_size=k * (k + 1) // 2, max_size=k * (k + 1) // 2)
    )
    v = np.zeros((k, k))
    pos = 0
    for i in range(k):
        for j in range(i, k):
            v[i, j] = v[j, i] = tri[pos] / 10
            pos += 1
    return StepGraphon(BlockPartition(bps), v)


def random_step_graphon(rng, max_blocks=6):
    """Plain-rng twin of the strategy, for high-count acceptance loops."""
    k = int(rng.integers(1, max_blocks + 1))
    interior = np.sort(rng.choice(np.arange(1, 64), size=k - 1, replace=False)) / 64
    bps = (0.0, *interior, 1.0)
    v = rng.integers(0, 11, size=(k, k)) / 10
    v = np.triu(v)
    v = v + np.triu(v, 1).T
    return StepGraphon(BlockPartition(bps), v)


def random_symmetric(rng, n, lo=0.0, hi=1.0, diag=1.0):
    v = rng.uniform(lo, hi, size=(n, n))
    v = np.triu(v, 1)
    v = v + v.T
    np.fill_diagonal(v, diag)
    return v


def random_adjacency(rng, n, p=0.5):
    u = np.triu(rng.random((n, n)) < p, 1).astype(np.int8)
    return u | u.T
