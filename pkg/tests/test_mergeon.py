"""Exact mergeons: bottleneck levels, the discretization oracle, cluster trees."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from graphtree import (
    BlockMergeMatrix,
    BlockPartition,
    StepGraphon,
    MeasurePreservingMap,
    ValidationError,
    cluster_tree_of,
    clusters_at_level,
    discretization_oracle,
    induced_merge_height,
    merge_distortion,
    merge_estimate,
    mergeon_eval,
    mergeon_eval_matrix,
    step_mergeon,
)
from graphtree.experiments import three_group_graphon
from conftest import random_step_graphon, random_symmetric, step_graphons
import reference

CHAIN = StepGraphon(
    BlockPartition((0.0, 0.25, 0.5, 1.0)),
    np.array([[0.9, 0.6, 0.2], [0.6, 0.9, 0.4], [0.2, 0.4, 0.9]]),
)

# merge levels of three_group_graphon, worked out by hand from the bottleneck
# rule: groups {0,1}, {2,3}, {4}; the 0.5 link sits between blocks 1 and 2
THREE_GROUP_LEVELS = np.array(
    [
        [0.7, 0.7, 0.5, 0.5, 0.1],
        [0.7, 0.7, 0.5, 0.5, 0.1],
        [0.5, 0.5, 0.7, 0.7, 0.1],
        [0.5, 0.5, 0.7, 0.7, 0.1],
        [0.1, 0.1, 0.1, 0.1, 0.7],
    ]
)


class TestStepMergeon:
    def test_constant(self):
        w = StepGraphon(BlockPartition((0.0, 1.0)), np.array([[0.4]]))
        assert np.array_equal(step_mergeon(w).levels, [[0.4]])

    def test_chain_bottleneck(self):
        got = step_mergeon(CHAIN).levels
        want = np.array([[0.9, 0.6, 0.4], [0.6, 0.9, 0.4], [0.4, 0.4, 0.9]])
        assert np.array_equal(got, want)

    def test_three_group(self):
        got = step_mergeon(three_group_graphon()).levels
        assert np.array_equal(got, THREE_GROUP_LEVELS)

    @given(step_graphons())
    def test_off_diagonal_matches_path_enumeration(self, w):
        levels = step_mergeon(w).levels
        k = w.k
        for a in range(k):
            for b in range(a + 1, k):
                assert levels[a, b] == reference.maxmin_simple_paths(w.values, a, b)

    @given(step_graphons())
    def test_diagonal_rule(self, w):
        levels = step_mergeon(w).levels
        for a in range(w.k):
            assert levels[a, a] == max(w.values[a])

    @given(step_graphons(max_blocks=5), st.sampled_from([2, 3]))
    @settings(max_examples=40)
    def test_matches_discretization_oracle(self, w, m):
        assert np.array_equal(step_mergeon(w).levels, discretization_oracle(w, m).levels)

    @given(step_graphons(max_blocks=4))
    @settings(max_examples=20)
    def test_oracle_m_independent(self, w):
        assert np.array_equal(
            discretization_oracle(w, 2).levels, discretization_oracle(w, 3).levels
        )

    def test_oracle_constant(self):
        w = StepGraphon(BlockPartition((0.0, 1.0)), np.array([[0.4]]))
        assert np.array_equal(discretization_oracle(w, 2).levels, [[0.4]])

    def test_oracle_rejects_small_m(self):
        with pytest.raises(ValueError):
            discretization_oracle(CHAIN, 1)

    @given(step_graphons())
    def test_invariants(self, w):
        lv = step_mergeon(w).levels
        k = w.k
        assert np.array_equal(lv, lv.T)
        assert lv.min() >= 0.0 and lv.max() <= 1.0
        # every level is a max/min selection of input values, so the
        # ultrametric and dominance inequalities hold exactly in floats
        for a in range(k):
            for b in range(k):
                if a != b:
                    assert lv[a, a] >= lv[a, b]
                for c in range(k):
                    assert lv[a, b] >= min(lv[a, c], lv[c, b])


class TestBlockMergeMatrix:
    def test_validation(self):
        p = BlockPartition((0.0, 0.5, 1.0))
        with pytest.raises(ValidationError):
            BlockMergeMatrix(p, np.array([[0.5, 0.2], [0.3, 0.5]]))
        with pytest.raises(ValidationError):
            BlockMergeMatrix(p, np.array([[1.5, 0.2], [0.2, 0.5]]))
        with pytest.raises(ValidationError):
            BlockMergeMatrix(p, np.array([[0.5]]))

    def test_to_dict(self):
        m = step_mergeon(CHAIN)
        d = m.to_dict()
        assert d["breakpoints"] == [0.0, 0.25, 0.5, 1.0]
        assert d["levels"][0] == [0.9, 0.6, 0.4]
        json.dumps(d)


class TestClusterTree:
    def test_three_group_tree(self):
        tree = cluster_tree_of(BlockMergeMatrix(
            three_group_graphon().partition, THREE_GROUP_LEVELS
        ))
        got = [(e.level, e.clusters) for e in tree.entries]
        assert got == [
            (0.7, [[0, 1], [2, 3], [4]]),
            (0.5, [[0, 1, 2, 3], [4]]),
            (0.1, [[0, 1, 2, 3, 4]]),
        ]

    def test_single_block(self):
        w = StepGraphon(BlockPartition((0.0, 1.0)), np.array([[0.4]]))
        tree = cluster_tree_of(step_mergeon(w))
        assert [(e.level, e.clusters) for e in tree.entries] == [(0.4, [[0]])]

    def test_disconnected(self):
        p = BlockPartition((0.0, 0.5, 1.0))
        m = BlockMergeMatrix(p, np.array([[1.0, 0.0], [0.0, 1.0]]))
        tree = cluster_tree_of(m)
        assert [(e.level, e.clusters) for e in tree.entries] == [
            (1.0, [[0], [1]]),
            (0.0, [[0, 1]]),
        ]

    @given(step_graphons())
    def test_hierarchy_invariant(self, w):
        tree = cluster_tree_of(step_mergeon(w))
        for entry in tree.entries:
            flat = [b for c in entry.clusters for b in c]
            assert len(flat) == len(set(flat))
        for upper, lower in zip(tree.entries, tree.entries[1:]):
            for cu in upper.clusters:
                hosts = [cl for cl in lower.clusters if set(cu) <= set(cl)]
                assert len(hosts) == 1

    @given(step_graphons())
    def test_matches_component_reference(self, w):
        merge = step_mergeon(w)
        lv = merge.levels
        tree = cluster_tree_of(merge)
        for entry in tree.entries:
            alive = [a for a in range(w.k) if lv[a, a] >= entry.level]
            sub = lv[np.ix_(alive, alive)]
            want = [
                sorted(alive[i] for i in comp)
                for comp in reference.components_at_level(sub, entry.level)
            ]
            assert entry.clusters == sorted(want)

    def test_json(self):
        tree = cluster_tree_of(step_mergeon(CHAIN))
        doc = json.loads(tree.to_json())
        assert doc[0]["level"] == 0.9


class TestMergeonEval:
    def test_constant(self):
        w = StepGraphon(BlockPartition((0.0, 1.0)), np.array([[0.4]]))
        m = step_mergeon(w)
        assert mergeon_eval(m, 0.1, 0.9) == 0.4

    def test_three_group_points(self):
        m = step_mergeon(three_group_graphon())
        assert mergeon_eval(m, 0.1, 0.9) == 0.1  # group 1 vs group 3
        assert mergeon_eval(m, 0.05, 0.1) == 0.7  # same block
        assert mergeon_eval(m, 0.1, 0.5) == 0.5  # group 1 vs group 2

    def test_symmetry_and_domain(self):
        m = step_mergeon(CHAIN)
        assert mergeon_eval(m, 0.1, 0.8) == mergeon_eval(m, 0.8, 0.1)
        with pytest.raises(ValueError):
            mergeon_eval(m, -0.5, 0.5)

    def test_eval_matrix(self):
        m = step_mergeon(CHAIN)
        pts = np.array([0.1, 0.3, 0.9, 0.3])
        got = mergeon_eval_matrix(m, pts)
        for i, x in enumerate(pts):
            for j, y in enumerate(pts):
                want = 1.0 if i == j else mergeon_eval(m, float(x), float(y))
                assert got[i, j] == want


class TestInducedMergeHeight:
    def test_two_element_cluster(self):
        mvals = random_symmetric(np.random.default_rng(0), 4)
        assert induced_merge_height([[0, 1]], mvals, 0, 1) == mvals[0, 1]

    def test_min_over_pairs(self):
        mvals = np.ones((4, 4))
        mvals[1, 2] = mvals[2, 1] = 0.5
        mvals[1, 3] = mvals[3, 1] = 0.4
        mvals[2, 3] = mvals[3, 2] = 0.45
        assert induced_merge_height([[1, 2, 3]], mvals, 1, 2) == 0.4

    def test_smallest_common_cluster_wins(self):
        mvals = np.ones((4, 4))
        mvals[0, 1] = mvals[1, 0] = 0.9
        mvals[2, 3] = mvals[3, 2] = 0.2
        clusters = [[0, 1], [0, 1, 2, 3]]
        assert induced_merge_height(clusters, mvals, 0, 1) == 0.9
        assert induced_merge_height(clusters, mvals, 0, 2) == 0.2

    def test_errors(self):
        mvals = np.ones((3, 3))
        with pytest.raises(ValueError):
            induced_merge_height([[0, 1]], mvals, 0, 0)
        with pytest.raises(ValueError):
            induced_merge_height([[0, 1]], mvals, 0, 2)

    def test_fixed_point_of_own_tree(self):
        rng = np.random.default_rng(3)
        m = merge_estimate(random_symmetric(rng, 6))
        levels = sorted({m[i, j] for i in range(6) for j in range(i + 1, 6)})
        hierarchy = []
        for lam in levels:
            hierarchy.extend(clusters_at_level(m, lam))
        for i in range(6):
            for j in range(i + 1, 6):
                assert induced_merge_height(hierarchy, m, i, j) == m[i, j]


class TestMergeDistortion:
    def test_identity(self):
        x = random_symmetric(np.random.default_rng(1), 5)
        assert merge_distortion(x, x) == 0.0

    def test_constant_offset(self):
        assert merge_distortion(np.full((3, 3), 0.5), np.full((3, 3), 0.3)) == 0.2

    def test_matches_pair_loop(self):
        rng = np.random.default_rng(2)
        a, b = random_symmetric(rng, 4), random_symmetric(rng, 4)
        want = max(abs(a[i, j] - b[i, j]) for i in range(4) for j in range(4) if i != j)
        assert merge_distortion(a, b) == want

    def test_diagonal_ignored(self):
        a = np.zeros((3, 3))
        b = np.zeros((3, 3))
        np.fill_diagonal(b, 1.0)
        assert merge_distortion(a, b) == 0.0

    def test_errors(self):
        with pytest.raises(ValueError):
            merge_distortion(np.zeros((3, 3)), np.zeros((4, 4)))
        with pytest.raises(ValueError):
            merge_distortion(np.zeros((1, 1)), np.zeros((1, 1)))

    def test_induced_heights_within_twice_noise(self):
        # single-linkage trees built from a perturbed matrix distort true
        # merge heights by less than twice the perturbation bound; the bound
        # needs mvals to be genuine merge heights (an ultrametric), so draw
        # them from a random graphon's mergeon, not an arbitrary matrix
        rng = np.random.default_rng(7)
        eps = 0.05
        for _ in range(20):
            n = int(rng.integers(4, 9))
            w = random_step_graphon(rng, max_blocks=5)
            mvals = mergeon_eval_matrix(step_mergeon(w), rng.random(n))
            noise = rng.uniform(-eps, eps, size=(n, n))
            noise = np.triu(noise, 1)
            noise = noise + noise.T
            assert np.abs(noise).max() < eps
            mhat = np.clip(mvals + noise, 0.0, 1.0)
            np.fill_diagonal(mhat, 1.0)
            m = merge_estimate(mhat)
            levels = sorted({m[i, j] for i in range(n) for j in range(i + 1, n)})
            hierarchy = []
            for lam in levels:
                hierarchy.extend(clusters_at_level(m, lam))
            induced = np.ones((n, n))
            for i in range(n):
                for j in range(i + 1, n):
                    induced[i, j] = induced[j, i] = induced_merge_height(
                        hierarchy, mvals, i, j
                    )
            assert merge_distortion(mvals, induced) < 2 * eps


class TestMptInvariance:
    @given(step_graphons(max_blocks=4), st.integers(2, 3))
    @settings(max_examples=25)
    def test_mergeon_commutes_with_pullback(self, w, m):
        phi = MeasurePreservingMap.stretch_mod(m)
        pulled = step_mergeon(w.pullback(phi))
        orig = step_mergeon(w)
        rng = np.random.default_rng(0)
        for x, y in rng.random((50, 2)):
            assert mergeon_eval(pulled, x, y) == mergeon_eval(
                orig, phi.apply(x), phi.apply(y)
            )

    def test_cluster_tree_corresponds_under_preimage(self):
        w = three_group_graphon()
        phi = MeasurePreservingMap.stretch_mod(2)
        wp = w.pullback(phi)
        tree = cluster_tree_of(step_mergeon(w))
        tree_p = cluster_tree_of(step_mergeon(wp))
        # map each pulled-back block to the original block containing its image
        block_map = [
            w.partition.locate(phi.apply(x)) for x in wp.partition.midpoints()
        ]
        assert [e.level for e in tree_p.entries] == [e.level for e in tree.entries]
        for ep, e in zip(tree_p.entries, tree.entries):
            mapped = sorted(
                sorted({block_map[b] for b in cluster}) for cluster in ep.clusters
            )
            # preimage clusters collapse exactly onto the original clusters
            assert sorted(map(sorted, {tuple(c) for c in mapped})) == e.clusters
