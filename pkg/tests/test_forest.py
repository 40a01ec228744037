"""Percolated forests: growth, cluster labeling, and the assembled walk."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srrw.forest import (PercolatedForest, all_clusters_even_probability,
                         assign_and_assemble, cluster_size_walk, clusters,
                         grow, isolated_count, isolated_counts_batch,
                         suffix_isolated_count)
from srrw.groups import StepDistribution, Z2
from srrw.rng import stream
from srrw.sampler import Identity, SrrwConfig

forests = st.integers(min_value=1, max_value=40).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.integers(min_value=0, max_value=10 ** 6),
                 min_size=max(0, n - 1), max_size=max(0, n - 1)),
        st.lists(st.booleans(), min_size=max(0, n - 1),
                 max_size=max(0, n - 1)),
    ))


def build(n, raw_parents, raw_keeps):
    parent = [0, 0] + [1 + r % (j - 1) for j, r in
                       zip(range(2, n + 1), raw_parents)]
    retained = [0, 0] + [1 if k else 0 for k in raw_keeps]
    return PercolatedForest(n=n, parent=parent[: n + 1],
                            retained=retained[: n + 1]).check()


def naive_clusters(forest):
    # reference labeling: walk kept edges upward until a dropped one
    roots = []
    for j in range(1, forest.n + 1):
        v = j
        while forest.retained[v]:
            v = forest.parent[v]
        roots.append(v)
    sizes = {}
    for r in roots:
        sizes[r] = sizes.get(r, 0) + 1
    return roots, sizes


@given(forests)
@settings(max_examples=300, deadline=None)
def test_cluster_labeling_matches_reference(data):
    forest = build(*data)
    stats = clusters(forest)
    roots, sizes = naive_clusters(forest)
    assert stats.root_of[1:] == roots
    assert stats.sizes == sizes
    assert sum(stats.sizes.values()) == forest.n
    assert set(stats.sizes) == {j for j in range(1, forest.n + 1)
                                if not forest.retained[j]}
    assert stats.isolated_count == sum(1 for s in sizes.values() if s == 1)
    assert isolated_count(forest) == stats.isolated_count


@given(forests)
@settings(max_examples=200, deadline=None)
def test_odd_vertex_count_forces_an_odd_cluster(data):
    forest = build(*data)
    if forest.n % 2 == 1:
        assert any(s % 2 == 1 for s in clusters(forest).sizes.values())


def test_grow_structure_and_degenerate_alphas():
    forest = grow(30, 0.6, stream(21, 0)).check()
    assert forest.n == 30

    none_kept = grow(25, 0.0, stream(21, 1))
    assert clusters(none_kept).isolated_count == 25

    all_kept = grow(25, 1.0, stream(21, 2))
    stats = clusters(all_kept)
    assert stats.sizes == {1: 25}
    assert stats.isolated_count == 0

    with pytest.raises(ValueError):
        grow(0, 0.5, stream(21, 3))


def test_worked_seven_vertex_example():
    forest = PercolatedForest(n=7, parent=[0, 0, 1, 1, 2, 3, 4, 5],
                              retained=[0, 0, 1, 0, 0, 1, 1, 1]).check()
    stats = clusters(forest)
    assert stats.sizes == {1: 2, 3: 3, 4: 2}
    assert stats.root_of[1:] == [1, 1, 3, 4, 3, 4, 3]
    assert stats.isolated_count == 0
    assert stats.isolated_vertices() == []


def test_forest_csv_round_trip():
    forest = grow(17, 0.4, stream(21, 4))
    back = PercolatedForest.from_csv(io.StringIO(forest.to_csv()))
    assert back.parent == forest.parent
    assert back.retained == forest.retained


def test_assemble_positions_consistent():
    g = Z2()
    cfg = SrrwConfig(group=g, alpha=0.5,
                     mu=StepDistribution(support=[(0, 0.5), (1, 0.5)]),
                     transform=Identity())
    forest = grow(12, 0.5, stream(22, 0))
    trace = assign_and_assemble(forest, cfg, stream(22, 1)).check()
    assert trace.n == 12
    assert trace.reinforcement_flags == forest.retained[2:]
    assert trace.picks == forest.parent[2:]


def test_assemble_identity_abelian_is_cluster_weighted_sum():
    # with identity transforms every vertex in a cluster carries the root draw
    g = Z2()
    cfg = SrrwConfig(group=g, alpha=0.5,
                     mu=StepDistribution(support=[(0, 0.5), (1, 0.5)]))
    for t in range(30):
        forest = grow(10, 0.5, stream(23, t, 0))
        trace = assign_and_assemble(forest, cfg, stream(23, t, 1))
        stats = clusters(forest)
        total = 0
        for root, size in stats.sizes.items():
            total += size * trace.steps[root - 1]
        assert trace.final == total % 2
        for j in range(1, 11):
            assert trace.steps[j - 1] == trace.steps[stats.root_of[j] - 1]


def test_cluster_size_walk_parity_and_binomial_shape():
    # +-1 signs preserve the parity of the vertex count exactly
    for t in range(200):
        n = 5 + t % 7
        v = cluster_size_walk(0.5, n, stream(24, t))
        assert (v - n) % 2 == 0
    with pytest.raises(ValueError):
        cluster_size_walk(0.5, 5, stream(24, 0), sign_law="spin")

    # alpha = 0 bit law: sum of n fair bits
    trials = 4000
    n = 16
    vals = [cluster_size_walk(0.0, n, stream(25, t), sign_law="bit")
            for t in range(trials)]
    mean = sum(vals) / trials
    sd = math.sqrt(n * 0.25 / trials)
    assert abs(mean - n / 2) <= 3 * sd


def test_all_clusters_even_probability():
    assert all_clusters_even_probability(0.7, 9, 100, stream(26, 0)).value == 0.0

    est = all_clusters_even_probability(0.6, 2, 20_000, stream(26, 1))
    assert abs(est.value - 0.6) <= 3 * est.stderr + 1e-9

    # n = 4: the central coefficient alpha^2 (2 + alpha) / 3
    alpha = 0.5
    expected = alpha ** 2 * (2 + alpha) / 3
    est = all_clusters_even_probability(alpha, 4, 40_000, stream(26, 2))
    assert abs(est.value - expected) <= 3 * est.stderr


def test_isolated_counts_batch_matches_exact_law():
    from srrw.oracle import exact_isolated_distribution

    n, trials = 6, 40_000
    counts = isolated_counts_batch(n, 0.5, trials, stream(27, 0))
    law = exact_isolated_distribution(0.5, n)
    for i, p in law.items():
        phat = float((counts == i).mean())
        assert abs(phat - p) <= 3 * math.sqrt(p * (1 - p) / trials) + 1e-9
    assert set(np.unique(counts)) <= set(law)


def test_suffix_isolated_count():
    assert suffix_isolated_count(5, 8, 0.0, stream(28, 0)) == 8
    for t in range(50):
        v = suffix_isolated_count(0, 9, 0.5, stream(28, 1 + t))
        assert 0 <= v <= 9
    with pytest.raises(ValueError):
        suffix_isolated_count(-1, 5, 0.5, stream(28, 99))
