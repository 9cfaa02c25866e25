import numpy as np
import pytest
from hypothesis import given

from chei2d import TwoDRanking, local_rank, two_d_rank
from strategies import rankings


def ranking_from_indexes(k, kstar) -> TwoDRanking:
    k = np.asarray(k, dtype=np.float64)
    kstar = np.asarray(kstar, dtype=np.float64)
    n = k.size
    return TwoDRanking.from_probabilities(n + 1 - k, n + 1 - kstar)


def test_top_corner_gets_rank_one():
    r = ranking_from_indexes([1, 2, 3], [1, 3, 2])
    combined = two_d_rank(r)
    assert combined.order[0] == 1
    assert combined.index[0] == 1


def test_square_border_order_example():
    # node 1 at (2,2), node 2 at (1,3), node 3 at (3,1): the (2,2) shell
    # comes first, then the two s=3 nodes ordered by min then id
    r = ranking_from_indexes([2, 1, 3], [2, 3, 1])
    combined = two_d_rank(r)
    assert list(combined.order) == [1, 2, 3]


def test_correlated_ranking_reduces_to_pagerank_order():
    k = [4, 1, 3, 2, 5]
    r = ranking_from_indexes(k, k)
    combined = two_d_rank(r)
    assert np.array_equal(combined.index, r.K)


@given(rankings())
def test_two_d_rank_bijection_and_shell_monotone(r):
    combined = two_d_rank(r)
    n = r.node_count
    assert sorted(combined.order) == list(range(1, n + 1))
    shells = np.maximum(r.K, r.Kstar)[combined.order - 1]
    assert np.all(np.diff(shells) >= 0)


def test_local_rank_full_subset_is_global():
    r = ranking_from_indexes([3, 1, 2], [2, 3, 1])
    ranks = local_rank(r, {1, 2, 3})
    assert np.array_equal(ranks.k_local, r.K[ranks.node_ids - 1])
    assert np.array_equal(ranks.kstar_local, r.Kstar[ranks.node_ids - 1])


def test_local_rank_two_members():
    # node 1 holds global K=5 and node 2 holds global K=17
    remaining = [k for k in range(1, 21) if k not in (5, 17)]
    k = np.array([5, 17] + remaining)
    r = ranking_from_indexes(k, np.arange(1, 21))
    ranks = local_rank(r, {1, 2})
    pos = dict(zip(ranks.node_ids.tolist(), ranks.k_local.tolist()))
    assert pos[1] == 1 and pos[2] == 2


def test_local_rank_singleton():
    r = ranking_from_indexes([2, 1, 3], [3, 2, 1])
    ranks = local_rank(r, {3})
    assert list(ranks.k_local) == [1]
    assert list(ranks.kstar_local) == [1]


def test_local_rank_rejects_empty_and_out_of_range():
    r = ranking_from_indexes([1, 2], [2, 1])
    with pytest.raises(ValueError):
        local_rank(r, set())
    with pytest.raises(ValueError):
        local_rank(r, {0, 1})
    with pytest.raises(ValueError):
        local_rank(r, {3})


@given(rankings(min_n=3))
def test_local_rank_preserves_global_order(r):
    n = r.node_count
    subset = list(range(1, n + 1, 2))
    ranks = local_rank(r, subset)
    assert sorted(ranks.k_local) == list(range(1, len(subset) + 1))
    by_global = np.argsort(r.K[ranks.node_ids - 1])
    assert np.array_equal(ranks.k_local[by_global], np.arange(1, len(subset) + 1))


@given(rankings(min_n=4))
def test_local_rank_shrinking_subset_keeps_relative_order(r):
    n = r.node_count
    big = list(range(1, n + 1))
    small = big[: n // 2]
    big_ranks = local_rank(r, big)
    small_ranks = local_rank(r, small)
    big_pos = {int(i): int(v) for i, v in zip(big_ranks.node_ids, big_ranks.k_local)}
    small_pos = {
        int(i): int(v) for i, v in zip(small_ranks.node_ids, small_ranks.k_local)
    }
    members = sorted(small_pos)
    for x in members:
        for y in members:
            if big_pos[x] < big_pos[y]:
                assert small_pos[x] < small_pos[y]
