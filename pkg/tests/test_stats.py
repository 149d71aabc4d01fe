import itertools

import numpy as np
import pytest

from src.core.errors import EmptyCorpusError, InsufficientDataError, StatsError, UndefinedClusteringError
from src.network import stats
from src.network.builder import build_network
from src.schemas.models import NetworkConfig


@pytest.mark.unit
def test_ranked_ties_by_label():
    dist = stats.ranked({3: 2, 1: 2, 2: 5, 9: 0})
    assert dist.labels == (2, 1, 3)
    assert dist.counts == (5, 2, 2)
    assert dist.integrated[0] == 1.0
    assert dist.integrated[-1] == pytest.approx(2 / 9)


@pytest.mark.unit
def test_integrated_is_non_increasing(toy_events):
    dist = stats.move_frequency(toy_events)
    assert dist.integrated[0] == 1.0
    assert all(a >= b for a, b in zip(dist.integrated, dist.integrated[1:]))


@pytest.mark.unit
def test_single_move_corpus(make_event):
    dist = stats.move_frequency([[make_event(0, 10, 10, 3)]])
    assert dist.labels == (3,)
    assert dist.integrated == (1.0,)


@pytest.mark.unit
def test_toy_move_counts(toy_events):
    dist = stats.move_frequency(toy_events)
    assert dict(zip(dist.labels, dist.counts)) == {5: 4, 6: 4, 7: 1}


@pytest.mark.unit
def test_frequency_from_counts_empty():
    with pytest.raises(EmptyCorpusError):
        stats.frequency_from_counts([0, 0, 0])


@pytest.mark.unit
def test_position_frequency(toy_events):
    dist = stats.position_frequency(toy_events)
    assert dist.labels[0] == (4, 4)
    assert dist.counts[0] == 2
    assert dist.total == 9


@pytest.mark.unit
def test_sequence_two_adjacent_moves(make_event):
    games = [[make_event(0, 10, 10, 1), make_event(1, 10, 11, 2)]]
    dist = stats.sequence_frequency(games, 2, 4)
    assert dict(zip(dist.labels, dist.counts)) == {(1, 2): 1}


@pytest.mark.unit
def test_sequence_broken_chain(make_event):
    games = [[make_event(0, 10, 10, 1), make_event(1, 10, 11, 2), make_event(2, 18, 2, 3)]]
    assert len(stats.sequence_frequency(games, 3, 4)) == 0
    assert stats.sequence_frequency(games, 2, 4).total == 1


@pytest.mark.unit
def test_sequence_unbounded_total(toy_events):
    # consecutive pairs without a pass in between: A has 3, B has 1, C has 1
    assert stats.sequence_frequency(toy_events, 2, None).total == 5


@pytest.mark.unit
def test_sequence_matches_window_scan(toy_events):
    def brute(k, d):
        counts = {}
        for events in toy_events:
            for i in range(len(events) - k + 1):
                window = events[i:i + k]
                if all(b.ply == a.ply + 1 and max(abs(a.at.h - b.at.h), abs(a.at.v - b.at.v)) <= d
                       for a, b in zip(window, window[1:])):
                    key = tuple(e.class_id for e in window)
                    counts[key] = counts.get(key, 0) + 1
        return counts

    for k, d in itertools.product((2, 3), (1, 2, 4)):
        dist = stats.sequence_frequency(toy_events, k, d)
        assert dict(zip(dist.labels, dist.counts)) == brute(k, d)


@pytest.mark.unit
def test_sequence_length_bounds(toy_events):
    with pytest.raises(StatsError):
        stats.sequence_frequency(toy_events, 1, 4)
    with pytest.raises(StatsError):
        stats.sequence_frequency(toy_events, 8, 4)


@pytest.mark.unit
def test_c1_two_move_game(make_event):
    games = [[make_event(0, 3, 3, 0), make_event(1, 16, 16, 0)]]
    dist = stats.variant_c1(games)
    assert dist.labels == (((3, 3), (16, 16)),)


@pytest.mark.unit
def test_c1_counts_all_consecutive_pairs(toy_events):
    assert stats.variant_c1(toy_events).total == 5


@pytest.mark.unit
def test_c2_all_distant_is_empty(make_event):
    games = [[make_event(0, 1, 1, 0), make_event(1, 10, 10, 0), make_event(2, 19, 19, 0)]]
    assert len(stats.variant_c2(games, 4)) == 0


@pytest.mark.unit
def test_c2_first_follower(toy_events):
    dist = stats.variant_c2(toy_events, 1)
    assert set(dist.labels) == {
        ((7, 4), (7, 5)),
        ((4, 4), (4, 5)),
        ((4, 5), (4, 6)),
        ((10, 10), (10, 11)),
    }


@pytest.mark.unit
def test_c3_colinear(make_event):
    games = [[make_event(0, 5, 5, 0), make_event(1, 5, 6, 0), make_event(2, 5, 7, 0)]]
    dist = stats.variant_c3(games, 4, 2)
    assert dict(zip(dist.labels, dist.counts)) == {((0, 1), (0, 1)): 1}


@pytest.mark.unit
def test_c3_toy(toy_events):
    dist = stats.variant_c3(toy_events, 4, 2)
    assert dist.labels == (((3, 0), (0, 1)),)


@pytest.mark.unit
def test_distance_distribution(make_event):
    p = stats.distance_distribution([[make_event(0, 4, 4, 0), make_event(1, 7, 5, 0)]])
    assert len(p) == 19
    assert p[3] == 1.0
    assert sum(p) == pytest.approx(1.0)


@pytest.mark.unit
def test_distance_distribution_empty(make_event):
    with pytest.raises(EmptyCorpusError):
        stats.distance_distribution([[make_event(0, 4, 4, 0)]])


@pytest.mark.unit
def test_degrees_single_edge(make_network):
    curves = stats.degree_distributions(make_network({(0, 1): 3}, 4))
    assert curves.p_out.degrees == (1, 0, 0, 0)
    assert curves.p_in.degrees == (0, 1, 0, 0)
    assert curves.weighted_out.degrees == (3, 0, 0, 0)
    assert curves.p_out.fraction_above[0] == 0.25


@pytest.mark.unit
def test_degree_sweep_radii(toy_events):
    sweep = stats.degree_sweep(toy_events, (2, 4))
    assert sorted(sweep) == [2, 4]
    assert sum(sweep[4].p_out.degrees) == 3


def _brute_clustering(edges, n):
    neighbors = {v: set() for v in range(n)}
    for a, b in edges:
        if a != b:
            neighbors[a].add(b)
            neighbors[b].add(a)
    values = []
    for v in range(n):
        k = len(neighbors[v])
        if k < 2:
            continue
        links = sum(1 for x, y in itertools.combinations(sorted(neighbors[v]), 2) if y in neighbors[x])
        values.append(2 * links / (k * (k - 1)))
    return float(np.mean(values))


@pytest.mark.unit
def test_clustering_triangle(make_network):
    result = stats.clustering_coefficient(make_network({(0, 1): 1, (1, 2): 1, (2, 0): 1}, 3))
    assert result.average == pytest.approx(1.0)


@pytest.mark.unit
def test_clustering_star(make_network):
    result = stats.clustering_coefficient(make_network({(0, 1): 1, (0, 2): 1, (3, 0): 1}, 4))
    assert result.average == 0.0
    assert set(result.per_vertex) == {0}


@pytest.mark.unit
def test_clustering_undefined(make_network):
    with pytest.raises(UndefinedClusteringError):
        stats.clustering_coefficient(make_network({(0, 1): 1, (2, 2): 5}, 3))


@pytest.mark.unit
def test_clustering_matches_brute_force(make_network):
    rng = np.random.default_rng(5)
    for _ in range(20):
        edges = {(int(a), int(b)): 1 for a, b in rng.integers(0, 8, size=(14, 2))}
        net = make_network(edges, 8)
        try:
            result = stats.clustering_coefficient(net)
        except UndefinedClusteringError:
            continue
        assert result.average == pytest.approx(_brute_clustering(edges, 8))


@pytest.mark.unit
def test_cc_vs_games_full_checkpoint(make_event):
    games = [
        [make_event(0, 4, 4, 1, "x"), make_event(1, 4, 5, 2, "x"), make_event(2, 5, 5, 3, "x"), make_event(3, 5, 4, 1, "x")],
        [make_event(0, 9, 9, 1, "y"), make_event(1, 9, 10, 4, "y"), make_event(2, 10, 10, 2, "y")],
    ]
    config = NetworkConfig(d=4)
    series = stats.cc_vs_games(games, config, [1, 2])
    assert series[0] == (1, pytest.approx(1.0))
    assert series[-1] == (2, stats.clustering_coefficient(build_network(games, config)).average)


@pytest.mark.unit
def test_cc_checkpoint_beyond_corpus(toy_events):
    with pytest.raises(StatsError):
        stats.cc_vs_games(toy_events, NetworkConfig(d=4), [1, 4])


@pytest.mark.unit
def test_fit_slope_exact_power_laws():
    ranks = np.arange(1, 101, dtype=float)
    assert stats.fit_slope(ranks ** -1.0).slope == pytest.approx(-1.0, abs=1e-9)
    assert stats.fit_slope(ranks ** -1.5).slope == pytest.approx(-1.5, abs=1e-9)


@pytest.mark.unit
def test_fit_slope_noisy():
    rng = np.random.default_rng(42)
    ranks = np.arange(1, 501, dtype=float)
    values = ranks ** -1.2 * np.exp(rng.normal(0, 0.05, size=ranks.size))
    fit = stats.fit_slope(values, 1, 500)
    assert fit.slope == pytest.approx(-1.2, abs=0.05)
    assert fit.n_points == 500


@pytest.mark.unit
def test_fit_slope_range_and_points():
    values = np.arange(1, 21, dtype=float) ** -2.0
    fit = stats.fit_slope(values, 5, 10)
    assert fit.n_points == 6
    assert fit.fit_range == (5.0, 10.0)
    with pytest.raises(InsufficientDataError):
        stats.fit_slope(values, 5, 6)
