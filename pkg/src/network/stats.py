"""Frequency and graph statistics of move networks.

Integrated distributions are tail sums: integrated[r] is the share of all
occurrences carried by ranks r and beyond, so it starts at 1 and decreases.
Degree curves count distinct links unless stated otherwise.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.core.errors import EmptyCorpusError, InsufficientDataError, StatsError, UndefinedClusteringError
from src.network.builder import GamesEvents, GoNetwork, build_network, chebyshev, is_linked
from src.schemas.models import BOARD_SIZE, MoveEvent, NetworkConfig, SlopeFit

logger = logging.getLogger(__name__)

MIN_SEQUENCE = 2
MAX_SEQUENCE = 7
MAX_DISTANCE = BOARD_SIZE - 1


@dataclass(frozen=True)
class RankedDistribution:
    labels: Tuple[Hashable, ...]
    counts: Tuple[int, ...]
    integrated: Tuple[float, ...]

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)


def ranked(counter: Dict[Hashable, int]) -> RankedDistribution:
    """Sort by descending count, ties by ascending label; zero counts dropped"""
    items = sorted(((label, c) for label, c in counter.items() if c > 0), key=lambda x: (-x[1], x[0]))
    if not items:
        return RankedDistribution(labels=(), counts=(), integrated=())
    labels, counts = zip(*items)
    tail = np.cumsum(np.asarray(counts[::-1], dtype=float))[::-1]
    integrated = tail / tail[0]
    return RankedDistribution(labels=tuple(labels), counts=tuple(int(c) for c in counts),
                              integrated=tuple(float(x) for x in integrated))


def frequency_from_counts(vertex_counts: Sequence[int]) -> RankedDistribution:
    if sum(vertex_counts) == 0:
        raise EmptyCorpusError("No moves to rank")
    return ranked({i: int(c) for i, c in enumerate(vertex_counts)})


def move_frequency(games_events: GamesEvents) -> RankedDistribution:
    """Occurrences of each plaquette class"""
    counter = Counter(e.class_id for events in games_events for e in events)
    if not counter:
        raise EmptyCorpusError("No moves to rank")
    return ranked(counter)


def position_frequency(games_events: GamesEvents) -> RankedDistribution:
    """Occurrences of each board point, ignoring the local pattern"""
    counter = Counter(e.at.as_tuple() for events in games_events for e in events)
    if not counter:
        raise EmptyCorpusError("No moves to rank")
    return ranked(counter)


def _linked_windows(events: Sequence[MoveEvent], k: int, d: Optional[int]) -> List[Sequence[MoveEvent]]:
    """Windows of k consecutive events whose successive pairs are all linked"""
    windows = []
    run = 1  # length of the linked run ending at event i
    for i in range(1, len(events)):
        run = run + 1 if is_linked(events[i - 1], events[i], d) else 1
        if run >= k:
            windows.append(events[i - k + 1:i + 1])
    return windows


def _check_k(k: int):
    if not MIN_SEQUENCE <= k <= MAX_SEQUENCE:
        raise StatsError(f"Sequence length k must be in [{MIN_SEQUENCE}, {MAX_SEQUENCE}], got {k}")


def sequence_frequency(games_events: GamesEvents, k: int, d: Optional[int]) -> RankedDistribution:
    """k-tuples of classes over overlapping windows of linked moves"""
    _check_k(k)
    counter: Counter = Counter()
    for events in games_events:
        for window in _linked_windows(events, k, d):
            counter[tuple(e.class_id for e in window)] += 1
    return ranked(counter)


def variant_c1(games_events: GamesEvents, k: int = 2) -> RankedDistribution:
    """Positions instead of plaquettes; every pair of consecutive moves counts"""
    _check_k(k)
    counter: Counter = Counter()
    for events in games_events:
        for window in _linked_windows(events, k, None):
            counter[tuple(e.at.as_tuple() for e in window)] += 1
    return ranked(counter)


def _first_follower(events: Sequence[MoveEvent], d: int) -> List[Optional[int]]:
    """Index of the earliest later move within distance d, for every move"""
    follower: List[Optional[int]] = [None] * len(events)
    for i, a in enumerate(events):
        for j in range(i + 1, len(events)):
            if chebyshev(a.at, events[j].at) <= d:
                follower[i] = j
                break
    return follower


def variant_c2(games_events: GamesEvents, d: int, k: int = 2) -> RankedDistribution:
    """Positions; a move is followed by the first later move played within distance d"""
    _check_k(k)
    counter: Counter = Counter()
    for events in games_events:
        follower = _first_follower(events, d)
        for start in range(len(events)):
            chain = [start]
            while len(chain) < k and follower[chain[-1]] is not None:
                chain.append(follower[chain[-1]])
            if len(chain) == k:
                counter[tuple(events[i].at.as_tuple() for i in chain)] += 1
    return ranked(counter)


def variant_c3(games_events: GamesEvents, d: int, k: int = 2) -> RankedDistribution:
    """k-tuples of displacement vectors (dh, dv) between linked consecutive moves"""
    _check_k(k)
    counter: Counter = Counter()
    for events in games_events:
        # k vectors span k + 1 moves
        for window in _linked_windows(events, k + 1, d):
            counter[tuple((b.at.h - a.at.h, b.at.v - a.at.v) for a, b in zip(window, window[1:]))] += 1
    return ranked(counter)


def distance_distribution(games_events: GamesEvents) -> List[float]:
    """P(d') for d' = 0..18 over all consecutive move pairs"""
    hist = np.zeros(MAX_DISTANCE + 1, dtype=float)
    for events in games_events:
        for a, b in zip(events, events[1:]):
            if is_linked(a, b, None):
                hist[chebyshev(a.at, b.at)] += 1
    total = hist.sum()
    if total == 0:
        raise EmptyCorpusError("No consecutive move pairs")
    return [float(x) for x in hist / total]


@dataclass(frozen=True)
class DegreeCurve:
    """Fraction of vertices with degree > k, against k / k_max"""
    k: Tuple[int, ...]
    k_normalized: Tuple[float, ...]
    fraction_above: Tuple[float, ...]
    degrees: Tuple[int, ...]

    def points(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.k_normalized), np.asarray(self.fraction_above)


@dataclass(frozen=True)
class DegreeDistributions:
    p_in: DegreeCurve
    p_out: DegreeCurve
    weighted_in: DegreeCurve
    weighted_out: DegreeCurve


def _degree_curve(degrees: np.ndarray, n_vertices: int) -> DegreeCurve:
    k_max = int(degrees.max()) if degrees.size else 0
    ks = np.arange(0, k_max + 1)
    above = np.array([np.count_nonzero(degrees > k) for k in ks], dtype=float) / n_vertices
    norm = ks / k_max if k_max > 0 else ks.astype(float)
    return DegreeCurve(
        k=tuple(int(k) for k in ks),
        k_normalized=tuple(float(x) for x in norm),
        fraction_above=tuple(float(x) for x in above),
        degrees=tuple(int(x) for x in degrees),
    )


def degree_distributions(net: GoNetwork) -> DegreeDistributions:
    w = net.adjacency(weighted=True)
    links = w > 0
    return DegreeDistributions(
        p_in=_degree_curve(links.sum(axis=1), net.n_vertices),
        p_out=_degree_curve(links.sum(axis=0), net.n_vertices),
        weighted_in=_degree_curve(w.sum(axis=1).astype(int), net.n_vertices),
        weighted_out=_degree_curve(w.sum(axis=0).astype(int), net.n_vertices),
    )


def degree_sweep(games_events: GamesEvents, ds: Sequence[int] = (2, 3, 4, 5, 6)) -> Dict[int, DegreeDistributions]:
    """Degree curves of the networks built with each link radius"""
    return {d: degree_distributions(build_network(games_events, NetworkConfig(d=d))) for d in ds}


@dataclass(frozen=True)
class ClusteringResult:
    average: float
    per_vertex: Dict[int, float]


def undirected_graph(net: GoNetwork) -> nx.Graph:
    """Simple undirected graph of the links, without self-loops"""
    graph = nx.Graph()
    graph.add_nodes_from(range(net.n_vertices))
    graph.add_edges_from((a, b) for a, b in net.edge_weights if a != b)
    return graph


def clustering_coefficient(net: GoNetwork) -> ClusteringResult:
    """Average over vertices with at least two neighbors"""
    graph = undirected_graph(net)
    eligible = [n for n, deg in graph.degree() if deg >= 2]
    if not eligible:
        raise UndefinedClusteringError("No vertex has two or more neighbors")
    per_vertex = nx.clustering(graph, nodes=eligible)
    average = float(np.mean([per_vertex[n] for n in eligible]))
    return ClusteringResult(average=average, per_vertex={int(n): float(c) for n, c in per_vertex.items()})


def cc_vs_games(games_events: GamesEvents, config: NetworkConfig,
                checkpoints: Sequence[int]) -> List[Tuple[int, float]]:
    """Clustering coefficient of the network built from the first n_g games"""
    if list(checkpoints) != sorted(checkpoints):
        raise StatsError("Checkpoints must be ascending")
    if checkpoints and checkpoints[-1] > len(games_events):
        raise StatsError(f"Checkpoint {checkpoints[-1]} exceeds the {len(games_events)} games available")
    out = []
    for n_g in checkpoints:
        net = build_network(games_events[:n_g], config)
        out.append((n_g, clustering_coefficient(net).average))
        logger.debug(f"CC after {n_g} games: {out[-1][1]:.4f}")
    return out


def fit_slope(values: Sequence[float], r_min: float = 1, r_max: Optional[float] = None,
              x: Optional[Sequence[float]] = None) -> SlopeFit:
    """Ordinary least squares of log10(value) on log10(x) over x in [r_min, r_max].

    x defaults to the ranks 1..n of `values`.
    """
    y = np.asarray(values, dtype=float)
    xs = np.arange(1, len(y) + 1, dtype=float) if x is None else np.asarray(x, dtype=float)
    if r_max is None:
        r_max = float(xs.max()) if xs.size else r_min
    keep = (xs >= r_min) & (xs <= r_max) & (xs > 0) & (y > 0)
    if np.count_nonzero(keep) < 3:
        raise InsufficientDataError(f"Need 3 positive points in [{r_min}, {r_max}], got {int(np.count_nonzero(keep))}")
    lx, ly = np.log10(xs[keep]), np.log10(y[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return SlopeFit(slope=float(slope), intercept=float(intercept), fit_range=(float(r_min), float(r_max)),
                    n_points=int(np.count_nonzero(keep)), residual=residual)
