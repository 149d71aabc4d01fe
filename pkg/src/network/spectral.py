"""Google matrix, ranking vectors and the complex spectrum of move networks.

Orientation: an edge a -> b puts weight in column a, row b, so G[:, a] is the
probability distribution of the move following a.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.stats import kendalltau

from src.core.errors import ContractViolationError, ConvergenceError, InsufficientDataError, NumericalError, UsageError
from src.go.plaquette import ClassTable, render_ascii
from src.network.builder import GamesEvents, GoNetwork, build_network
from src.network.stats import fit_slope
from src.schemas.models import NetworkConfig, SlopeFit

logger = logging.getLogger(__name__)

DEFAULT_PERCENTS = (80.0, 90.0, 95.0, 99.0)
DEFAULT_TOP = 7
DEFAULT_PROFILE_SIZE = 100
DENSE_FALLBACK_HINT = "the dense eigensolver can be used instead (--dense-fallback)"


class RankKind(str, Enum):
    PAGERANK = "pagerank"
    CHEIRANK = "cheirank"
    HUB = "hubs"
    AUTHORITY = "authorities"


@dataclass(frozen=True)
class GoogleMatrix:
    n: int
    alpha: float
    matrix: np.ndarray


@dataclass(frozen=True)
class RankingVector:
    """Nonnegative scores summing to 1; ranks[v] is the 0-based position of vertex v"""
    kind: RankKind
    values: np.ndarray
    ranks: np.ndarray
    iterations: int = 0

    def order(self) -> np.ndarray:
        return _descending_order(self.values)

    def top(self, k: int) -> List[Tuple[int, float]]:
        return [(int(v), float(self.values[v])) for v in self.order()[:k]]


def _descending_order(values: np.ndarray) -> np.ndarray:
    """Vertices by descending value, ties by ascending id"""
    ids = np.arange(len(values))
    return np.lexsort((ids, -np.asarray(values)))


def _ranking(kind: RankKind, values: np.ndarray, iterations: int = 0) -> RankingVector:
    values = np.clip(np.real(values), 0.0, None)
    values = values / values.sum()
    order = _descending_order(values)
    ranks = np.empty(len(values), dtype=int)
    ranks[order] = np.arange(len(values))
    return RankingVector(kind=kind, values=values, ranks=ranks, iterations=iterations)


def build_google(net: GoNetwork, alpha: float) -> GoogleMatrix:
    """G = alpha * S + (1 - alpha) / n with dangling columns made uniform"""
    if not 0.0 < alpha <= 1.0:
        raise UsageError(f"alpha must be in (0, 1], got {alpha}")
    n = net.n_vertices
    w = net.adjacency(weighted=True)
    col = w.sum(axis=0)
    dangling = col == 0
    s = np.empty_like(w)
    s[:, ~dangling] = w[:, ~dangling] / col[~dangling]
    s[:, dangling] = 1.0 / n
    matrix = s if alpha == 1.0 else alpha * s + (1.0 - alpha) / n
    return GoogleMatrix(n=n, alpha=alpha, matrix=matrix)


def pagerank(g: GoogleMatrix, tol: float = 1e-12, max_iter: int = 100000,
             kind: RankKind = RankKind.PAGERANK) -> RankingVector:
    """Power iteration from the uniform vector with L1 renormalization"""
    if tol <= 0:
        raise UsageError("tol must be positive")
    p = np.full(g.n, 1.0 / g.n)
    residual = float("inf")
    for iteration in range(1, max_iter + 1):
        nxt = g.matrix @ p
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - p).sum())
        p = nxt
        if residual < tol:
            logger.debug(f"{kind.value} converged in {iteration} iterations")
            return _ranking(kind, p, iteration)
    raise ConvergenceError(kind.value, max_iter, residual, hint=DENSE_FALLBACK_HINT)


def dominant_eigenvector(g: GoogleMatrix, kind: RankKind = RankKind.PAGERANK) -> RankingVector:
    """Eigenvector of the eigenvalue closest to 1, from the dense solver"""
    try:
        eigenvalues, vectors = scipy.linalg.eig(g.matrix)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"Eigensolver failed: {e}") from e
    idx = int(np.argmin(np.abs(eigenvalues - 1.0)))
    return _ranking(kind, np.abs(_fix_phase(vectors[:, idx])))


def cheirank(net: GoNetwork, alpha: float = 1.0, tol: float = 1e-12, max_iter: int = 100000) -> RankingVector:
    """PageRank of the network with every link reversed"""
    return pagerank(build_google(net.transpose(), alpha), tol, max_iter, kind=RankKind.CHEIRANK)


def hits(net: GoNetwork, tol: float = 1e-10, max_iter: int = 100000,
         weighted: bool = True) -> Tuple[RankingVector, RankingVector]:
    """Hubs and authorities by alternating power iteration on the adjacency matrix"""
    w = net.adjacency(weighted=weighted)
    if not w.any():
        raise ContractViolationError("HITS needs a network with at least one edge")
    n = net.n_vertices
    h = np.full(n, 1.0 / math.sqrt(n))
    a = np.zeros(n)
    residual = float("inf")
    for iteration in range(1, max_iter + 1):
        # authority of i sums the hubs pointing to it; hub of j sums the authorities it points to
        a_new = w @ h
        a_new /= np.linalg.norm(a_new)
        h_new = w.T @ a_new
        h_new /= np.linalg.norm(h_new)
        residual = float(max(np.linalg.norm(a_new - a), np.linalg.norm(h_new - h)))
        a, h = a_new, h_new
        if residual < tol:
            logger.debug(f"HITS converged in {iteration} iterations")
            return _ranking(RankKind.HUB, h, iteration), _ranking(RankKind.AUTHORITY, a, iteration)
    raise ConvergenceError("HITS", max_iter, residual)


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    right_eigenvectors: List[np.ndarray]
    lambda_c: Dict[float, float]
    localization: List[np.ndarray]

    @property
    def second_modulus(self) -> float:
        return float(abs(self.eigenvalues[1])) if len(self.eigenvalues) > 1 else 0.0


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """Unit squared-modulus norm with the largest-modulus entry real and positive"""
    vector = np.asarray(vector, dtype=complex)
    vector = vector / np.sqrt(np.sum(np.abs(vector) ** 2))
    pivot = vector[int(np.argmax(np.abs(vector)))]
    return vector * (np.conj(pivot) / abs(pivot))


def sort_eigenvalues(eigenvalues: np.ndarray) -> np.ndarray:
    """Indices by descending modulus, then descending real and imaginary parts"""
    rounded = np.round(eigenvalues, 10)
    return np.lexsort((-rounded.imag, -rounded.real, -np.round(np.abs(eigenvalues), 10)))


def full_spectrum(g: GoogleMatrix, m: int = DEFAULT_TOP, percents: Sequence[float] = DEFAULT_PERCENTS,
                  freq_order: Optional[np.ndarray] = None,
                  profile_size: int = DEFAULT_PROFILE_SIZE) -> SpectralReport:
    """All eigenvalues of G and right eigenvectors of the m largest in modulus"""
    try:
        eigenvalues, vectors = scipy.linalg.eig(g.matrix)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"Eigensolver failed: {e}") from e

    drift = abs(complex(eigenvalues.sum()) - float(np.trace(g.matrix)))
    if drift > 1e-6:
        raise NumericalError(f"Eigenvalue sum departs from the trace by {drift:.3e}")

    order = sort_eigenvalues(eigenvalues)
    eigenvalues = eigenvalues[order]
    top = [_fix_phase(vectors[:, i]) for i in order[:m]]
    profiles = []
    if freq_order is not None:
        profiles = [localization_profile(v, freq_order, profile_size) for v in top]
    logger.info(f"Spectrum of {g.n}x{g.n} matrix: |lambda_2| = {abs(eigenvalues[1]) if g.n > 1 else 0:.4f}")
    return SpectralReport(
        eigenvalues=eigenvalues,
        right_eigenvectors=top,
        lambda_c=lambda_c(eigenvalues, percents),
        localization=profiles,
    )


def lambda_c(eigenvalues: np.ndarray, percents: Sequence[float] = DEFAULT_PERCENTS) -> Dict[float, float]:
    """Radius r such that about p% of all eigenvalues have |lambda| <= r.

    r is the k-th smallest modulus with k = max(1, floor(p * n / 100)); the
    leading eigenvalue belongs to the population. k is rounded down, not up,
    so the share of moduli <= r may fall short of p%: one unit eigenvalue
    among three zeros gives r = 0 at p = 80, where ceil would give 1.
    """
    moduli = np.sort(np.abs(np.asarray(eigenvalues)))
    n = len(moduli)
    out = {}
    for p in percents:
        if not 0.0 < p < 100.0:
            raise UsageError(f"Percent must be in (0, 100), got {p}")
        k = max(1, math.floor(p * n / 100.0 + 1e-9))
        out[float(p)] = float(moduli[k - 1])
    return out


def lambda_c_vs_games(games_events: GamesEvents, config: NetworkConfig, alpha: float,
                      checkpoints: Sequence[int],
                      percents: Sequence[float] = DEFAULT_PERCENTS) -> List[Tuple[int, Dict[float, float]]]:
    """lambda_c of the network built from the first n_g games"""
    out = []
    for n_g in checkpoints:
        if n_g > len(games_events):
            raise UsageError(f"Checkpoint {n_g} exceeds the {len(games_events)} games available")
        g = build_google(build_network(games_events[:n_g], config), alpha)
        out.append((n_g, lambda_c(scipy.linalg.eigvals(g.matrix), percents)))
    return out


def frequency_order(vertex_counts: Sequence[int]) -> np.ndarray:
    """All vertices by descending frequency, ties by ascending id"""
    return _descending_order(np.asarray(vertex_counts, dtype=float))


def localization_profile(eigvec: np.ndarray, freq_order: np.ndarray,
                         size: int = DEFAULT_PROFILE_SIZE) -> np.ndarray:
    """|psi|^2 (normalized over all entries) at the `size` most frequent vertices"""
    weights = np.abs(np.asarray(eigvec)) ** 2
    weights = weights / weights.sum()
    return weights[np.asarray(freq_order)[:size]]


@dataclass(frozen=True)
class TopEntry:
    class_id: int
    weight: float
    diagram: Optional[List[str]]


def top_entries(eigvec: np.ndarray, k: int, table: Optional[ClassTable] = None) -> List[TopEntry]:
    """The k vertices carrying the largest |psi|^2, with their plaquette diagrams"""
    weights = np.abs(np.asarray(eigvec)) ** 2
    weights = weights / weights.sum()
    if k > len(weights):
        raise UsageError(f"Asked for {k} entries of a {len(weights)}-vector")
    entries = []
    for v in _descending_order(weights)[:k]:
        diagram = render_ascii(table[int(v)]) if table is not None and len(table) == len(weights) else None
        entries.append(TopEntry(class_id=int(v), weight=float(weights[v]), diagram=diagram))
    return entries


@dataclass(frozen=True)
class RankCorrelation:
    pairs: List[Tuple[int, int]]  # (K, K*) per vertex, 1-based
    tau: float


def rank_correlation(pr: RankingVector, cr: RankingVector) -> RankCorrelation:
    if len(pr.values) != len(cr.values):
        raise ContractViolationError("Ranking vectors have different lengths")
    k = pr.ranks + 1
    k_star = cr.ranks + 1
    tau, _ = kendalltau(k, k_star)
    return RankCorrelation(pairs=[(int(a), int(b)) for a, b in zip(k, k_star)], tau=float(tau))


def ranking_distribution(vector: RankingVector, fit_min: float = 1,
                         fit_max: Optional[float] = None) -> Tuple[np.ndarray, Optional[SlopeFit]]:
    """Ranking values sorted in decreasing order and their log-log slope against rank"""
    values = np.sort(vector.values)[::-1]
    try:
        fit = fit_slope(values, fit_min, fit_max)
    except InsufficientDataError as e:
        logger.warning(f"No slope for {vector.kind.value}: {e}")
        fit = None
    return values, fit
