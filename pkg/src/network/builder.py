"""Replay games into move events and accumulate the weighted move network."""
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import ContractViolationError, IllegalMoveError, NetworkMismatchError, ReplayError
from src.go.plaquette import ClassTable, class_index, get_class_table, relativize
from src.go.rules import BoardState, CellState, neighborhood, place_stone
from src.schemas.models import (
    N_CLASSES,
    Coord,
    EventsDocument,
    GameEvents,
    GameRecord,
    MoveEvent,
    NetworkConfig,
    NetworkDocument,
    OutputHeader,
)

logger = logging.getLogger(__name__)

GamesEvents = List[List[MoveEvent]]


@dataclass(frozen=True)
class GoNetwork:
    """Weighted directed graph over plaquette classes"""
    config: NetworkConfig
    n_vertices: int
    edge_weights: Dict[Tuple[int, int], int]
    vertex_counts: Tuple[int, ...]
    n_games: int
    corpus_digest: Optional[str] = field(default=None, compare=False)

    @classmethod
    def empty(cls, config: NetworkConfig, n_vertices: int = N_CLASSES) -> "GoNetwork":
        return cls(config=config, n_vertices=n_vertices, edge_weights={},
                   vertex_counts=(0,) * n_vertices, n_games=0)

    @property
    def n_edges(self) -> int:
        return len(self.edge_weights)

    @property
    def total_weight(self) -> int:
        return sum(self.edge_weights.values())

    @property
    def total_moves(self) -> int:
        return sum(self.vertex_counts)

    def sorted_edges(self) -> List[Tuple[int, int, int]]:
        return [(a, b, w) for (a, b), w in sorted(self.edge_weights.items())]

    def adjacency(self, weighted: bool = True) -> np.ndarray:
        """Dense matrix with W[to, from] = weight of the edge from -> to"""
        w = np.zeros((self.n_vertices, self.n_vertices), dtype=float)
        for (a, b), weight in self.edge_weights.items():
            w[b, a] = weight if weighted else 1.0
        return w

    def transpose(self) -> "GoNetwork":
        """Same network with every edge reversed"""
        reversed_edges = {(b, a): w for (a, b), w in self.edge_weights.items()}
        return replace(self, edge_weights=reversed_edges)


def chebyshev(a: Coord, b: Coord) -> int:
    return max(abs(a.h - b.h), abs(a.v - b.v))


def is_linked(a: MoveEvent, b: MoveEvent, d: Optional[int]) -> bool:
    """b immediately follows a (no pass in between) and lies within distance d"""
    if b.ply != a.ply + 1:
        return False
    return d is None or chebyshev(a.at, b.at) <= d


def extract_events(game: GameRecord, table: ClassTable) -> List[MoveEvent]:
    """Replay one game, classifying every stone before it is placed.

    Setup stones shape the board but emit no events; passes emit none either.
    """
    board = BoardState.from_stones(game.setup_black, game.setup_white)
    events: List[MoveEvent] = []
    for ply, move in enumerate(game.moves):
        if move.is_pass:
            continue
        try:
            raw = neighborhood(board, move.target)
            if raw[4] != CellState.EMPTY:
                raise IllegalMoveError(f"Point ({move.target.h},{move.target.v}) is occupied")
            class_id = class_index(table, relativize(raw, move.color))
            board, _ = place_stone(board, move.color, move.target)
        except (IllegalMoveError, ContractViolationError) as e:
            raise ReplayError(game.id, ply + 1, str(e)) from e
        events.append(MoveEvent(
            game_id=game.id,
            index=len(events),
            ply=ply,
            mover=move.color,
            at=move.target,
            class_id=class_id,
        ))
    return events


def _extract_with_shared_table(game: GameRecord) -> List[MoveEvent]:
    return extract_events(game, get_class_table())


def extract_corpus_events(games: Sequence[GameRecord], table: Optional[ClassTable] = None,
                          workers: int = 1) -> GamesEvents:
    """Replay every game; results keep corpus order for any worker count"""
    if workers > 1 and len(games) > 1:
        chunksize = max(1, len(games) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            result = list(pool.map(_extract_with_shared_table, games, chunksize=chunksize))
    else:
        table = table or get_class_table()
        result = [extract_events(game, table) for game in games]
    logger.info(f"Replayed {len(result)} game(s), {sum(len(e) for e in result)} move event(s)")
    return result


def build_network(games_events: Iterable[Sequence[MoveEvent]], config: NetworkConfig,
                  n_vertices: int = N_CLASSES) -> GoNetwork:
    """Count each class once per event and each linked consecutive pair once per occurrence"""
    weights: Counter = Counter()
    counts = [0] * n_vertices
    n_games = 0
    for events in games_events:
        n_games += 1
        for e in events:
            counts[e.class_id] += 1
        for a, b in zip(events, events[1:]):
            if is_linked(a, b, config.d):
                weights[(a.class_id, b.class_id)] += 1
    return GoNetwork(
        config=config,
        n_vertices=n_vertices,
        edge_weights=dict(weights),
        vertex_counts=tuple(counts),
        n_games=n_games,
    )


def merge_networks(nets: Sequence[GoNetwork]) -> GoNetwork:
    """Sum weights, vertex counts and game counts of networks with one configuration"""
    if not nets:
        raise NetworkMismatchError("Nothing to merge")
    first = nets[0]
    weights: Counter = Counter()
    counts = np.zeros(first.n_vertices, dtype=np.int64)
    n_games = 0
    for net in nets:
        if net.config != first.config or net.n_vertices != first.n_vertices:
            raise NetworkMismatchError(
                f"Cannot merge d={net.config.d}/n={net.n_vertices} into d={first.config.d}/n={first.n_vertices}")
        weights.update(net.edge_weights)
        counts += np.asarray(net.vertex_counts, dtype=np.int64)
        n_games += net.n_games
    return GoNetwork(
        config=first.config,
        n_vertices=first.n_vertices,
        edge_weights=dict(weights),
        vertex_counts=tuple(int(c) for c in counts),
        n_games=n_games,
    )


def shuffle_baseline(games_events: Sequence[Sequence[MoveEvent]], seed: int) -> GamesEvents:
    """Permute the events of each game independently; classes travel with their points.

    Shuffled events are renumbered 0..n-1 with no passes in between, so every
    consecutive pair is a candidate link.
    """
    rng = np.random.default_rng(seed)
    shuffled = []
    for events in games_events:
        order = rng.permutation(len(events))
        shuffled.append([
            events[int(i)].model_copy(update={"index": k, "ply": k})
            for k, i in enumerate(order)
        ])
    return shuffled


# Persistence

def network_to_document(net: GoNetwork, header: Optional[OutputHeader] = None) -> NetworkDocument:
    return NetworkDocument(
        header=header,
        config=net.config,
        n_vertices=net.n_vertices,
        n_games=net.n_games,
        vertex_counts=list(net.vertex_counts),
        edges=net.sorted_edges(),
    )


def network_from_document(doc: NetworkDocument) -> GoNetwork:
    if len(doc.vertex_counts) != doc.n_vertices:
        raise ContractViolationError(
            f"vertex_counts has {len(doc.vertex_counts)} entries for {doc.n_vertices} vertices")
    return GoNetwork(
        config=doc.config,
        n_vertices=doc.n_vertices,
        edge_weights={(a, b): w for a, b, w in doc.edges},
        vertex_counts=tuple(doc.vertex_counts),
        n_games=doc.n_games,
        corpus_digest=doc.header.corpus_digest if doc.header else None,
    )


def load_network(path: Union[str, Path]) -> GoNetwork:
    doc = NetworkDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))
    net = network_from_document(doc)
    logger.info(f"Loaded network from {path}: {net.n_edges} edges, {net.n_games} games, d={net.config.d}")
    return net


def events_to_document(games_events: GamesEvents, game_ids: Sequence[str],
                       header: Optional[OutputHeader] = None) -> EventsDocument:
    return EventsDocument(
        header=header,
        games=[
            GameEvents(game_id=gid, events=[(e.ply, e.mover, e.at.h, e.at.v, e.class_id) for e in events])
            for gid, events in zip(game_ids, games_events)
        ],
    )


def events_from_document(doc: EventsDocument) -> GamesEvents:
    games = []
    for game in doc.games:
        games.append([
            MoveEvent(game_id=game.game_id, index=i, ply=ply, mover=mover, at=Coord(h=h, v=v), class_id=cid)
            for i, (ply, mover, h, v, cid) in enumerate(game.events)
        ])
    return games


def load_events(path: Union[str, Path]) -> Tuple[GamesEvents, Optional[OutputHeader]]:
    doc = EventsDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))
    return events_from_document(doc), doc.header
