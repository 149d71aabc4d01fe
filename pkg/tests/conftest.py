import pytest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.network.builder import GoNetwork
from src.schemas.models import Color, Coord, MoveEvent, NetworkConfig


SIMPLE_GAME = "(;GM[1]FF[4]SZ[19]PB[Black Player]PW[White Player]DT[2011-03-04];B[pd];W[dp])"

COLLECTION = """(;SZ[19]EV[first];B[pd];W[dd];B[pp])
(;SZ[19]EV[second];B[dp];W[pq])
(;SZ[19]EV[third];B[jj])
"""

# B (2,1), W (1,1), B (1,2) captures the corner stone, W (19,19), B (2,2)
CAPTURE_GAME = "(;SZ[19];B[ba];W[aa];B[ab];W[ss];B[bb])"


@pytest.fixture
def simple_sgf():
    return SIMPLE_GAME


@pytest.fixture
def collection_sgf():
    return COLLECTION


@pytest.fixture
def capture_sgf():
    return CAPTURE_GAME


@pytest.fixture
def sgf_dir(tmp_path):
    """Directory with two valid SGF files and one nested file"""
    (tmp_path / "b.sgf").write_text(SIMPLE_GAME, encoding="utf-8")
    (tmp_path / "a.sgf").write_text(COLLECTION, encoding="utf-8")
    nested = tmp_path / "more"
    nested.mkdir()
    (nested / "c.sgf").write_text("(;SZ[19];B[cc];W[dc];B[cd])", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("not a game", encoding="utf-8")
    return tmp_path


@pytest.fixture
def make_event():
    """Factory for hand-made move events"""

    def _make(ply, h, v, class_id, game_id="g", index=None, mover=None):
        if mover is None:
            mover = Color.BLACK if ply % 2 == 0 else Color.WHITE
        return MoveEvent(
            game_id=game_id,
            index=ply if index is None else index,
            ply=ply,
            mover=mover,
            at=Coord(h=h, v=v),
            class_id=class_id,
        )

    return _make


@pytest.fixture
def toy_events(make_event):
    """Three hand-classified games, 9 events.

    Game A: (4,4) c5, (7,4) c6, (7,5) c5, (15,15) c7
    Game B: (4,4) c5, pass, (4,5) c6, (4,6) c6
    Game C: (10,10) c5, (10,11) c6

    Links at d=2: 6->5 (A), 6->6 (B), 5->6 (C)
    Links at d=4: additionally 5->6 (A)
    """
    game_a = [
        make_event(0, 4, 4, 5, "A"),
        make_event(1, 7, 4, 6, "A"),
        make_event(2, 7, 5, 5, "A"),
        make_event(3, 15, 15, 7, "A"),
    ]
    game_b = [
        make_event(0, 4, 4, 5, "B", index=0),
        make_event(2, 4, 5, 6, "B", index=1),
        make_event(3, 4, 6, 6, "B", index=2),
    ]
    game_c = [
        make_event(0, 10, 10, 5, "C"),
        make_event(1, 10, 11, 6, "C"),
    ]
    return [game_a, game_b, game_c]


@pytest.fixture
def ten_move_games(make_event):
    """Three hand-classified games of 10, 11 (one pass) and 9 plies.

    Game D: (3,3) c1, (4,4) c2, (6,4) c3, (9,4) c1, (9,9) c2,
            (10,9) c2, (16,16) c4, (16,13) c3, (17,14) c1, (17,16) c4
    Game E: (10,10) c5, (11,11) c1, (11,13) c5, (14,13) c2, (14,17) c5,
            pass, (14,18) c1, (13,18) c1, (3,18) c2, (3,16) c3, (5,12) c5
    Game F: (1,1) c6, (2,2) c6, (2,5) c2, (4,6) c6, (8,6) c1,
            (8,7) c2, (19,19) c3, (18,18) c3, (19,16) c6
    """
    game_d = [make_event(ply, h, v, c, "D") for ply, (h, v, c) in enumerate([
        (3, 3, 1), (4, 4, 2), (6, 4, 3), (9, 4, 1), (9, 9, 2),
        (10, 9, 2), (16, 16, 4), (16, 13, 3), (17, 14, 1), (17, 16, 4),
    ])]
    game_e = [make_event(ply, h, v, c, "E", index=i) for i, (ply, h, v, c) in enumerate([
        (0, 10, 10, 5), (1, 11, 11, 1), (2, 11, 13, 5), (3, 14, 13, 2), (4, 14, 17, 5),
        (6, 14, 18, 1), (7, 13, 18, 1), (8, 3, 18, 2), (9, 3, 16, 3), (10, 5, 12, 5),
    ])]
    game_f = [make_event(ply, h, v, c, "F") for ply, (h, v, c) in enumerate([
        (1, 1, 6), (2, 2, 6), (2, 5, 2), (4, 6, 6), (8, 6, 1),
        (8, 7, 2), (19, 19, 3), (18, 18, 3), (19, 16, 6),
    ])]
    return [game_d, game_e, game_f]


@pytest.fixture
def make_network():
    """Factory for small networks given as {(from, to): weight}"""

    def _make(edges, n_vertices, d=4, vertex_counts=None, n_games=1):
        if vertex_counts is None:
            counts = [0] * n_vertices
            for (a, b), w in edges.items():
                counts[a] += w
                counts[b] += w
            vertex_counts = counts
        return GoNetwork(
            config=NetworkConfig(d=d),
            n_vertices=n_vertices,
            edge_weights=dict(edges),
            vertex_counts=tuple(vertex_counts),
            n_games=n_games,
        )

    return _make
