import itertools

import numpy as np
import pytest

from src.core.errors import ContractViolationError, CorruptStateError
from src.go.plaquette import (
    ROTATE_180,
    SYMMETRIES,
    RelativeCell,
    apply_symmetry,
    canonicalize,
    class_index,
    encode,
    geometry_of,
    get_class_table,
    relativize,
    render_ascii,
    swap_colors,
    validate_pattern,
)
from src.go.rules import BoardState, CellState, neighborhood
from src.schemas.models import BOARD_SIZE, N_CLASSES, Color, Coord, Geometry

E, F, O, X = (int(c) for c in RelativeCell)


@pytest.fixture(scope="module")
def table():
    return get_class_table()


def _random_patterns(n, seed=7):
    """Valid (raw, mover) pairs taken from random boards"""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        grid = rng.choice([0, 1, 2], size=(BOARD_SIZE, BOARD_SIZE), p=[0.5, 0.25, 0.25]).astype(np.int8)
        board = BoardState(grid)
        # bias towards the border so edge and corner windows are well covered
        for _ in range(50):
            h = int(rng.choice([1, 2, int(rng.integers(1, 20)), 18, 19]))
            v = int(rng.choice([1, 2, int(rng.integers(1, 20)), 18, 19]))
            raw = neighborhood(board, Coord(h=h, v=v))
            if raw[4] == CellState.EMPTY:
                out.append((raw, Color.BLACK if rng.random() < 0.5 else Color.WHITE))
    return out[:n]


@pytest.mark.unit
def test_census_counts(table):
    counts = table.count_by_geometry()
    assert len(table) == N_CLASSES == 1107
    assert counts[Geometry.INTERIOR] == 954
    assert counts[Geometry.EDGE] == 135
    assert counts[Geometry.CORNER] == 18


def _turn(p):
    return tuple(p[3 * (2 - c) + r] for r in range(3) for c in range(3))


def _flip(p):
    return tuple(p[3 * r + (2 - c)] for r in range(3) for c in range(3))


def _smallest_image(p):
    images = []
    for q in (p, _flip(p)):
        for _ in range(4):
            images.append(q)
            q = _turn(q)
    return min(images)


def _enumerate_orbits(h, v):
    """Orbit representatives of every fill of the 3x3 window around (h, v)"""
    cells = [(h + dh, v + dv) for dv in (-1, 0, 1) for dh in (-1, 0, 1)]
    free = [i for i, (ch, cv) in enumerate(cells)
            if i != 4 and 1 <= ch <= BOARD_SIZE and 1 <= cv <= BOARD_SIZE]
    reps = set()
    for fill in itertools.product((E, F, O), repeat=len(free)):
        p = [X] * 9
        p[4] = E
        for i, cell in zip(free, fill):
            p[i] = cell
        reps.add(_smallest_image(tuple(p)))
    return reps


@pytest.mark.unit
def test_census_matches_brute_force_orbits(table):
    n = BOARD_SIZE
    interior = _enumerate_orbits(10, 10)
    edge = set().union(*(_enumerate_orbits(h, v) for h, v in ((1, 10), (n, 10), (10, 1), (10, n))))
    corner = set().union(*(_enumerate_orbits(h, v) for h, v in ((1, 1), (1, n), (n, 1), (n, n))))

    assert (len(interior), len(edge), len(corner)) == (954, 135, 18)
    for geometry, reps in ((Geometry.INTERIOR, interior), (Geometry.EDGE, edge), (Geometry.CORNER, corner)):
        assert {c.canonical_pattern for c in table.filter(geometry=geometry)} == reps


@pytest.mark.unit
def test_ids_follow_encoding_order(table):
    codes = [encode(c.canonical_pattern) for c in table.classes]
    assert codes == sorted(codes)
    assert [c.id for c in table.classes] == list(range(len(table)))


@pytest.mark.unit
def test_all_empty_interior_is_class_zero(table):
    empty = (E,) * 9
    assert canonicalize(empty) == empty
    assert class_index(table, empty) == 0


@pytest.mark.unit
def test_relativize_maps_colors():
    raw = (CellState.BLACK,) + (CellState.EMPTY,) * 8
    assert relativize(raw, Color.BLACK)[0] == F
    assert relativize(raw, Color.WHITE)[0] == O
    assert relativize((CellState.EMPTY,) * 9, Color.BLACK) == (E,) * 9


@pytest.mark.unit
def test_relativize_rejects_occupied_center():
    raw = (CellState.EMPTY,) * 4 + (CellState.BLACK,) + (CellState.EMPTY,) * 4
    with pytest.raises(ContractViolationError):
        relativize(raw, Color.BLACK)


@pytest.mark.unit
def test_invalid_footprint_rejected():
    with pytest.raises(ContractViolationError):
        validate_pattern((X, E, E, E, E, E, E, E, X))
    with pytest.raises(ContractViolationError):
        geometry_of((X, E, E, E, E, E, E, E, E))


@pytest.mark.unit
def test_unknown_pattern_is_corrupt_state(table):
    with pytest.raises(CorruptStateError):
        class_index(table, (X, E, E, E, E, E, E, E, X))


@pytest.mark.unit
def test_random_patterns_properties(table):
    for raw, mover in _random_patterns(10000):
        p = relativize(raw, mover)
        canon = canonicalize(p)

        assert canonicalize(canon) == canon
        assert encode(canon) <= encode(p)
        # every symmetry image lands in the same class
        ids = {class_index(table, apply_symmetry(p, perm)) for perm in SYMMETRIES}
        assert len(ids) == 1
        class_id = ids.pop()
        assert 0 <= class_id < N_CLASSES
        assert table[class_id].geometry == geometry_of(p)
        # swapping colors and mover describes the same move
        assert relativize(swap_colors(raw), mover.opponent) == p


@pytest.mark.unit
def test_rotate_180_same_class(table):
    p = (F, O, E, E, E, E, E, F, E)
    assert class_index(table, p) == class_index(table, apply_symmetry(p, ROTATE_180))


@pytest.mark.unit
def test_orbit_sizes_divide_group_order(table):
    assert all(8 % c.orbit_size == 0 for c in table.classes)
    assert sum(c.orbit_size for c in table.filter(Geometry.INTERIOR)) == 3 ** 8


@pytest.mark.unit
def test_render_empty_interior(table):
    assert render_ascii(table[0]) == ["...", ".+.", "..."]


@pytest.mark.unit
def test_render_empty_corner(table):
    corner = [c for c in table.filter(Geometry.CORNER) if F not in c.canonical_pattern and O not in c.canonical_pattern]
    assert len(corner) == 1
    diagram = render_ascii(corner[0])
    assert diagram == ["..#", ".+#", "###"]


@pytest.mark.unit
def test_render_single_friend(table):
    p = (F, E, E, E, E, E, E, E, E)
    diagram = render_ascii(table[class_index(table, p)])
    assert "".join(diagram).count("X") == 1
    assert "O" not in "".join(diagram)


@pytest.mark.unit
def test_records_carry_cells(table):
    record = table[0].to_record()
    assert record.cells == "EEEEEEEEE"
    assert record.geometry == Geometry.INTERIOR
    assert record.orbit_size == 1
