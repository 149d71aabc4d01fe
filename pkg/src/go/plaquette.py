"""Plaquette classes: mover-relative 3x3 patterns up to the symmetries of the square.

Color swap is absorbed by the Friend/Foe encoding, so the group acting on a
pattern is exactly the dihedral group of order 8. The canonical form of a
pattern is the lexicographically smallest of its 8 images, cells compared
row-major with Empty < Friend < Foe < OffBoard.
"""
import itertools
import logging
from enum import IntEnum
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from src.core.errors import ContractViolationError, CorruptStateError
from src.go.rules import CellState, RawPattern
from src.schemas.models import Color, Geometry, PlaquetteRecord

logger = logging.getLogger(__name__)

CENTER = 4


class RelativeCell(IntEnum):
    EMPTY = 0
    FRIEND = 1
    FOE = 2
    OFF_BOARD = 3


RelativePattern = Tuple[int, ...]

CELL_CHARS = {
    RelativeCell.EMPTY: "E",
    RelativeCell.FRIEND: "F",
    RelativeCell.FOE: "O",
    RelativeCell.OFF_BOARD: "#",
}
DIAGRAM_CHARS = {
    RelativeCell.EMPTY: ".",
    RelativeCell.FRIEND: "X",
    RelativeCell.FOE: "O",
    RelativeCell.OFF_BOARD: "#",
}


def _permutation(transform) -> Tuple[int, ...]:
    # image[r][c] = p[transform(r, c)]
    return tuple(3 * r2 + c2 for r in range(3) for c in range(3) for r2, c2 in [transform(r, c)])


# The 8 symmetries of the square, as permutations of the 9 cell indices
SYMMETRIES: Tuple[Tuple[int, ...], ...] = tuple(_permutation(t) for t in (
    lambda r, c: (r, c),            # identity
    lambda r, c: (2 - c, r),        # rotate 90
    lambda r, c: (2 - r, 2 - c),    # rotate 180
    lambda r, c: (c, 2 - r),        # rotate 270
    lambda r, c: (r, 2 - c),        # mirror left-right
    lambda r, c: (2 - r, c),        # mirror top-bottom
    lambda r, c: (c, r),            # transpose
    lambda r, c: (2 - c, 2 - r),    # anti-transpose
))

ROTATE_90 = SYMMETRIES[1]
ROTATE_180 = SYMMETRIES[2]


def apply_symmetry(p: RelativePattern, perm: Tuple[int, ...]) -> RelativePattern:
    return tuple(p[i] for i in perm)


def _footprint(p: Iterable[int]) -> frozenset:
    return frozenset(i for i, cell in enumerate(p) if cell == RelativeCell.OFF_BOARD)


# OffBoard cells as produced on a 19x19 board: none, one side, or a corner L
_EDGE_BASE = frozenset({6, 7, 8})
_CORNER_BASE = frozenset({0, 3, 6, 7, 8})
_VALID_FOOTPRINTS: Dict[frozenset, Geometry] = {frozenset(): Geometry.INTERIOR}
for _base, _geometry in ((_EDGE_BASE, Geometry.EDGE), (_CORNER_BASE, Geometry.CORNER)):
    for _perm in SYMMETRIES:
        _VALID_FOOTPRINTS[_footprint(apply_symmetry(
            tuple(RelativeCell.OFF_BOARD if i in _base else RelativeCell.EMPTY for i in range(9)), _perm))] = _geometry


def geometry_of(p: RelativePattern) -> Geometry:
    footprint = _footprint(p)
    if footprint not in _VALID_FOOTPRINTS:
        raise ContractViolationError(f"Off-board cells {sorted(footprint)} do not fit a 19x19 board")
    return _VALID_FOOTPRINTS[footprint]


def validate_pattern(p: RelativePattern):
    if len(p) != 9:
        raise ContractViolationError(f"Pattern must have 9 cells, got {len(p)}")
    if p[CENTER] != RelativeCell.EMPTY:
        raise ContractViolationError("Pattern center must be empty")
    geometry_of(p)


def encode(p: RelativePattern) -> int:
    """Base-4 integer, most significant cell first; orders like the tuples"""
    code = 0
    for cell in p:
        code = code * 4 + int(cell)
    return code


def cells_string(p: RelativePattern) -> str:
    return "".join(CELL_CHARS[RelativeCell(c)] for c in p)


def relativize(raw: RawPattern, mover: Color) -> RelativePattern:
    """Map the mover's stones to Friend and the opponent's to Foe"""
    if raw[CENTER] != CellState.EMPTY:
        raise ContractViolationError("Cannot classify a move on an occupied point")
    friend = CellState.BLACK if mover is Color.BLACK else CellState.WHITE
    out = []
    for cell in raw:
        if cell == CellState.EMPTY:
            out.append(RelativeCell.EMPTY)
        elif cell == CellState.OFF_BOARD:
            out.append(RelativeCell.OFF_BOARD)
        elif cell == friend:
            out.append(RelativeCell.FRIEND)
        else:
            out.append(RelativeCell.FOE)
    return tuple(int(c) for c in out)


def swap_colors(raw: RawPattern) -> RawPattern:
    swap = {CellState.BLACK: CellState.WHITE, CellState.WHITE: CellState.BLACK}
    return tuple(swap.get(cell, cell) for cell in raw)


@lru_cache(maxsize=None)
def canonicalize(p: RelativePattern) -> RelativePattern:
    """Lexicographically smallest image of p under the 8 symmetries"""
    p = tuple(int(c) for c in p)
    return min(apply_symmetry(p, perm) for perm in SYMMETRIES)


def orbit(p: RelativePattern) -> set:
    return {apply_symmetry(tuple(int(c) for c in p), perm) for perm in SYMMETRIES}


class PlaquetteClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    canonical_pattern: Tuple[int, ...]
    geometry: Geometry
    orbit_size: int

    def to_record(self) -> PlaquetteRecord:
        return PlaquetteRecord(
            id=self.id,
            geometry=self.geometry,
            cells=cells_string(self.canonical_pattern),
            orbit_size=self.orbit_size,
        )


class ClassTable:
    """The complete census of plaquette classes; immutable once built"""

    def __init__(self, classes: List[PlaquetteClass]):
        self.classes: Tuple[PlaquetteClass, ...] = tuple(classes)
        self.index: Dict[int, int] = {encode(c.canonical_pattern): c.id for c in self.classes}

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, class_id: int) -> PlaquetteClass:
        return self.classes[class_id]

    def count_by_geometry(self) -> Dict[Geometry, int]:
        counts = {g: 0 for g in Geometry}
        for c in self.classes:
            counts[c.geometry] += 1
        return counts

    def filter(self, geometry: Optional[Geometry] = None) -> List[PlaquetteClass]:
        return [c for c in self.classes if geometry is None or c.geometry == geometry]


def _free_cell_patterns(off_board: frozenset) -> Iterable[RelativePattern]:
    free = [i for i in range(9) if i != CENTER and i not in off_board]
    states = (RelativeCell.EMPTY, RelativeCell.FRIEND, RelativeCell.FOE)
    for values in itertools.product(states, repeat=len(free)):
        cells = [int(RelativeCell.OFF_BOARD) if i in off_board else int(RelativeCell.EMPTY) for i in range(9)]
        for i, value in zip(free, values):
            cells[i] = int(value)
        yield tuple(cells)


def enumerate_classes() -> ClassTable:
    """Exhaustive census: interior, bottom-edge and bottom-left-corner patterns, canonicalized and deduplicated"""
    canon: Dict[RelativePattern, Geometry] = {}
    for footprint, geometry in ((frozenset(), Geometry.INTERIOR), (_EDGE_BASE, Geometry.EDGE), (_CORNER_BASE, Geometry.CORNER)):
        for p in _free_cell_patterns(footprint):
            canon.setdefault(canonicalize(p), geometry)

    classes = [
        PlaquetteClass(id=i, canonical_pattern=p, geometry=canon[p], orbit_size=len(orbit(p)))
        for i, p in enumerate(sorted(canon, key=encode))
    ]
    logger.debug(f"Enumerated {len(classes)} plaquette classes")
    return ClassTable(classes)


@lru_cache(maxsize=1)
def get_class_table() -> ClassTable:
    return enumerate_classes()


def class_index(table: ClassTable, p: RelativePattern) -> int:
    """Id of the class containing p"""
    key = encode(canonicalize(tuple(p)))
    try:
        return table.index[key]
    except KeyError:
        raise CorruptStateError(f"Pattern {cells_string(tuple(p))} is not in the class table")


def render_ascii(c: PlaquetteClass) -> List[str]:
    """3x3 diagram: '+' is the point being played, X friend, O foe, '.' empty, '#' off board"""
    chars = [DIAGRAM_CHARS[RelativeCell(cell)] for cell in c.canonical_pattern]
    chars[CENTER] = "+"
    return ["".join(chars[r * 3:r * 3 + 3]) for r in range(3)]
