"""Board state with capture resolution, and raw 3x3 neighborhoods.

Grids are indexed [v - 1, h - 1]. Move replay flood-fills only the chains
touching the new stone; chain_liberties uses 4-connected
component labelling; liberties are the empty cells of a chain's dilation.
"""
import logging
from enum import IntEnum
from typing import FrozenSet, List, Optional, Set, Tuple

import numpy as np
from scipy import ndimage

from src.core.errors import ContractViolationError, IllegalMoveError
from src.schemas.models import BOARD_SIZE, Color, Coord

logger = logging.getLogger(__name__)

_CROSS = ndimage.generate_binary_structure(2, 1)


class CellState(IntEnum):
    EMPTY = 0
    BLACK = 1
    WHITE = 2
    OFF_BOARD = 3


RawPattern = Tuple[CellState, ...]


def stone_of(color: Color) -> CellState:
    return CellState.BLACK if color is Color.BLACK else CellState.WHITE


class BoardState:
    """19x19 grid of CellState; treated as immutable by the operations below"""

    __slots__ = ("grid",)

    def __init__(self, grid: Optional[np.ndarray] = None):
        if grid is None:
            grid = np.zeros((BOARD_SIZE, BOARD_SIZE), dtype=np.int8)
        grid.setflags(write=False)
        self.grid = grid

    @classmethod
    def empty(cls) -> "BoardState":
        return cls()

    @classmethod
    def from_stones(cls, black=(), white=()) -> "BoardState":
        """Place stones directly, without capture resolution (setup positions)"""
        grid = np.zeros((BOARD_SIZE, BOARD_SIZE), dtype=np.int8)
        for stone, coords in ((CellState.BLACK, black), (CellState.WHITE, white)):
            for c in coords:
                if grid[c.v - 1, c.h - 1] != CellState.EMPTY:
                    raise ContractViolationError(f"Setup point ({c.h},{c.v}) given twice")
                grid[c.v - 1, c.h - 1] = stone
        return cls(grid)

    def at(self, c: Coord) -> CellState:
        return CellState(int(self.grid[c.v - 1, c.h - 1]))

    def stones(self, state: CellState) -> Set[Coord]:
        vs, hs = np.nonzero(self.grid == state)
        return {Coord(h=int(h) + 1, v=int(v) + 1) for v, h in zip(vs, hs)}

    def __eq__(self, other) -> bool:
        return isinstance(other, BoardState) and np.array_equal(self.grid, other.grid)

    def __repr__(self) -> str:
        symbols = {CellState.EMPTY: ".", CellState.BLACK: "X", CellState.WHITE: "O"}
        rows = ["".join(symbols[CellState(int(x))] for x in row) for row in self.grid]
        return "BoardState(\n" + "\n".join(rows) + "\n)"


def _chain_mask(grid: np.ndarray, v: int, h: int) -> np.ndarray:
    labels, _ = ndimage.label(grid == grid[v, h], structure=_CROSS)
    return labels == labels[v, h]


def _liberty_count(grid: np.ndarray, chain: np.ndarray) -> int:
    halo = ndimage.binary_dilation(chain, structure=_CROSS)
    return int(np.count_nonzero(halo & (grid == CellState.EMPTY)))


def chain_liberties(board: BoardState, at: Coord) -> Tuple[FrozenSet[Coord], int]:
    """Maximal 4-connected same-color chain through `at` and its liberty count"""
    if board.at(at) not in (CellState.BLACK, CellState.WHITE):
        raise ContractViolationError(f"No stone at ({at.h},{at.v})")
    chain = _chain_mask(board.grid, at.v - 1, at.h - 1)
    vs, hs = np.nonzero(chain)
    members = frozenset(Coord(h=int(h) + 1, v=int(v) + 1) for v, h in zip(vs, hs))
    return members, _liberty_count(board.grid, chain)


_OFFSETS = ((-1, 0), (1, 0), (0, -1), (0, 1))
_EMPTY = int(CellState.EMPTY)


def _adjacent(v: int, h: int):
    for dv, dh in _OFFSETS:
        nv, nh = v + dv, h + dh
        if 0 <= nv < BOARD_SIZE and 0 <= nh < BOARD_SIZE:
            yield nv, nh


def _dead_chain(rows: List[List[int]], v: int, h: int) -> Optional[Set[Tuple[int, int]]]:
    """Cells of the chain through (v, h) if it has no liberty; None once a liberty turns up"""
    stone = rows[v][h]
    chain = {(v, h)}
    stack = [(v, h)]
    while stack:
        cv, ch = stack.pop()
        for nv, nh in _adjacent(cv, ch):
            cell = rows[nv][nh]
            if cell == _EMPTY:
                return None
            if cell == stone and (nv, nh) not in chain:
                chain.add((nv, nh))
                stack.append((nv, nh))
    return chain


def place_stone(board: BoardState, color: Color, at: Coord) -> Tuple[BoardState, List[Coord]]:
    """Play a stone, remove opposing chains left without liberties.

    All captured chains are removed together before the mover's own chain is
    checked; a move that leaves it without liberties is suicide. Only chains
    touching the new stone are searched.
    """
    if board.at(at) != CellState.EMPTY:
        raise IllegalMoveError(f"Point ({at.h},{at.v}) is occupied")

    v, h = at.v - 1, at.h - 1
    grid = board.grid.copy()
    grid[v, h] = stone_of(color)
    foe = int(stone_of(color.opponent))
    rows = grid.tolist()

    dead: Set[Tuple[int, int]] = set()
    for nv, nh in _adjacent(v, h):
        if rows[nv][nh] == foe and (nv, nh) not in dead:
            chain = _dead_chain(rows, nv, nh)
            if chain:
                dead |= chain

    captured: List[Coord] = []
    if dead:
        for cv, ch in dead:
            rows[cv][ch] = _EMPTY
            grid[cv, ch] = CellState.EMPTY
        captured = sorted((Coord(h=ch + 1, v=cv + 1) for cv, ch in dead), key=lambda c: (c.v, c.h))

    if _dead_chain(rows, v, h):
        raise IllegalMoveError(f"Suicide at ({at.h},{at.v})")

    return BoardState(grid), captured


def neighborhood(board: BoardState, at: Coord) -> RawPattern:
    """Nine cells row-major over rows v-1..v+1 and columns h-1..h+1"""
    cells = []
    for v in (at.v - 1, at.v, at.v + 1):
        for h in (at.h - 1, at.h, at.h + 1):
            if 1 <= h <= BOARD_SIZE and 1 <= v <= BOARD_SIZE:
                cells.append(CellState(int(board.grid[v - 1, h - 1])))
            else:
                cells.append(CellState.OFF_BOARD)
    return tuple(cells)
