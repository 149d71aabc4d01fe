import hashlib
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

BOARD_SIZE = 19
N_CLASSES = 1107


class Color(str, Enum):
    """Player color, valued by its SGF property name"""
    BLACK = "B"
    WHITE = "W"

    @property
    def opponent(self) -> "Color":
        return Color.WHITE if self is Color.BLACK else Color.BLACK


class Geometry(str, Enum):
    INTERIOR = "interior"
    EDGE = "edge"
    CORNER = "corner"


class Coord(BaseModel):
    """Board intersection; h is the column, v the row, both 1-based"""
    model_config = ConfigDict(frozen=True)

    h: int = Field(..., ge=1, le=BOARD_SIZE)
    v: int = Field(..., ge=1, le=BOARD_SIZE)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.h, self.v)


class MoveAction(BaseModel):
    """One recorded move; a missing target is a pass"""
    model_config = ConfigDict(frozen=True)

    color: Color
    target: Optional[Coord] = None

    @property
    def is_pass(self) -> bool:
        return self.target is None


class GameRecord(BaseModel):
    """Main line of one parsed game tree"""
    model_config = ConfigDict(frozen=True)

    id: str
    board_size: int = BOARD_SIZE
    setup_black: List[Coord] = Field(default_factory=list)
    setup_white: List[Coord] = Field(default_factory=list)
    moves: List[MoveAction] = Field(default_factory=list)
    metadata: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_board(self) -> "GameRecord":
        if self.board_size != BOARD_SIZE:
            raise ValueError(f"board_size must be {BOARD_SIZE}, got {self.board_size}")
        setup = self.setup_black + self.setup_white
        if len(set(setup)) != len(setup):
            raise ValueError(f"Game {self.id}: setup coordinates are not distinct")
        return self


class SourceCount(BaseModel):
    path: str
    n_games: int


class Corpus(BaseModel):
    """Ordered games plus per-file provenance"""
    games: List[GameRecord] = Field(default_factory=list)
    sources: List[SourceCount] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)

    @property
    def n_games(self) -> int:
        return len(self.games)

    def digest(self) -> str:
        """Content hash of all parsed games, in corpus order"""
        sha = hashlib.sha256()
        for game in self.games:
            sha.update(game.model_dump_json().encode("utf-8"))
            sha.update(b"\n")
        return sha.hexdigest()


class MoveEvent(BaseModel):
    """One played stone with the class of the plaquette it was played in.

    `index` counts non-pass moves; `ply` is the position in the full move
    list (passes included), so two events are consecutive when their plies
    differ by one.
    """
    model_config = ConfigDict(frozen=True)

    game_id: str
    index: int = Field(..., ge=0)
    ply: int = Field(..., ge=0)
    mover: Color
    at: Coord
    class_id: int = Field(..., ge=0)


class NetworkConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    d: int = Field(4, ge=1, description="Chebyshev link radius")


class RunConfig(BaseModel):
    """Validated options shared by the CLI subcommands"""
    input_paths: List[str] = Field(default_factory=list)
    d: int = Field(4, ge=1)
    alpha: float = Field(1.0, gt=0.0, le=1.0)
    shuffle_seed: Optional[int] = None
    output_dir: str = "./gonet_output"
    strict: bool = False
    workers: int = Field(1, ge=1)

    def network_config(self) -> NetworkConfig:
        return NetworkConfig(d=self.d)


# Persisted documents

class OutputHeader(BaseModel):
    """Provenance block written at the top of every output file"""
    tool: str
    version: str
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    corpus_digest: Optional[str] = None


class NetworkDocument(BaseModel):
    header: Optional[OutputHeader] = None
    config: NetworkConfig
    n_vertices: int = N_CLASSES
    n_games: int
    vertex_counts: List[int]
    edges: List[Tuple[int, int, int]]


class GameEvents(BaseModel):
    game_id: str
    # rows of [ply, mover, h, v, class_id]
    events: List[Tuple[int, Color, int, int, int]]


class EventsDocument(BaseModel):
    header: Optional[OutputHeader] = None
    games: List[GameEvents]


class PlaquetteRecord(BaseModel):
    """One row of the plaquette census"""
    id: int
    geometry: Geometry
    cells: str
    orbit_size: int


class SlopeFit(BaseModel):
    """Least-squares line through log10(value) vs log10(x)"""
    slope: float
    intercept: float
    fit_range: Tuple[float, float]
    n_points: int
    residual: float


# Query service responses

class RunRecord(BaseModel):
    command: str
    status: str
    started_at: Optional[datetime] = None
    ended_at: Optional[datetime] = None
    n_games: Optional[int] = None
    corpus_digest: Optional[str] = None
    error_message: Optional[str] = None


class HealthResponse(BaseModel):
    status: str
    network_loaded: bool
    ledger_connected: bool
    last_run: Optional[RunRecord] = None


class NetworkSummary(BaseModel):
    n_vertices: int
    n_games: int
    n_edges: int
    total_weight: int
    total_moves: int
    d: int
    corpus_digest: Optional[str] = None


class PlaquetteResponse(BaseModel):
    class_id: int
    geometry: Geometry
    diagram: List[str]
    frequency: int
    frequency_rank: Optional[int] = None


class RankingEntry(BaseModel):
    rank: int
    class_id: int
    value: float


class RankingResponse(BaseModel):
    algorithm: str
    alpha: Optional[float] = None
    entries: List[RankingEntry]


class ZipfResponse(BaseModel):
    n_classes_seen: int
    fit: SlopeFit
    top: List[RankingEntry]
