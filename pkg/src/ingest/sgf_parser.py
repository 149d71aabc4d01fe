"""SGF reading and writing on top of sgfmill.

Only the main line of every game tree is kept (first variation at each
branch). B, W, AB and AW drive replay; every other root property is kept
as text in the game metadata.
"""
import logging
from typing import Dict, List, Optional, Tuple, Union

from sgfmill import sgf, sgf_grammar, sgf_properties

from src.core.errors import InvalidCoordinateError, SgfParseError, UnsupportedBoardSizeError
from src.schemas.models import BOARD_SIZE, Color, Coord, GameRecord, MoveAction

logger = logging.getLogger(__name__)

_STRUCTURAL_PROPS = {"B", "W", "AB", "AW", "AE"}
_COLORS = {"b": Color.BLACK, "w": Color.WHITE}

Point = Tuple[int, int]


def _decode_text(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def _to_coord(point: Point) -> Coord:
    # sgfmill counts rows from the bottom edge; v counts from the top
    row, col = point
    return Coord(h=col + 1, v=BOARD_SIZE - row)


def _to_point(coord: Coord) -> Point:
    return BOARD_SIZE - coord.v, coord.h - 1


def decode_point(value: str, game_id: Optional[str] = None) -> Optional[Coord]:
    """Decode a two-letter SGF point ("aa" is (1,1)); None means pass"""
    try:
        point = sgf_properties.interpret_go_point(value.strip().encode("ascii"), BOARD_SIZE)
    except (ValueError, UnicodeEncodeError):
        raise InvalidCoordinateError(value, game_id)
    return None if point is None else _to_coord(point)


def encode_point(coord: Optional[Coord]) -> str:
    if coord is None:
        return ""
    return sgf_properties.serialise_go_point(_to_point(coord), BOARD_SIZE).decode("ascii")


def _error_offset(buf: bytes) -> Optional[int]:
    """Byte offset where tokenizing stopped inside an unfinished game tree"""
    position = 0
    while True:
        tokens, end = sgf_grammar.tokenise(buf, position)
        if not tokens:
            return position if position == 0 else None
        if tokens[-1][1] not in (b")", ")"):
            return end
        position = end


def _check_board_size(root: Dict[str, List[bytes]], game_id: str):
    """Accept SZ[19] and SZ[19:19]; sgfmill itself only reads the square form"""
    if "SZ" not in root:
        return
    raw = _decode_text(root["SZ"][0]).strip()
    try:
        sizes = {int(x) for x in raw.split(":")}
    except ValueError:
        raise UnsupportedBoardSizeError(game_id, raw)
    if sizes != {BOARD_SIZE}:
        raise UnsupportedBoardSizeError(game_id, raw)
    root["SZ"] = [str(BOARD_SIZE).encode("ascii")]


def _metadata(node) -> Dict[str, str]:
    return {
        key: ",".join(_decode_text(sgf_grammar.text_value(raw)) for raw in node.get_raw_list(key))
        for key in node.properties()
        if key not in _STRUCTURAL_PROPS
    }


def _setup_stones(node, game_id: str) -> Tuple[List[Coord], List[Coord]]:
    try:
        black, white, _ = node.get_setup_stones()
    except ValueError as e:
        raise InvalidCoordinateError(f"setup ({e})", game_id)
    if black & white:
        raise InvalidCoordinateError("duplicate setup stone", game_id)
    return _row_major(black), _row_major(white)


def _row_major(points) -> List[Coord]:
    return sorted(map(_to_coord, points), key=lambda c: (c.v, c.h))


def _move(node, game_id: str) -> Optional[MoveAction]:
    try:
        colour, point = node.get_move()
    except ValueError:
        _, raw = node.get_raw_move()
        raise InvalidCoordinateError(_decode_text(raw), game_id)
    if colour is None:
        return None
    return MoveAction(color=_COLORS[colour], target=None if point is None else _to_coord(point))


def _build_game(tree, game_id: str) -> GameRecord:
    _check_board_size(tree.sequence[0], game_id)
    try:
        game = sgf.Sgf_game.from_coarse_game_tree(tree)
    except ValueError as e:
        raise SgfParseError(f"game {game_id}: {e}")

    nodes = game.get_main_sequence()
    setup_black: List[Coord] = []
    setup_white: List[Coord] = []
    moves: List[MoveAction] = []
    for node in nodes:
        if node.has_setup_stones():
            if moves:
                logger.warning(f"Game {game_id}: ignoring setup stones after move {len(moves)}")
            else:
                black, white = _setup_stones(node, game_id)
                setup_black.extend(black)
                setup_white.extend(white)
        move = _move(node, game_id)
        if move is not None:
            moves.append(move)

    return GameRecord(
        id=game_id,
        setup_black=setup_black,
        setup_white=setup_white,
        moves=moves,
        metadata=_metadata(nodes[0]),
    )


def parse_sgf(text: Union[str, bytes], source: str = "<string>") -> List[GameRecord]:
    """Parse an SGF collection into one GameRecord per game tree"""
    buf = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    try:
        trees = sgf_grammar.parse_sgf_collection(buf)
    except ValueError as e:
        raise SgfParseError(str(e), _error_offset(buf))
    games = [_build_game(tree, f"{source}#{index}") for index, tree in enumerate(trees)]
    logger.debug(f"Parsed {len(games)} game(s) from {source}")
    return games


def to_sgf(game: GameRecord) -> str:
    """Serialize the main line back to SGF"""
    out = sgf.Sgf_game(size=BOARD_SIZE)
    root = out.get_root()
    for key in ("FF", "GM", "SZ", "CA"):
        if key not in game.metadata and root.has_property(key):
            root.unset(key)
    for key, value in game.metadata.items():
        root.set_raw(key, sgf_grammar.escape_text(value.encode("utf-8")))
    if game.setup_black or game.setup_white:
        root.set_setup_stones([_to_point(c) for c in game.setup_black],
                              [_to_point(c) for c in game.setup_white])
    for move in game.moves:
        node = out.extend_main_sequence()
        node.set_move(move.color.value.lower(), None if move.target is None else _to_point(move.target))
    return out.serialise().decode("utf-8")
