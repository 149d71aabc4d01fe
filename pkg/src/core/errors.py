"""Exception hierarchy shared by the library and the CLI.

Each error carries the exit code the CLI returns when it escapes a command.
"""
from typing import Optional


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class GoNetError(Exception):
    """Base class for all gonet errors"""
    exit_code = EXIT_DATA


class UsageError(GoNetError):
    """Invalid command-line or configuration values"""
    exit_code = EXIT_USAGE


# Ingestion

class SgfParseError(GoNetError):
    """Malformed SGF text"""

    def __init__(self, message: str, offset: Optional[int] = None):
        super().__init__(message if offset is None else f"{message} at byte offset {offset}")
        self.offset = offset


class UnsupportedBoardSizeError(GoNetError):
    def __init__(self, game_id: str, size: str):
        super().__init__(f"Game {game_id}: unsupported board size {size} (only 19x19 is supported)")
        self.game_id = game_id
        self.size = size


class InvalidCoordinateError(GoNetError):
    def __init__(self, value: str, game_id: Optional[str] = None):
        where = f"Game {game_id}: " if game_id else ""
        super().__init__(f"{where}invalid coordinate '{value}'")
        self.value = value
        self.game_id = game_id


class CorpusError(GoNetError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"Cannot load {path}: {reason}")
        self.path = path


# Rules and replay

class ContractViolationError(GoNetError):
    """A precondition of a library call was not met"""


class IllegalMoveError(GoNetError):
    """Occupied target or suicide during replay"""


class ReplayError(GoNetError):
    def __init__(self, game_id: str, move_number: int, reason: str):
        super().__init__(f"Game {game_id}, move {move_number}: {reason}")
        self.game_id = game_id
        self.move_number = move_number


class CorruptStateError(GoNetError):
    """A pattern that cannot be classified; indicates a geometry bug"""


# Networks and statistics

class NetworkMismatchError(GoNetError):
    """Networks built under different configurations cannot be merged"""


class StatsError(GoNetError):
    pass


class EmptyCorpusError(StatsError):
    pass


class InsufficientDataError(StatsError):
    pass


class UndefinedClusteringError(StatsError):
    pass


# Numerics

class NumericalError(GoNetError):
    exit_code = EXIT_NUMERICAL


class ConvergenceError(NumericalError):
    def __init__(self, algorithm: str, iterations: int, residual: float, hint: str = ""):
        message = f"{algorithm} did not converge after {iterations} iterations (last residual {residual:.3e})"
        if hint:
            message = f"{message}; {hint}"
        super().__init__(message)
        self.algorithm = algorithm
        self.iterations = iterations
        self.residual = residual
