import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

from src.core.errors import CorpusError, GoNetError
from src.ingest.sgf_parser import parse_sgf
from src.schemas.models import Corpus, GameRecord, SourceCount

logger = logging.getLogger(__name__)

SGF_SUFFIXES = (".sgf",)


def source_names(paths: Iterable[Union[str, Path]]) -> Dict[Path, str]:
    """Every SGF file mapped to the name its game ids start with.

    Files found under a directory are named by their path relative to it,
    files given directly by their file name. Names that would still clash
    fall back to the path as given.
    """
    names: Dict[Path, str] = {}
    for entry in paths:
        path = Path(entry)
        if path.is_dir():
            for p in path.rglob("*"):
                if p.is_file() and p.suffix.lower() in SGF_SUFFIXES:
                    names.setdefault(p, p.relative_to(path).as_posix())
        else:
            names.setdefault(path, path.name)
    taken = Counter(names.values())
    return {p: name if taken[name] == 1 else p.as_posix() for p, name in names.items()}


def expand_paths(paths: Iterable[Union[str, Path]]) -> List[Path]:
    """Resolve files and directories (recursively) into a sorted file list"""
    return sorted(source_names(paths), key=lambda p: str(p))


def _read_file(path: Path, source: str) -> Tuple[Path, List[GameRecord]]:
    data = path.read_bytes()
    return path, parse_sgf(data, source=source)


def _safe_read(path: Path, source: str):
    try:
        return _read_file(path, source)
    except (OSError, GoNetError) as e:
        return path, e


def load_corpus(paths: Iterable[Union[str, Path]], strict: bool = False, workers: int = 1) -> Corpus:
    """Parse every SGF file and concatenate games in sorted-path order.

    Non-strict mode skips unreadable or malformed files with a warning;
    strict mode aborts on the first one.
    """
    names = source_names(paths)
    files = sorted(names, key=lambda p: str(p))
    logger.info(f"Loading {len(files)} SGF file(s)")

    # map() keeps input order, so the merge is deterministic whatever the worker count
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_safe_read, files, [names[p] for p in files]))
    else:
        results = [_safe_read(path, names[path]) for path in files]

    games: List[GameRecord] = []
    sources: List[SourceCount] = []
    warnings: List[str] = []
    for path, outcome in results:
        if isinstance(outcome, Exception):
            if strict:
                raise CorpusError(str(path), str(outcome)) from outcome
            message = f"Skipping {path}: {outcome}"
            logger.warning(message)
            warnings.append(message)
            continue
        games.extend(outcome)
        sources.append(SourceCount(path=str(path), n_games=len(outcome)))
        logger.debug(f"{path}: {len(outcome)} game(s)")

    logger.info(f"Corpus assembled: {len(games)} game(s) from {len(sources)} file(s), {len(warnings)} warning(s)")
    return Corpus(games=games, sources=sources, warnings=warnings)
