"""Report files: JSON for structured data, CSV for plottable series, text for diagrams.

Every file starts with the same provenance header and contains no
timestamps, so identical inputs give byte-identical files.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel

from src import TOOL_NAME, __version__
from src.schemas.models import OutputHeader

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def make_header(command: str, config: Optional[Dict[str, Any]] = None,
                corpus_digest: Optional[str] = None) -> OutputHeader:
    return OutputHeader(
        tool=TOOL_NAME,
        version=__version__,
        command=command,
        config=dict(sorted((config or {}).items())),
        corpus_digest=corpus_digest,
    )


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: PathLike, payload: Union[BaseModel, Dict[str, Any]]) -> Path:
    path = _prepare(path)
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def _header_lines(header: OutputHeader) -> List[str]:
    return [
        f"# tool={header.tool}",
        f"# version={header.version}",
        f"# command={header.command}",
        f"# config={json.dumps(header.config, sort_keys=True)}",
        f"# corpus_digest={header.corpus_digest or ''}",
    ]


def write_csv(path: PathLike, header: OutputHeader, columns: Sequence[str],
              rows: Iterable[Sequence[Any]], notes: Optional[Dict[str, str]] = None) -> Path:
    """CSV with the provenance header; `notes` become extra `# key=value` lines"""
    path = _prepare(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        for line in _header_lines(header):
            f.write(line + "\n")
        for key, value in sorted((notes or {}).items()):
            f.write(f"# {key}={value}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(row)
    logger.info(f"Wrote {path}")
    return path


def write_text(path: PathLike, header: OutputHeader, lines: Iterable[str]) -> Path:
    path = _prepare(path)
    body = _header_lines(header) + [""] + list(lines)
    path.write_text("\n".join(body) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def complex_pairs(values: Iterable[complex]) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in values]
