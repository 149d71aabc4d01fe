import logging
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Iterable, List, Optional, Union

from src.core.database import Database
from src.ingest.corpus import load_corpus
from src.network.builder import (
    GamesEvents,
    GoNetwork,
    build_network,
    extract_corpus_events,
    merge_networks,
    shuffle_baseline,
)
from src.schemas.models import Corpus, NetworkConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineResult:
    corpus: Corpus
    events: GamesEvents
    network: GoNetwork
    corpus_digest: str

    @property
    def game_ids(self) -> List[str]:
        return [g.id for g in self.corpus.games]


class NetworkPipeline:
    """Ingest -> replay -> network orchestrator with run recording"""

    def __init__(self, ledger: bool = True, ledger_url: Optional[str] = None):
        self.ledger = ledger
        self.ledger_url = ledger_url
        self.start_time: Optional[datetime] = None
        self.end_time: Optional[datetime] = None
        self.errors: List[str] = []

    def ingest(self, paths: Iterable[Union[str, Path]], strict: bool = False, workers: int = 1) -> Corpus:
        corpus = load_corpus(paths, strict=strict, workers=workers)
        self.errors.extend(corpus.warnings)
        return corpus

    def replay(self, corpus: Corpus, workers: int = 1) -> GamesEvents:
        return extract_corpus_events(corpus.games, workers=workers)

    def build(self, games_events: GamesEvents, config: NetworkConfig, workers: int = 1) -> GoNetwork:
        """Per-worker partial networks merged in order; identical to a single pass"""
        if workers > 1 and len(games_events) > workers:
            size = -(-len(games_events) // workers)
            parts = [build_network(games_events[i:i + size], config) for i in range(0, len(games_events), size)]
            return merge_networks(parts)
        return build_network(games_events, config)

    def run(self, paths: Iterable[Union[str, Path]], config: NetworkConfig,
            strict: bool = False, workers: int = 1) -> PipelineResult:
        """Execute ingest, replay and network accumulation"""
        self.start_time = datetime.now()
        logger.info(f"Starting network pipeline (d={config.d})")
        corpus = self.ingest(paths, strict=strict, workers=workers)
        digest = corpus.digest()
        events = self.replay(corpus, workers=workers)
        network = self.build(events, config, workers=workers)
        network = replace(network, corpus_digest=digest)
        logger.info(f"Network built: {network.n_edges} edges, total weight {network.total_weight}, "
                    f"{network.total_moves} moves from {network.n_games} games")
        return PipelineResult(corpus=corpus, events=events, network=network, corpus_digest=digest)

    def baseline(self, result: PipelineResult, seed: int) -> PipelineResult:
        """Shuffled-moves null model of an existing pipeline result"""
        shuffled = shuffle_baseline(result.events, seed)
        network = replace(build_network(shuffled, result.network.config), corpus_digest=result.corpus_digest)
        logger.info(f"Shuffled baseline (seed={seed}): {network.n_edges} edges")
        return PipelineResult(corpus=result.corpus, events=shuffled, network=network,
                              corpus_digest=result.corpus_digest)

    def record_run(self, command: str, success: bool, n_games: Optional[int] = None,
                   corpus_digest: Optional[str] = None, error_msg: Optional[str] = None):
        """Record run metadata in the ledger; ledger failures never fail the analysis"""
        if not self.ledger:
            return
        if not self.start_time:
            self.start_time = datetime.now()
        self.end_time = datetime.now()
        try:
            Database.initialize(self.ledger_url)
            Database.record_run(
                command=command,
                started_at=self.start_time,
                ended_at=self.end_time,
                status='success' if success else 'failed',
                n_games=n_games,
                corpus_digest=corpus_digest,
                error_message=error_msg,
            )
            logger.info(f"Run recorded: command={command}, status={'success' if success else 'failed'}, "
                        f"duration={(self.end_time - self.start_time).total_seconds()}s")
        except Exception as e:
            logger.warning(f"Could not record run in ledger: {e}")
        finally:
            Database.close()
