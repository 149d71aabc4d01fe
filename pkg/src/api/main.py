from fastapi import FastAPI, Query, HTTPException
from fastapi.middleware.cors import CORSMiddleware
import logging
import threading
from typing import Dict, Optional, Tuple
import uuid

from src import __version__
from src.core.database import Database
from src.core.config import LOG_LEVEL, LEDGER_URL, NETWORK_PATH
from src.core.errors import ConvergenceError, GoNetError, StatsError
from src.core.logger import setup_logging
from src.go.plaquette import get_class_table, render_ascii
from src.network import spectral, stats
from src.network.builder import GoNetwork, load_network
from src.schemas.models import (
    HealthResponse,
    NetworkSummary,
    PlaquetteResponse,
    RankingEntry,
    RankingResponse,
    RunRecord,
    ZipfResponse,
)

# Setup logging
setup_logging(LOG_LEVEL)
logger = logging.getLogger(__name__)

app = FastAPI(title="Go Move Network API", version=__version__)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

RANK_ALGORITHMS = ("pagerank", "cheirank", "hubs", "authorities")

_lock = threading.Lock()
_network: Optional[GoNetwork] = None
_rankings: Dict[Tuple[str, float], spectral.RankingVector] = {}


def get_network() -> GoNetwork:
    """The served network, read from NETWORK_PATH on first use"""
    global _network
    with _lock:
        if _network is None:
            try:
                _network = load_network(NETWORK_PATH)
            except (OSError, GoNetError, ValueError) as e:
                logger.error(f"Could not load network from {NETWORK_PATH}: {e}")
                raise HTTPException(status_code=503, detail=f"Network not available: {e}")
            logger.info(f"Loaded network from {NETWORK_PATH}: {_network.n_edges} edges")
        return _network


def reset_network(network: Optional[GoNetwork] = None):
    """Swap the served network and drop cached rankings"""
    global _network
    with _lock:
        _network = network
        _rankings.clear()


def _ranking(alg: str, alpha: float) -> spectral.RankingVector:
    key = (alg, alpha)
    if key not in _rankings:
        net = get_network()
        if alg == "pagerank":
            vector = spectral.pagerank(spectral.build_google(net, alpha))
        elif alg == "cheirank":
            vector = spectral.cheirank(net, alpha)
        else:
            hubs, authorities = spectral.hits(net)
            _rankings[("hubs", alpha)] = hubs
            _rankings[("authorities", alpha)] = authorities
            vector = hubs if alg == "hubs" else authorities
        _rankings[key] = vector
    return _rankings[key]


@app.on_event("shutdown")
async def shutdown():
    logger.info("Shutting down application")
    Database.close()


@app.get("/health", response_model=HealthResponse)
def health_check():
    """
    Health check endpoint
    Reports whether a network is loaded and the last recorded run
    """
    try:
        get_network()
        network_loaded = True
    except HTTPException:
        network_loaded = False

    ledger_connected = bool(LEDGER_URL) and Database.check_connection()
    last_run = None
    if ledger_connected:
        try:
            row = Database.last_run()
            if row:
                last_run = RunRecord(**row)
        except Exception as e:
            logger.warning(f"Could not read last run: {e}")

    return HealthResponse(
        status="healthy" if network_loaded else "degraded",
        network_loaded=network_loaded,
        ledger_connected=ledger_connected,
        last_run=last_run,
    )


@app.get("/network", response_model=NetworkSummary)
def network_summary():
    net = get_network()
    return NetworkSummary(
        n_vertices=net.n_vertices,
        n_games=net.n_games,
        n_edges=net.n_edges,
        total_weight=net.total_weight,
        total_moves=net.total_moves,
        d=net.config.d,
        corpus_digest=net.corpus_digest,
    )


@app.get("/plaquettes/{class_id}", response_model=PlaquetteResponse)
def get_plaquette(class_id: int):
    """One plaquette class with its diagram and corpus frequency"""
    table = get_class_table()
    if not 0 <= class_id < len(table):
        raise HTTPException(status_code=404, detail=f"No plaquette class {class_id}")
    net = get_network()
    frequency = net.vertex_counts[class_id]
    frequency_rank = None
    if frequency > 0:
        dist = stats.frequency_from_counts(net.vertex_counts)
        frequency_rank = dist.labels.index(class_id) + 1
    plaquette = table[class_id]
    return PlaquetteResponse(
        class_id=class_id,
        geometry=plaquette.geometry,
        diagram=render_ascii(plaquette),
        frequency=frequency,
        frequency_rank=frequency_rank,
    )


@app.get("/rank/{alg}", response_model=RankingResponse)
def get_ranking(
    alg: str,
    top: int = Query(10, ge=1, le=1107),
    alpha: float = Query(1.0, gt=0.0, le=1.0),
):
    """Top vertices of a ranking vector"""
    request_id = str(uuid.uuid4())
    logger.info(f"[{request_id}] GET /rank/{alg} - top={top}, alpha={alpha}")
    if alg not in RANK_ALGORITHMS:
        raise HTTPException(status_code=404, detail=f"Unknown algorithm {alg}; use one of {', '.join(RANK_ALGORITHMS)}")
    try:
        vector = _ranking(alg, alpha)
    except ConvergenceError as e:
        logger.error(f"[{request_id}] {e}")
        raise HTTPException(status_code=500, detail=str(e))
    except GoNetError as e:
        raise HTTPException(status_code=422, detail=str(e))
    entries = [RankingEntry(rank=i + 1, class_id=v, value=value) for i, (v, value) in enumerate(vector.top(top))]
    return RankingResponse(algorithm=alg, alpha=alpha if alg in ("pagerank", "cheirank") else None, entries=entries)


@app.get("/stats/zipf", response_model=ZipfResponse)
def get_zipf(
    fit_min: float = Query(1, gt=0),
    fit_max: float = Query(500, gt=0),
    top: int = Query(10, ge=1, le=1107),
):
    """Ranked class frequencies and the slope of their integrated distribution"""
    if fit_max <= fit_min:
        raise HTTPException(status_code=422, detail="fit_max must exceed fit_min")
    net = get_network()
    try:
        dist = stats.frequency_from_counts(net.vertex_counts)
        fit = stats.fit_slope(dist.integrated, fit_min, fit_max)
    except StatsError as e:
        raise HTTPException(status_code=422, detail=str(e))
    entries = [RankingEntry(rank=i + 1, class_id=label, value=float(count))
               for i, (label, count) in enumerate(zip(dist.labels[:top], dist.counts[:top]))]
    return ZipfResponse(n_classes_seen=len(dist), fit=fit, top=entries)


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "Go Move Network API",
        "version": __version__,
        "endpoints": {
            "GET /health": "Health check",
            "GET /network": "Network summary",
            "GET /plaquettes/{class_id}": "Plaquette class and frequency",
            "GET /rank/{alg}": "Top vertices by pagerank, cheirank, hubs or authorities",
            "GET /stats/zipf": "Class frequency distribution",
        }
    }
