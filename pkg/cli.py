#!/usr/bin/env python
"""
CLI for building and analysing go move networks
Usage: python cli.py --help
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from src.core.config import DEFAULT_ALPHA, DEFAULT_D, LEDGER_URL, LOG_LEVEL, OUTPUT_DIR, WORKERS, API_HOST, API_PORT
from src.core.errors import EXIT_DATA, EXIT_OK, EXIT_USAGE, ConvergenceError, GoNetError, UsageError
from src.core.logger import setup_logging
from src.etl.pipeline import NetworkPipeline
from src.go.plaquette import get_class_table
from src.network import spectral, stats
from src.network.builder import (
    GamesEvents,
    GoNetwork,
    events_to_document,
    load_events,
    load_network,
    network_to_document,
)
from src.reports.writers import complex_pairs, make_header, write_csv, write_json, write_text
from src.schemas.models import Geometry, RunConfig

logger = logging.getLogger("gonet.cli")

STATS_CHOICES = ("zipf", "positions", "seq", "c1", "c2", "c3", "pd", "degrees", "sweep", "cc")
RANK_CHOICES = ("pagerank", "cheirank", "hits", "all")
ZIPF_FIT_MAX = 500


class UsageArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; usage errors here exit with 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _run_config(args, **extra) -> RunConfig:
    try:
        return RunConfig(
            input_paths=list(getattr(args, "input", None) or []),
            d=DEFAULT_D if getattr(args, "d", None) is None else args.d,
            alpha=getattr(args, "alpha", DEFAULT_ALPHA),
            shuffle_seed=getattr(args, "shuffle_seed", None),
            output_dir=args.output_dir,
            strict=getattr(args, "strict", False),
            workers=getattr(args, "workers", WORKERS),
            **extra,
        )
    except ValidationError as e:
        raise UsageError(str(e)) from e


def _out(args, attr: str, default_name: str) -> Path:
    value = getattr(args, attr, None)
    return Path(value) if value else Path(args.output_dir) / default_name


def _label(label: Any, which: str) -> str:
    if which == "positions":
        return f"{label[0]}:{label[1]}"
    if which in ("c1", "c2", "c3"):
        return ">".join(f"{a}:{b}" for a, b in label)
    if which == "seq":
        return ">".join(str(x) for x in label)
    return str(label)


# enumerate-plaquettes

def cmd_enumerate(args) -> int:
    table = get_class_table()
    counts = table.count_by_geometry()
    geometry = Geometry(args.geometry) if args.geometry else None
    rows = [c.to_record().model_dump(mode="json") for c in table.filter(geometry)]
    header = make_header("enumerate-plaquettes", {"geometry": args.geometry})
    write_json(_out(args, "out", "plaquettes.json"), {
        "header": header.model_dump(mode="json"),
        "summary": {
            "total": len(table),
            "interior": counts[Geometry.INTERIOR],
            "edge": counts[Geometry.EDGE],
            "corner": counts[Geometry.CORNER],
        },
        "classes": rows,
    })
    print(f"{len(table)} classes ({counts[Geometry.INTERIOR]} interior / "
          f"{counts[Geometry.EDGE]} edge / {counts[Geometry.CORNER]} corner)")
    return EXIT_OK


# build

def cmd_build(args, pipeline: NetworkPipeline) -> int:
    config = _run_config(args)
    if not config.input_paths:
        raise UsageError("build needs at least one --input path")
    result = pipeline.run(config.input_paths, config.network_config(), strict=config.strict,
                          workers=config.workers)
    header = make_header("build", {"d": config.d}, result.corpus_digest)
    write_json(_out(args, "out", "net.json"), network_to_document(result.network, header))
    write_json(_out(args, "events", "events.json"), events_to_document(result.events, result.game_ids, header))
    for source in result.corpus.sources:
        logger.info(f"{source.path}: {source.n_games} game(s)")
    print(f"{result.network.n_games} games, {result.network.total_moves} moves, "
          f"{result.network.n_edges} edges (total weight {result.network.total_weight})")
    pipeline.record_run("build", True, result.network.n_games, result.corpus_digest)
    return EXIT_OK


# stats

def _distribution_rows(dist: stats.RankedDistribution, which: str):
    return [(r + 1, _label(label, which), count, integrated)
            for r, (label, count, integrated) in enumerate(zip(dist.labels, dist.counts, dist.integrated))]


def _fit_notes(values: Sequence[float], r_min: float, r_max: Optional[float],
               x: Optional[Sequence[float]] = None, prefix: str = "fit") -> Dict[str, str]:
    try:
        fit = stats.fit_slope(values, r_min, r_max, x=x)
    except GoNetError as e:
        logger.warning(f"No slope fit: {e}")
        return {}
    logger.info(f"{prefix}: slope {fit.slope:.4f} over {fit.n_points} points")
    return {f"{prefix}_slope": f"{fit.slope:.6f}", f"{prefix}_intercept": f"{fit.intercept:.6f}",
            f"{prefix}_range": f"{fit.fit_range[0]:g}-{fit.fit_range[1]:g}",
            f"{prefix}_residual": f"{fit.residual:.6f}"}


def _stats_d(args, events_header) -> int:
    if args.d:
        return args.d
    if events_header is not None and "d" in events_header.config:
        return int(events_header.config["d"])
    return DEFAULT_D


def cmd_stats(args) -> int:
    which = args.which
    network: Optional[GoNetwork] = None
    events: Optional[GamesEvents] = None
    events_header = None
    digest = None
    if which in ("zipf", "degrees", "cc"):
        network = load_network(_out(args, "network", "net.json"))
        digest = network.corpus_digest
    if which in ("positions", "seq", "c1", "c2", "c3", "pd", "sweep", "cc"):
        events, events_header = load_events(_out(args, "events", "events.json"))
        digest = digest or (events_header.corpus_digest if events_header else None)

    d = _stats_d(args, events_header) if network is None else (args.d or network.config.d)
    k = args.k
    header = make_header("stats", {"which": which, "k": k, "d": d,
                                   "fit_min": args.fit_min, "fit_max": args.fit_max}, digest)
    out = _out(args, "out", f"stats_{which}.csv")
    columns = ("rank", "label", "count", "integrated")

    if which == "zipf":
        dist = stats.frequency_from_counts(network.vertex_counts)
        notes = _fit_notes(dist.integrated, args.fit_min or 1, args.fit_max or ZIPF_FIT_MAX)
        write_csv(out, header, columns, _distribution_rows(dist, which), notes)
    elif which in ("positions", "seq", "c1", "c2", "c3"):
        if which == "positions":
            dist = stats.position_frequency(events)
        elif which == "seq":
            dist = stats.sequence_frequency(events, k, d)
        elif which == "c1":
            dist = stats.variant_c1(events, k)
        elif which == "c2":
            dist = stats.variant_c2(events, d, k)
        else:
            dist = stats.variant_c3(events, d, k)
        notes = _fit_notes(dist.integrated, args.fit_min or 1, args.fit_max)
        write_csv(out, header, columns, _distribution_rows(dist, which), notes)
    elif which == "pd":
        p = stats.distance_distribution(events)
        write_csv(out, header, ("k", "P"), list(enumerate(p)))
    elif which == "degrees":
        curves = stats.degree_distributions(network)
        rows, notes = [], {}
        for name in ("p_in", "p_out", "weighted_in", "weighted_out"):
            curve = getattr(curves, name)
            rows.extend((name, kk, x, y) for kk, x, y in zip(curve.k, curve.k_normalized, curve.fraction_above))
            if name in ("p_in", "p_out"):
                notes.update(_fit_notes(curve.fraction_above, args.fit_min or 1e-9, args.fit_max,
                                        x=curve.k_normalized, prefix=name))
        write_csv(out, header, ("curve", "k", "k_normalized", "fraction_above"), rows, notes)
    elif which == "sweep":
        rows = []
        for sweep_d, curves in stats.degree_sweep(events, args.ds or (2, 3, 4, 5, 6)).items():
            for name in ("p_in", "p_out"):
                curve = getattr(curves, name)
                rows.extend((sweep_d, name, kk, x, y)
                            for kk, x, y in zip(curve.k, curve.k_normalized, curve.fraction_above))
        write_csv(out, header, ("d", "curve", "k", "k_normalized", "fraction_above"), rows)
    elif which == "cc":
        checkpoints = args.checkpoints or [len(events)]
        series = stats.cc_vs_games(events, network.config if not args.d else
                                   network.config.model_copy(update={"d": args.d}), checkpoints)
        write_csv(out, header, ("n_g", "cc"), series)
        print(f"average CC at {series[-1][0]} games: {series[-1][1]:.4f}")
    return EXIT_OK


# rank

def _ranking_payload(vector: spectral.RankingVector, top: int) -> Dict[str, Any]:
    _, fit = spectral.ranking_distribution(vector)
    return {
        "values": [float(x) for x in vector.values],
        "ranks": [int(r) + 1 for r in vector.ranks],
        "iterations": vector.iterations,
        "top": [{"rank": i + 1, "class_id": v, "value": val} for i, (v, val) in enumerate(vector.top(top))],
        "sorted_slope": fit.model_dump(mode="json") if fit else None,
    }


def _pagerank_of(net: GoNetwork, args, kind: spectral.RankKind) -> spectral.RankingVector:
    g = spectral.build_google(net if kind is spectral.RankKind.PAGERANK else net.transpose(), args.alpha)
    try:
        return spectral.pagerank(g, args.tol, args.max_iter, kind=kind)
    except ConvergenceError as e:
        if not args.dense_fallback:
            raise
        logger.warning(f"{e}; using the dense eigensolver")
        return spectral.dominant_eigenvector(g, kind=kind)


def cmd_rank(args) -> int:
    if not 0.0 < args.alpha <= 1.0:
        raise UsageError(f"alpha must be in (0, 1], got {args.alpha}")
    net = load_network(_out(args, "network", "net.json"))
    header = make_header("rank", {"alg": args.alg, "alpha": args.alpha, "tol": args.tol,
                                  "max_iter": args.max_iter, "weighted": not args.unweighted},
                         net.corpus_digest)
    vectors: Dict[str, spectral.RankingVector] = {}
    if args.alg in ("pagerank", "all") or args.scatter:
        vectors["pagerank"] = _pagerank_of(net, args, spectral.RankKind.PAGERANK)
    if args.alg in ("cheirank", "all") or args.scatter:
        vectors["cheirank"] = _pagerank_of(net, args, spectral.RankKind.CHEIRANK)
    if args.alg in ("hits", "all"):
        hubs, authorities = spectral.hits(net, tol=max(args.tol, 1e-10),
                                          max_iter=args.max_iter, weighted=not args.unweighted)
        vectors["hubs"], vectors["authorities"] = hubs, authorities

    payload: Dict[str, Any] = {
        "header": header.model_dump(mode="json"),
        "algorithm": args.alg,
        "alpha": args.alpha,
        "vectors": {name: _ranking_payload(v, args.top) for name, v in vectors.items()},
    }
    if "pagerank" in vectors and "cheirank" in vectors:
        corr = spectral.rank_correlation(vectors["pagerank"], vectors["cheirank"])
        payload["kendall_tau"] = corr.tau
        if args.scatter:
            write_csv(args.scatter, header, ("class_id", "K", "K_star"),
                      [(v, kk, ks) for v, (kk, ks) in enumerate(corr.pairs)], {"kendall_tau": f"{corr.tau:.6f}"})
    write_json(_out(args, "out", f"rank_{args.alg}.json"), payload)
    for name, vector in vectors.items():
        print(f"{name}: top {args.top} = {[v for v, _ in vector.top(args.top)]}")
    return EXIT_OK


# spectrum

def _diagram_block(title: str, entries: List[spectral.TopEntry]) -> List[str]:
    lines = [title]
    shown = [e for e in entries if e.diagram]
    if shown:
        for row in range(3):
            lines.append("  ".join(e.diagram[row] for e in shown))
    for rank, e in enumerate(entries, start=1):
        lines.append(f"{rank:>3d}. class {e.class_id:>4d}  |psi|^2 = {e.weight:.6e}")
    lines.append("")
    return lines


def spectrum_payload(net: GoNetwork, alpha: float, top: int, percents: Sequence[float],
                     profile_size: int, entries: int):
    """Dense spectrum of one network as a JSON-ready dict plus the diagram lines"""
    g = spectral.build_google(net, alpha)
    order = spectral.frequency_order(net.vertex_counts)
    report = spectral.full_spectrum(g, m=top, percents=percents, freq_order=order, profile_size=profile_size)
    table = get_class_table()
    vectors, diagram_lines = [], []
    for i, vector in enumerate(report.right_eigenvectors):
        lam = report.eigenvalues[i]
        top_entries = spectral.top_entries(vector, min(entries, net.n_vertices), table)
        vectors.append({
            "index": i + 1,
            "eigenvalue": [float(lam.real), float(lam.imag)],
            "modulus": float(abs(lam)),
            "vector": complex_pairs(vector),
            "profile": [float(x) for x in report.localization[i]],
            "top_entries": [{"class_id": e.class_id, "weight": e.weight} for e in top_entries],
        })
        diagram_lines.extend(_diagram_block(
            f"lambda_{i + 1} = {lam.real:+.6f}{lam.imag:+.6f}i  (|lambda| = {abs(lam):.6f})", top_entries))
    payload = {
        "n": g.n,
        "alpha": alpha,
        "eigenvalues": complex_pairs(report.eigenvalues),
        "second_modulus": report.second_modulus,
        "lambda_c": {f"{p:g}": r for p, r in report.lambda_c.items()},
        "eigenvectors": vectors,
    }
    return payload, diagram_lines


def cmd_spectrum(args) -> int:
    if not 0.0 < args.alpha <= 1.0:
        raise UsageError(f"alpha must be in (0, 1], got {args.alpha}")
    net = load_network(_out(args, "network", "net.json"))
    header = make_header("spectrum", {"alpha": args.alpha, "top": args.top, "percentiles": args.percentiles,
                                      "profile_size": args.profile_size, "entries": args.entries},
                         net.corpus_digest)
    payload, diagram_lines = spectrum_payload(net, args.alpha, args.top, args.percentiles,
                                              args.profile_size, args.entries)
    write_json(_out(args, "out", "spectrum.json"), {"header": header.model_dump(mode="json"), **payload})
    write_text(_out(args, "diagrams", "top_moves.txt"), header, diagram_lines)
    print(f"|lambda_2| = {payload['second_modulus']:.6f}; lambda_c = {payload['lambda_c']}")
    return EXIT_OK


# baseline

def cmd_baseline(args, pipeline: NetworkPipeline) -> int:
    config = _run_config(args)
    if not config.input_paths:
        raise UsageError("baseline needs at least one --input path")
    if config.shuffle_seed is None:
        raise UsageError("baseline needs --shuffle-seed")
    real = pipeline.run(config.input_paths, config.network_config(), strict=config.strict, workers=config.workers)
    shuffled = pipeline.baseline(real, config.shuffle_seed)

    out_dir = Path(args.out_dir) if args.out_dir else Path(args.output_dir)
    header = make_header("baseline", {"d": config.d, "alpha": config.alpha, "shuffle_seed": config.shuffle_seed},
                         real.corpus_digest)
    write_json(out_dir / "baseline_net.json", network_to_document(shuffled.network, header))

    real_spec, _ = spectrum_payload(real.network, config.alpha, args.top, args.percentiles, args.profile_size, 10)
    shuf_spec, _ = spectrum_payload(shuffled.network, config.alpha, args.top, args.percentiles, args.profile_size, 10)
    real_edges, shuf_edges = real.network.edge_weights, shuffled.network.edge_weights
    edges_changed = sum(abs(real_edges.get(e, 0) - shuf_edges.get(e, 0)) for e in set(real_edges) | set(shuf_edges))
    report = {
        "header": header.model_dump(mode="json"),
        "histogram_equal": real.network.vertex_counts == shuffled.network.vertex_counts,
        "edges_changed": edges_changed,
        "real": {
            "n_edges": real.network.n_edges,
            "total_weight": real.network.total_weight,
            "second_modulus": real_spec["second_modulus"],
            "lambda_c": real_spec["lambda_c"],
            "profiles": [v["profile"] for v in real_spec["eigenvectors"]],
        },
        "shuffled": {
            "n_edges": shuffled.network.n_edges,
            "total_weight": shuffled.network.total_weight,
            "second_modulus": shuf_spec["second_modulus"],
            "lambda_c": shuf_spec["lambda_c"],
            "profiles": [v["profile"] for v in shuf_spec["eigenvectors"]],
        },
    }
    write_json(out_dir / "baseline_report.json", report)
    print(f"histogram conserved: {report['histogram_equal']}; edge weight moved: {edges_changed}; "
          f"|lambda_2| real {real_spec['second_modulus']:.4f} vs shuffled {shuf_spec['second_modulus']:.4f}")
    pipeline.record_run("baseline", True, real.network.n_games, real.corpus_digest)
    return EXIT_OK


# serve

def cmd_serve(args) -> int:
    import uvicorn
    from src.api import main as api

    api.reset_network(load_network(_out(args, "network", "net.json")))
    uvicorn.run(api.app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=OUTPUT_DIR, help="Directory for default output files")
    common.add_argument("--log-level", default=LOG_LEVEL, help="Logging level")
    common.add_argument("--no-ledger", action="store_true", help="Do not record runs in the ledger")

    parser = UsageArgumentParser(
        description='Go move network analysis',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python cli.py enumerate-plaquettes
  python cli.py build --input games/ --d 4
  python cli.py stats --which zipf
  python cli.py rank --alg all --scatter out/k_kstar.csv
  python cli.py spectrum --top 7
  python cli.py baseline --input games/ --shuffle-seed 7
        """
    )
    subparsers = parser.add_subparsers(dest='command', parser_class=UsageArgumentParser)

    p = subparsers.add_parser('enumerate-plaquettes', parents=[common], help='Dump the plaquette class census')
    p.add_argument("--geometry", choices=[g.value for g in Geometry])
    p.add_argument("--out")

    p = subparsers.add_parser('build', parents=[common], help='Build the move network from SGF files')
    p.add_argument("--input", nargs="+", default=[])
    p.add_argument("--strict", action="store_true", help="Abort on the first unreadable file")
    p.add_argument("--d", type=int, default=DEFAULT_D)
    p.add_argument("--workers", type=int, default=WORKERS)
    p.add_argument("--out")
    p.add_argument("--events")

    p = subparsers.add_parser('stats', parents=[common], help='Frequency and degree statistics')
    p.add_argument("--which", choices=STATS_CHOICES, required=True)
    p.add_argument("--network")
    p.add_argument("--events")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int)
    p.add_argument("--ds", type=_int_list, help="Radii for --which sweep, e.g. 2,3,4,5,6")
    p.add_argument("--fit-min", type=float)
    p.add_argument("--fit-max", type=float)
    p.add_argument("--checkpoints", type=_int_list)
    p.add_argument("--out")

    p = subparsers.add_parser('rank', parents=[common], help='PageRank, CheiRank and HITS vectors')
    p.add_argument("--network")
    p.add_argument("--alg", choices=RANK_CHOICES, default="pagerank")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100000)
    p.add_argument("--unweighted", action="store_true", help="HITS on the unweighted adjacency")
    p.add_argument("--dense-fallback", action="store_true")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--scatter", help="CSV of (K, K*) per vertex")
    p.add_argument("--out")

    for name, help_text in (('spectrum', 'Complex spectrum and eigenvector localization'),
                            ('baseline', 'Shuffled-moves null model')):
        p = subparsers.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
        p.add_argument("--top", type=int, default=spectral.DEFAULT_TOP)
        p.add_argument("--percentiles", type=_float_list, default=list(spectral.DEFAULT_PERCENTS))
        p.add_argument("--profile-size", type=int, default=spectral.DEFAULT_PROFILE_SIZE)
        if name == 'spectrum':
            p.add_argument("--network")
            p.add_argument("--entries", type=int, default=10)
            p.add_argument("--out")
            p.add_argument("--diagrams")
        else:
            p.add_argument("--input", nargs="+", default=[])
            p.add_argument("--strict", action="store_true")
            p.add_argument("--d", type=int, default=DEFAULT_D)
            p.add_argument("--workers", type=int, default=WORKERS)
            p.add_argument("--shuffle-seed", type=int)
            p.add_argument("--out-dir")

    p = subparsers.add_parser('serve', parents=[common], help='Serve a built network over HTTP')
    p.add_argument("--network")
    p.add_argument("--host", default=API_HOST)
    p.add_argument("--port", type=int, default=API_PORT)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    setup_logging(args.log_level)
    pipeline = NetworkPipeline(ledger=not args.no_ledger and bool(LEDGER_URL))
    try:
        if args.command == 'enumerate-plaquettes':
            return cmd_enumerate(args)
        elif args.command == 'build':
            return cmd_build(args, pipeline)
        elif args.command == 'stats':
            return cmd_stats(args)
        elif args.command == 'rank':
            return cmd_rank(args)
        elif args.command == 'spectrum':
            return cmd_spectrum(args)
        elif args.command == 'baseline':
            return cmd_baseline(args, pipeline)
        elif args.command == 'serve':
            return cmd_serve(args)
    except GoNetError as e:
        logger.error(f"{args.command} failed: {e}")
        if args.command in ('build', 'baseline'):
            pipeline.record_run(args.command, False, error_msg=str(e))
        return e.exit_code
    except (OSError, ValidationError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_DATA
    return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
