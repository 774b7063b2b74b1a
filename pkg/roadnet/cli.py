"""
Command-line interface: one subcommand per pipeline stage plus the full
pipeline, the method comparison and the node-link regression.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from . import __version__
from .cluster_eval import evaluate
from .clustering import read_assignment_csv, write_assignment_csv
from .config import FEATURE_SPACE, PipelineConfig, load_config
from .dimred import read_embedding_csv, write_embedding_csv
from .errors import CountMismatch, DataError, RoadnetError
from .feature_pipeline import assemble, compute_network_features, min_max_scale, read_features_csv, write_features_csv
from .pipeline import (
    cluster_embedding,
    compute_features,
    fit_node_link_regression,
    load_networks,
    manifest_for,
    reduce_matrix,
    regression_svg,
    run_comparison,
    run_pipeline,
    score_points,
    write_json,
)
from .svg_plots import write_svg
from .tntp_io import build_graph, parse_net_file, read_node_file

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roadnet-classify",
        description="Road Network Classifier - topology features, embeddings and clusters for TNTP networks",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="Path to an INI config file")
    parser.add_argument("--seed", type=int, help="Random seed for k-means restarts")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    parse_parser = subparsers.add_parser("parse", help="Parse and validate one TNTP network file")
    parse_parser.add_argument("net_file", help="Path to a *_net.tntp file")
    parse_parser.add_argument("--node-file", help="Optional *_node.tntp file")
    parse_parser.add_argument("--strict", action="store_true", help="Fail when the link count disagrees")

    metrics_parser = subparsers.add_parser("metrics", help="Compute the feature vector of one network")
    metrics_parser.add_argument("net_file", help="Path to a *_net.tntp file")
    metrics_parser.add_argument("--name", help="Network name (defaults to the file stem)")
    metrics_parser.add_argument("--workers", type=int, default=1, help="Processes for betweenness")

    features_parser = subparsers.add_parser("features", help="Write features.csv for every manifest network")
    features_parser.add_argument("--manifest", help="Dataset manifest")
    features_parser.add_argument("--workers", type=int, help="Worker processes")

    reduce_parser = subparsers.add_parser("reduce", help="Scale features.csv and embed it")
    reduce_parser.add_argument("--features", help="Input features.csv (default: <out>/features.csv)")
    reduce_parser.add_argument("--method", choices=("pca", "isomap"))
    reduce_parser.add_argument("--components", type=int)
    reduce_parser.add_argument("--k-neighbors", type=int)

    cluster_parser = subparsers.add_parser("cluster", help="Cluster embedding.csv")
    cluster_parser.add_argument("--embedding", help="Input embedding.csv (default: <out>/embedding.csv)")
    cluster_parser.add_argument("--method", choices=("kmeans", "hdbscan"))
    cluster_parser.add_argument("-k", type=int, help="Number of k-means clusters")
    cluster_parser.add_argument("--min-cluster-size", type=int)

    evaluate_parser = subparsers.add_parser("evaluate", help="Score clusters.csv in the configured score space")
    evaluate_parser.add_argument(
        "--features", help="Input features.csv when score_space = features (default: <out>/features.csv)"
    )
    evaluate_parser.add_argument("--embedding", help="Input embedding.csv (default: <out>/embedding.csv)")
    evaluate_parser.add_argument("--clusters", help="Input clusters.csv (default: <out>/clusters.csv)")

    pipeline_parser = subparsers.add_parser("pipeline", help="Run every stage and write all reports")
    pipeline_parser.add_argument("--manifest", help="Dataset manifest")

    compare_parser = subparsers.add_parser("compare", help="Compare reduction/clustering combinations")
    compare_parser.add_argument("--manifest", help="Dataset manifest")

    regress_parser = subparsers.add_parser("regress", help="Fit links against nodes")
    regress_parser.add_argument("--features", help="Input features.csv (default: <out>/features.csv)")

    return parser


def _config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    config = config.with_overrides(
        seed=args.seed,
        output_dir=Path(args.out) if args.out else None,
        manifest_path=Path(args.manifest) if getattr(args, "manifest", None) else None,
        workers=getattr(args, "workers", None),
    )
    reduction = replace(
        config.reduction,
        **{
            key: value
            for key, value in (
                ("method", getattr(args, "method", None) if args.command == "reduce" else None),
                ("components", getattr(args, "components", None)),
                ("k_neighbors", getattr(args, "k_neighbors", None)),
            )
            if value is not None
        },
    )
    cluster = replace(
        config.cluster,
        **{
            key: value
            for key, value in (
                ("method", getattr(args, "method", None) if args.command == "cluster" else None),
                ("k", getattr(args, "k", None)),
                ("min_cluster_size", getattr(args, "min_cluster_size", None)),
            )
            if value is not None
        },
    )
    return replace(config, reduction=reduction, cluster=cluster)


def _out(config: PipelineConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _input(path: Optional[str], config: PipelineConfig, default: str) -> Path:
    return Path(path) if path else Path(config.output_dir) / default


def cmd_parse(args: argparse.Namespace) -> None:
    with open(args.net_file, "r", encoding="utf-8", errors="replace") as f:
        try:
            metadata, links = parse_net_file(f, strict_counts=True)
        except CountMismatch as exc:
            if args.strict:
                raise
            print(f"⚠️  {exc}")
            metadata, links = exc.metadata, exc.links
    coords = read_node_file(args.node_file) if args.node_file else None
    graph = build_graph(links, coords)
    print(f"✅ Parsed {args.net_file}")
    for key, value in metadata.items():
        print(f"  {key}: {value}")
    print(f"  link rows: {len(links)}")
    print(f"  graph: {graph.n} nodes, {graph.m} links")
    if graph.duplicates_collapsed or graph.self_loops_dropped:
        print(f"  collapsed {graph.duplicates_collapsed} duplicates, dropped {graph.self_loops_dropped} self-loops")


def cmd_metrics(args: argparse.Namespace) -> None:
    config = _config(args)
    net_file = Path(args.net_file)
    name = args.name or net_file.stem.replace("_net", "")
    with open(net_file, "r", encoding="utf-8", errors="replace") as f:
        try:
            _, links = parse_net_file(f, strict_counts=True)
        except CountMismatch as exc:
            logger.warning("%s: %s", name, exc)
            links = exc.links
    vector = compute_network_features(
        name, build_graph(links), workers=args.workers, strict_convergence=config.strict_convergence
    )
    print(json.dumps({"network": name, **vector.as_dict()}, indent=2))


def cmd_features(args: argparse.Namespace) -> None:
    config = _config(args)
    manifest = manifest_for(config)
    print(f"🔍 Computing features for {len(manifest.entries)} networks")
    features = compute_features(load_networks(manifest), config.workers, config.strict_convergence)
    path = write_features_csv(features, _out(config) / "features.csv")
    print(f"✅ Wrote {path}")


def cmd_reduce(args: argparse.Namespace) -> None:
    config = _config(args)
    features = read_features_csv(_input(args.features, config, "features.csv"))
    matrix = min_max_scale(assemble(features, config.feature_selection))
    embedding = reduce_matrix(matrix, config)
    path = write_embedding_csv(embedding, _out(config) / "embedding.csv")
    print(f"✅ {embedding.method} embedding with {embedding.dimensions} components: {path}")


def cmd_cluster(args: argparse.Namespace) -> None:
    config = _config(args)
    embedding = read_embedding_csv(_input(args.embedding, config, "embedding.csv"))
    assignment = cluster_embedding(embedding, config)
    path = write_assignment_csv(assignment, _out(config) / "clusters.csv")
    print(f"✅ {assignment.cluster_count} clusters, {assignment.noise_count} noise: {path}")
    for label, names in sorted(assignment.members().items()):
        print(f"  {'noise' if label < 0 else f'cluster {label + 1}'}: {', '.join(names)}")


def cmd_evaluate(args: argparse.Namespace) -> None:
    config = _config(args)
    embedding = read_embedding_csv(_input(args.embedding, config, "embedding.csv"))
    assignment = read_assignment_csv(_input(args.clusters, config, "clusters.csv"))
    if assignment.names != embedding.names:
        raise DataError("clusters.csv and embedding.csv list different networks")
    matrix = None
    if config.score_space == FEATURE_SPACE:
        features = read_features_csv(_input(args.features, config, "features.csv"))
        matrix = min_max_scale(assemble(features, config.feature_selection))
        if matrix.names != assignment.names:
            raise DataError("clusters.csv and features.csv list different networks")
    quality = evaluate(score_points(matrix, embedding, config), assignment.labels)
    path = write_json(quality.as_dict(), _out(config) / "quality.json")
    print(f"📋 silhouette {quality.silhouette:.4f}")
    print(f"📋 calinski-harabasz {quality.calinski_harabasz:.4f}")
    print(f"📋 davies-bouldin {quality.davies_bouldin:.4f}")
    print(f"✅ Wrote {path}")


def cmd_pipeline(args: argparse.Namespace) -> None:
    config = _config(args)
    print(f"🚀 Running pipeline: {config.reduction.method} + {config.cluster.method}")
    report = run_pipeline(config)
    for name, seconds in report.timings.items():
        print(f"  ⏱  {name}: {seconds:.3f}s")
    print(f"✅ {report.cluster_count} clusters; outputs in {config.output_dir}")


def cmd_compare(args: argparse.Namespace) -> None:
    config = _config(args)
    print(f"🚀 Comparing {len(config.variants)} variants")
    table = run_comparison(config)
    for row in table.rows:
        scores = "  ".join(
            f"{metric}={'n/a' if row.score(metric) is None else format(row.score(metric), '.4f')}"
            + ("*" if metric in row.best else "")
            for metric in ("silhouette", "calinski_harabasz", "davies_bouldin")
        )
        print(f"  {row.variant:<16} {scores}")
    print(f"✅ Wrote {Path(config.output_dir) / 'comparison.csv'}")


def cmd_regress(args: argparse.Namespace) -> None:
    config = _config(args)
    features = read_features_csv(_input(args.features, config, "features.csv"))
    fit = fit_node_link_regression(features)
    out = _out(config)
    write_json(fit.as_dict(), out / "regression.json")
    write_svg(regression_svg(features, fit), out / "regression.svg")
    print(f"✅ links = {fit.slope:.4f} x nodes + {fit.intercept:.4f}  (R² = {fit.r_squared:.4f})")


COMMANDS = {
    "parse": cmd_parse,
    "metrics": cmd_metrics,
    "features": cmd_features,
    "reduce": cmd_reduce,
    "cluster": cmd_cluster,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
    "compare": cmd_compare,
    "regress": cmd_regress,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line interface for the road network classifier"""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if args.command is None:
        parser.print_help()
        return 0
    try:
        COMMANDS[args.command](args)
    except RoadnetError as exc:
        print(f"❌ error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"❌ error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
