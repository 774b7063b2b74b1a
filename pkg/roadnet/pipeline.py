"""
End-to-end orchestration: parse -> metrics -> scale -> reduce -> cluster ->
evaluate -> regress, plus the method comparison table and report writing.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import linregress

from . import __version__
from .cluster_eval import ClusterQualityReport, cluster_profiles, evaluate, write_cluster_profiles
from .clustering import KMEANS, ClusterAssignment, cluster, write_assignment_csv
from .config import FEATURE_SPACE, MethodVariant, PipelineConfig
from .dimred import ISOMAP, PCA, Embedding, reduce, write_embedding_csv
from .errors import (
    ConfigError,
    DegenerateRegression,
    InsufficientClusters,
    PipelineStageError,
    RoadnetError,
    TooFewVariants,
)
from .feature_pipeline import (
    FeatureMatrix,
    NetworkFeatureVector,
    assemble,
    compute_network_features,
    min_max_scale,
    write_features_csv,
)
from .graph_core import DirectedGraph
from .svg_plots import bar_svg, scatter_svg, write_svg
from .tntp_io import DatasetManifest, load_network, read_manifest

logger = logging.getLogger(__name__)

TOOL_VERSION = __version__

STAGES = ("load", "metrics", "scale", "reduce", "cluster", "evaluate", "regress", "plot")


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float

    def predict(self, nodes: float) -> float:
        return self.slope * nodes + self.intercept

    def as_dict(self) -> dict:
        return asdict(self)


def fit_node_link_regression(features: Sequence[NetworkFeatureVector]) -> RegressionFit:
    """Ordinary least squares of link count on node count"""
    x = np.array([vector.general.nodes for vector in features], dtype=float)
    y = np.array([vector.general.links for vector in features], dtype=float)
    if x.size < 2:
        raise DegenerateRegression(f"regression needs at least 2 networks, got {x.size}")
    if np.ptp(x) == 0:
        raise DegenerateRegression("every network has the same node count")

    result = linregress(x, y)
    residuals = y - (result.slope * x + result.intercept)
    ss_res = float(np.sum(residuals ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return RegressionFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=float(min(max(r_squared, 0.0), 1.0)),
    )


@dataclass
class RunReport:
    config: dict
    seed: int
    tool_version: str = TOOL_VERSION
    timings: Dict[str, float] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    networks: List[str] = field(default_factory=list)
    cluster_count: Optional[int] = None
    noise_count: Optional[int] = None
    quality: Optional[dict] = None
    regression: Optional[dict] = None

    def as_dict(self) -> dict:
        return asdict(self)


@contextmanager
def stage(name: str, timings: Dict[str, float]) -> Iterator[None]:
    """Time a stage and attribute any RoadnetError raised inside it"""
    logger.info("stage %s: started", name)
    started = time.perf_counter()
    try:
        yield
    except PipelineStageError:
        raise
    except RoadnetError as exc:
        raise PipelineStageError(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - started
    logger.info("stage %s: finished in %.3fs", name, timings[name])


def write_json(data: dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path


def load_networks(manifest: DatasetManifest) -> List[Tuple[str, DirectedGraph]]:
    return [(entry.network_name, load_network(entry)) for entry in manifest.entries]


def _features_task(task: Tuple[str, DirectedGraph, bool]) -> NetworkFeatureVector:
    name, graph, strict_convergence = task
    return compute_network_features(name, graph, strict_convergence=strict_convergence)


def compute_features(
    networks: Sequence[Tuple[str, DirectedGraph]], workers: int = 1, strict_convergence: bool = False
) -> List[NetworkFeatureVector]:
    """Feature vectors in input order; networks fan out over worker processes"""
    if workers > 1 and len(networks) > 1:
        tasks = [(name, graph, strict_convergence) for name, graph in networks]
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            return list(pool.map(_features_task, tasks))
    return [
        compute_network_features(name, graph, workers=workers, strict_convergence=strict_convergence)
        for name, graph in networks
    ]


def _neighbours_for(config: PipelineConfig, count: int) -> int:
    k_neighbors = config.reduction.k_neighbors
    if config.reduction.method == ISOMAP and k_neighbors >= count:
        logger.warning("k_neighbors=%d too large for %d networks, using %d", k_neighbors, count, count - 1)
        return count - 1
    return k_neighbors


def reduce_matrix(matrix: FeatureMatrix, config: PipelineConfig) -> Embedding:
    return reduce(
        matrix,
        config.reduction.method,
        d=config.reduction.components,
        k_neighbors=_neighbours_for(config, matrix.shape[0]),
    )


def cluster_embedding(embedding: Embedding, config: PipelineConfig) -> ClusterAssignment:
    params = config.cluster.params()
    if config.cluster.method == KMEANS:
        params["seed"] = config.seed
    return cluster(embedding.coords, config.cluster.method, names=embedding.names, **params)


def score_points(matrix: Optional[FeatureMatrix], embedding: Embedding, config: PipelineConfig) -> np.ndarray:
    if config.score_space == FEATURE_SPACE:
        if matrix is None:
            raise ConfigError("score_space = features needs the scaled feature matrix")
        return matrix.values
    return embedding.coords


def regression_svg(features: Sequence[NetworkFeatureVector], fit: RegressionFit) -> str:
    return scatter_svg(
        [vector.general.nodes for vector in features],
        [vector.general.links for vector in features],
        names=[vector.network_name for vector in features],
        title=f"links = {fit.slope:.4g} x nodes + {fit.intercept:.4g} (R2 {fit.r_squared:.3f})",
        x_label="nodes",
        y_label="links",
        line=(fit.slope, fit.intercept),
    )


def embedding_svg(embedding: Embedding, assignment: ClusterAssignment) -> str:
    coords = embedding.coords
    y = coords[:, 1] if embedding.dimensions > 1 else np.zeros(coords.shape[0])
    return scatter_svg(
        coords[:, 0],
        y,
        names=embedding.names,
        labels=assignment.labels,
        title=f"{assignment.method} on {embedding.method} embedding",
        x_label="component 1",
        y_label="component 2" if embedding.dimensions > 1 else "",
    )


def explained_variance_svg(embedding: Embedding) -> str:
    return bar_svg(
        embedding.explained_variance_ratio,
        title="PCA explained variance",
        x_label="component",
        y_label="explained variance ratio",
    )


def manifest_for(config: PipelineConfig) -> DatasetManifest:
    if config.manifest_path is None:
        raise ConfigError("no manifest given: set [pipeline] manifest or pass --manifest")
    return read_manifest(config.manifest_path)


def run_pipeline(config: PipelineConfig) -> RunReport:
    """Run every stage and write all artifacts into config.output_dir"""
    manifest = manifest_for(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = RunReport(config=config.as_dict(), seed=config.seed, networks=manifest.names)
    timings = report.timings

    def emit(path: Path) -> None:
        report.outputs.append(path.name)

    with stage("load", timings):
        networks = load_networks(manifest)

    with stage("metrics", timings):
        features = compute_features(networks, config.workers, config.strict_convergence)
        emit(write_features_csv(features, out / "features.csv"))

    with stage("scale", timings):
        matrix = min_max_scale(assemble(features, config.feature_selection))

    with stage("reduce", timings):
        embedding = reduce_matrix(matrix, config)
        emit(write_embedding_csv(embedding, out / "embedding.csv"))

    with stage("cluster", timings):
        assignment = cluster_embedding(embedding, config)
        emit(write_assignment_csv(assignment, out / "clusters.csv"))
        report.cluster_count = assignment.cluster_count
        report.noise_count = assignment.noise_count

    with stage("evaluate", timings):
        quality = evaluate(score_points(matrix, embedding, config), assignment.labels)
        report.quality = quality.as_dict()
        emit(write_json(report.quality, out / "quality.json"))
        emit(write_cluster_profiles(cluster_profiles(features, assignment), out / "cluster_profiles.csv"))

    with stage("regress", timings):
        fit = fit_node_link_regression(features)
        report.regression = fit.as_dict()
        emit(write_json(report.regression, out / "regression.json"))

    with stage("plot", timings):
        emit(write_svg(embedding_svg(embedding, assignment), out / "embedding.svg"))
        emit(write_svg(regression_svg(features, fit), out / "regression.svg"))
        if embedding.method == PCA and embedding.explained_variance_ratio is not None:
            emit(write_svg(explained_variance_svg(embedding), out / "explained_variance.svg"))

    report.outputs.append("report.json")
    write_json(report.as_dict(), out / "report.json")
    logger.info("pipeline finished: %d clusters, %d noise", assignment.cluster_count, assignment.noise_count)
    return report


# Method comparison

SCORE_COLUMNS = ("silhouette", "calinski_harabasz", "davies_bouldin")
_HIGHER_IS_BETTER = {"silhouette": True, "calinski_harabasz": True, "davies_bouldin": False}


@dataclass(frozen=True)
class ComparisonRow:
    variant: str
    reduction: str
    cluster: str
    cluster_count: int
    noise_count: int
    quality: Optional[ClusterQualityReport]
    best: Tuple[str, ...] = ()

    def score(self, metric: str) -> Optional[float]:
        return None if self.quality is None else getattr(self.quality, metric)

    def as_dict(self) -> dict:
        row = {
            "variant": self.variant,
            "reduction": self.reduction,
            "cluster": self.cluster,
            "clusters": self.cluster_count,
            "noise": self.noise_count,
        }
        for metric in SCORE_COLUMNS:
            row[metric] = self.score(metric)
            row[f"best_{metric}"] = metric in self.best
        return row


@dataclass(frozen=True)
class ComparisonTable:
    rows: Tuple[ComparisonRow, ...]

    def best(self, metric: str) -> Optional[ComparisonRow]:
        for row in self.rows:
            if metric in row.best:
                return row
        return None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.as_dict() for row in self.rows])


def _flag_best(rows: List[ComparisonRow]) -> List[ComparisonRow]:
    flags: Dict[int, List[str]] = {index: [] for index in range(len(rows))}
    for metric in SCORE_COLUMNS:
        winner = None
        for index, row in enumerate(rows):
            value = row.score(metric)
            if value is None:
                continue
            if winner is None:
                winner = index
                continue
            current = rows[winner].score(metric)
            better = value > current if _HIGHER_IS_BETTER[metric] else value < current
            if better:
                winner = index
        if winner is not None:
            flags[winner].append(metric)
    return [
        replace(row, best=tuple(flags[index])) for index, row in enumerate(rows)
    ]


def compare_methods(
    matrix: FeatureMatrix, variants: Sequence[MethodVariant], config: PipelineConfig
) -> ComparisonTable:
    """Score every (reduction, cluster) variant on the same scaled matrix.

    A variant that ends with fewer than two clusters gets empty scores and
    never wins a metric.
    """
    if len(variants) < 2:
        raise TooFewVariants(len(variants))

    rows = []
    for variant in variants:
        variant_config = config.for_variant(variant)
        embedding = reduce_matrix(matrix, variant_config)
        assignment = cluster_embedding(embedding, variant_config)
        try:
            quality: Optional[ClusterQualityReport] = evaluate(
                score_points(matrix, embedding, variant_config), assignment.labels
            )
        except InsufficientClusters as exc:
            logger.warning("%s: %s, scores left empty", variant.label, exc)
            quality = None
        logger.info("%s: %d clusters", variant.label, assignment.cluster_count)
        rows.append(
            ComparisonRow(
                variant=variant.label,
                reduction=variant.reduction,
                cluster=variant.cluster,
                cluster_count=assignment.cluster_count,
                noise_count=assignment.noise_count,
                quality=quality,
            )
        )
    return ComparisonTable(tuple(_flag_best(rows)))


def write_comparison(table: ComparisonTable, out: Path) -> List[Path]:
    csv_path = out / "comparison.csv"
    table.to_frame().to_csv(csv_path, index=False, lineterminator="\n", encoding="utf-8")
    json_path = write_json({"rows": [row.as_dict() for row in table.rows]}, out / "comparison.json")
    return [csv_path, json_path]


def run_comparison(config: PipelineConfig) -> ComparisonTable:
    """Compute features once and compare every configured variant on them"""
    manifest = manifest_for(config)
    if len(config.variants) < 2:
        raise TooFewVariants(len(config.variants))
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings: Dict[str, float] = {}

    with stage("load", timings):
        networks = load_networks(manifest)
    with stage("metrics", timings):
        features = compute_features(networks, config.workers, config.strict_convergence)
        write_features_csv(features, out / "features.csv")
    with stage("scale", timings):
        matrix = min_max_scale(assemble(features, config.feature_selection))
    with stage("compare", timings):
        table = compare_methods(matrix, config.variants, config)
        write_comparison(table, out)
    return table
