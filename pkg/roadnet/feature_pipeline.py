"""
Per-network feature vectors, the feature matrix F (k networks x s features) and
min-max scaling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from . import centrality
from .errors import DegenerateMatrix, DuplicateLabel, NoConvergence, UnknownFeatureLabel
from .graph_core import REVERSE, DirectedGraph, distance_summary
from .topo_metrics import GeneralFeatures, general_features

logger = logging.getLogger(__name__)

GENERAL_LABELS = tuple(f.name for f in fields(GeneralFeatures))
CENTRALITY_LABELS = ("ic", "oc", "cc", "bc", "ec", "pc")
FEATURE_LABELS = GENERAL_LABELS + CENTRALITY_LABELS

INTEGER_LABELS = ("nodes", "links", "diameter", "radius", "gscc_size", "gwcc_size", "scc_count", "wcc_count")


@dataclass(frozen=True)
class CentralityMeans:
    ic: float
    oc: float
    cc: float
    bc: float
    ec: float
    pc: float


@dataclass(frozen=True)
class NetworkFeatureVector:
    network_name: str
    general: GeneralFeatures
    centrality_means: CentralityMeans

    def value(self, label: str) -> Optional[float]:
        if label in GENERAL_LABELS:
            return getattr(self.general, label)
        if label in CENTRALITY_LABELS:
            return getattr(self.centrality_means, label)
        raise UnknownFeatureLabel(label)

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {label: self.value(label) for label in FEATURE_LABELS}


@dataclass(frozen=True)
class ScalingMetadata:
    data_min: np.ndarray
    data_max: np.ndarray
    target: Tuple[float, float]


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    names: Tuple[str, ...]
    feature_labels: Tuple[str, ...]
    values: np.ndarray
    scaling: Optional[ScalingMetadata] = None

    @classmethod
    def from_array(cls, values, names=None, feature_labels=None) -> "FeatureMatrix":
        values = np.atleast_2d(np.asarray(values, dtype=float))
        k, s = values.shape
        names = tuple(names) if names is not None else tuple(f"network_{i}" for i in range(k))
        feature_labels = (
            tuple(feature_labels) if feature_labels is not None else tuple(f"f{j}" for j in range(s))
        )
        return cls(names, feature_labels, values)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def inverse_transform(self) -> "FeatureMatrix":
        """Raw values recovered from the recorded scaling"""
        if self.scaling is None:
            return self
        lo, hi = self.scaling.target
        span = self.scaling.data_max - self.scaling.data_min
        raw = (self.values - lo) / (hi - lo) * span + self.scaling.data_min
        return FeatureMatrix(self.names, self.feature_labels, raw)


def compute_network_features(
    name: str, g: DirectedGraph, workers: int = 1, strict_convergence: bool = False
) -> NetworkFeatureVector:
    """All general features and the six centrality means for one network"""
    logger.info("%s: computing features (%d nodes, %d links)", name, g.n, g.m)
    summary = distance_summary(g, REVERSE)
    general = general_features(g, summary)

    power_methods = {}
    for kind, method in (
        ("ec", centrality.eigenvector_centrality),
        ("pc", centrality.pagerank_centrality),
    ):
        try:
            power_methods[kind] = method(g)
        except NoConvergence as exc:
            if strict_convergence:
                raise
            power_methods[kind] = centrality.with_fallback(exc)

    means = CentralityMeans(
        ic=centrality.degree_centrality(g, "in").mean,
        oc=centrality.degree_centrality(g, "out").mean,
        cc=centrality.closeness_centrality(g, summary).mean,
        bc=centrality.betweenness_centrality(g, workers=workers).mean,
        ec=power_methods["ec"].mean,
        pc=power_methods["pc"].mean,
    )
    return NetworkFeatureVector(name, general, means)


def assemble(
    features: Sequence[NetworkFeatureVector], selection: Optional[Sequence[str]] = None
) -> FeatureMatrix:
    """Stack feature vectors into F; rows follow input order, columns the selection"""
    selection = tuple(selection) if selection is not None else FEATURE_LABELS
    seen = set()
    for label in selection:
        if label not in FEATURE_LABELS:
            raise UnknownFeatureLabel(label)
        if label in seen:
            raise DuplicateLabel(label)
        seen.add(label)

    values = np.zeros((len(features), len(selection)))
    for i, vector in enumerate(features):
        for j, label in enumerate(selection):
            value = vector.value(label)
            if value is None:
                logger.warning("%s: %s undefined, imputed as 0", vector.network_name, label)
                value = 0.0
            values[i, j] = value
    return FeatureMatrix(tuple(v.network_name for v in features), selection, values)


def min_max_scale(F: FeatureMatrix, target: Tuple[float, float] = (0.0, 1.0)) -> FeatureMatrix:
    """X_std = (X - X.min) / (X.max - X.min); X_scaled = X_std * (max - min) + min"""
    k, _ = F.shape
    if k < 2:
        raise DegenerateMatrix(f"scaling needs at least 2 networks, got {k}")
    lo, hi = target
    data_min = F.values.min(axis=0)
    data_max = F.values.max(axis=0)
    span = data_max - data_min

    constant = span == 0
    for label in np.asarray(F.feature_labels)[constant]:
        logger.warning("feature %s is constant across networks, scaled to %s", label, lo)

    safe_span = np.where(constant, 1.0, span)
    x_std = np.where(constant, 0.0, (F.values - data_min) / safe_span)
    scaled = x_std * (hi - lo) + lo
    return replace(F, values=scaled, scaling=ScalingMetadata(data_min, data_max, (lo, hi)))


def write_features_csv(features: Sequence[NetworkFeatureVector], path: Union[str, Path]) -> Path:
    rows = [{"network": v.network_name, **v.as_dict()} for v in features]
    frame = pd.DataFrame(rows, columns=["network", *FEATURE_LABELS])
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return Path(path)


def read_features_csv(path: Union[str, Path]) -> List[NetworkFeatureVector]:
    frame = pd.read_csv(path, float_precision="round_trip", dtype={"network": str}, encoding="utf-8")
    missing = [label for label in ("network",) + FEATURE_LABELS if label not in frame.columns]
    if missing:
        raise UnknownFeatureLabel(", ".join(missing))

    vectors = []
    for record in frame.to_dict(orient="records"):
        general = {}
        for label in GENERAL_LABELS:
            value = record[label]
            if pd.isna(value):
                general[label] = None
            elif label in INTEGER_LABELS:
                general[label] = int(value)
            else:
                general[label] = float(value)
        means = CentralityMeans(**{label: float(record[label]) for label in CENTRALITY_LABELS})
        vectors.append(NetworkFeatureVector(record["network"], GeneralFeatures(**general), means))
    return vectors
