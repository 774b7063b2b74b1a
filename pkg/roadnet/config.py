"""
Pipeline configuration: dataclasses plus the INI-style config file reader.

    [pipeline]
    manifest = networks.ini
    output_dir = out
    seed = 42

    [reduce]
    method = pca

    [cluster]
    method = kmeans
    k = 5

Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

from .clustering import HDBSCAN, KMEANS
from .dimred import ISOMAP, PCA
from .errors import ConfigError, InvalidConfigValue, UnknownConfigKey
from .feature_pipeline import FEATURE_LABELS

DEFAULT_SEED = 42

EMBEDDING_SPACE = "embedding"
FEATURE_SPACE = "features"


@dataclass(frozen=True)
class ReductionSettings:
    method: str = PCA
    components: int = 2
    k_neighbors: int = 5


@dataclass(frozen=True)
class ClusterSettings:
    method: str = KMEANS
    k: int = 5
    n_init: int = 10
    max_iter: int = 300
    min_cluster_size: int = 2
    min_samples: Optional[int] = None

    def params(self) -> dict:
        if self.method == KMEANS:
            return {"K": self.k, "n_init": self.n_init, "max_iter": self.max_iter}
        return {"min_cluster_size": self.min_cluster_size, "min_samples": self.min_samples}


@dataclass(frozen=True)
class MethodVariant:
    reduction: str
    cluster: str

    @property
    def label(self) -> str:
        return f"{self.cluster}/{self.reduction}"


DEFAULT_VARIANTS = (
    MethodVariant(PCA, KMEANS),
    MethodVariant(ISOMAP, KMEANS),
    MethodVariant(PCA, HDBSCAN),
    MethodVariant(ISOMAP, HDBSCAN),
)


@dataclass(frozen=True)
class PipelineConfig:
    manifest_path: Optional[Path] = None
    feature_selection: Tuple[str, ...] = FEATURE_LABELS
    reduction: ReductionSettings = field(default_factory=ReductionSettings)
    cluster: ClusterSettings = field(default_factory=ClusterSettings)
    seed: int = DEFAULT_SEED
    output_dir: Path = Path("out")
    score_space: str = EMBEDDING_SPACE
    workers: int = 1
    strict_convergence: bool = False
    variants: Tuple[MethodVariant, ...] = DEFAULT_VARIANTS

    def __post_init__(self):
        validate(self)

    def with_overrides(self, **changes) -> "PipelineConfig":
        changes = {key: value for key, value in changes.items() if value is not None}
        return replace(self, **changes)

    def for_variant(self, variant: MethodVariant) -> "PipelineConfig":
        return replace(
            self,
            reduction=replace(self.reduction, method=variant.reduction),
            cluster=replace(self.cluster, method=variant.cluster),
        )

    def as_dict(self) -> dict:
        data = asdict(self)
        data["manifest_path"] = None if self.manifest_path is None else str(self.manifest_path)
        data["output_dir"] = str(self.output_dir)
        data["feature_selection"] = list(self.feature_selection)
        data["variants"] = [variant.label for variant in self.variants]
        return data


def validate(config: PipelineConfig) -> None:
    if config.reduction.method not in (PCA, ISOMAP):
        raise InvalidConfigValue(f"reduce.method must be pca or isomap, got {config.reduction.method!r}")
    if config.cluster.method not in (KMEANS, HDBSCAN):
        raise InvalidConfigValue(f"cluster.method must be kmeans or hdbscan, got {config.cluster.method!r}")
    if config.cluster.method == KMEANS and config.cluster.k < 2:
        raise InvalidConfigValue(f"cluster.k must be at least 2 for k-means, got {config.cluster.k}")
    if config.cluster.min_cluster_size < 1:
        raise InvalidConfigValue("cluster.min_cluster_size must be positive")
    if config.reduction.components < 1 or config.reduction.k_neighbors < 1:
        raise InvalidConfigValue("reduce.components and reduce.k_neighbors must be positive")
    if config.score_space not in (EMBEDDING_SPACE, FEATURE_SPACE):
        raise InvalidConfigValue(f"pipeline.score_space must be embedding or features, got {config.score_space!r}")
    if config.workers < 1:
        raise InvalidConfigValue("pipeline.workers must be at least 1")
    unknown = [label for label in config.feature_selection if label not in FEATURE_LABELS]
    if unknown:
        raise InvalidConfigValue(f"unknown feature labels: {', '.join(unknown)}")
    for variant in config.variants:
        if variant.reduction not in (PCA, ISOMAP) or variant.cluster not in (KMEANS, HDBSCAN):
            raise InvalidConfigValue(f"unknown comparison variant {variant.label}")


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _labels(text: str) -> Tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _optional_int(text: str) -> Optional[int]:
    return None if text.strip().lower() in ("", "none") else int(text)


def _variants(text: str) -> Tuple[MethodVariant, ...]:
    variants = []
    for item in _labels(text):
        reduction, _, cluster = item.partition("/")
        if not cluster:
            raise ValueError(item)
        variants.append(MethodVariant(reduction.strip().lower(), cluster.strip().lower()))
    return tuple(variants)


def _lower(text: str) -> str:
    return text.strip().lower()


# section -> key -> (dataclass field, converter)
_SCHEMA: Dict[str, Dict[str, Tuple[str, Callable[[str], object]]]] = {
    "pipeline": {
        "manifest": ("manifest_path", Path),
        "output_dir": ("output_dir", Path),
        "seed": ("seed", int),
        "workers": ("workers", int),
        "score_space": ("score_space", _lower),
        "strict_convergence": ("strict_convergence", _bool),
    },
    "features": {"selection": ("feature_selection", _labels)},
    "reduce": {
        "method": ("method", _lower),
        "components": ("components", int),
        "k_neighbors": ("k_neighbors", int),
    },
    "cluster": {
        "method": ("method", _lower),
        "k": ("k", int),
        "n_init": ("n_init", int),
        "max_iter": ("max_iter", int),
        "min_cluster_size": ("min_cluster_size", int),
        "min_samples": ("min_samples", _optional_int),
    },
    "compare": {"variants": ("variants", _variants)},
}


def load_config(path: Union[str, Path]) -> PipelineConfig:
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None

    values: Dict[str, Dict[str, object]] = {section: {} for section in _SCHEMA}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise UnknownConfigKey(section)
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise UnknownConfigKey(section, key)
            name, convert = _SCHEMA[section][key]
            try:
                values[section][name] = convert(raw)
            except ValueError:
                raise InvalidConfigValue(f"[{section}] {key} = {raw!r} is not valid") from None

    top = dict(values["pipeline"])
    for name in ("manifest_path", "output_dir"):
        if name in top and not top[name].is_absolute():
            top[name] = path.parent / top[name]
    top.update(values["features"])
    top.update(values["compare"])
    return PipelineConfig(
        reduction=ReductionSettings(**values["reduce"]),
        cluster=ClusterSettings(**values["cluster"]),
        **top,
    )
