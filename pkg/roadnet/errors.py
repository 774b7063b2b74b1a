"""
Exception hierarchy for the road network classifier.

Every error carries the process exit code the CLI should use for it.
"""

from typing import Any, List, Optional


class RoadnetError(Exception):
    """Base class for all errors raised by this package"""

    exit_code = 1


class ConfigError(RoadnetError):
    exit_code = 2


class DataError(RoadnetError):
    exit_code = 3


class NumericalError(RoadnetError):
    exit_code = 4


# Configuration


class UnknownConfigKey(ConfigError):
    def __init__(self, section: str, key: Optional[str] = None):
        self.section = section
        self.key = key
        where = f"[{section}]" if key is None else f"[{section}] {key}"
        super().__init__(f"unknown config entry {where}")


class InvalidConfigValue(ConfigError):
    pass


class EmptyManifest(ConfigError):
    def __init__(self, path: Any = None):
        self.path = path
        super().__init__(f"manifest lists no networks: {path}")


class DuplicateNetwork(ConfigError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"network listed twice in manifest: {name}")


class TooFewVariants(ConfigError):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"comparison needs at least 2 variants, got {count}")


# TNTP parsing


class MalformedMetadata(DataError):
    pass


class MalformedRow(DataError):
    def __init__(self, line_number: int, line: str, reason: str):
        self.line_number = line_number
        self.line = line
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}: {line.strip()!r}")


class CountMismatch(DataError):
    """Declared NUMBER OF LINKS differs from the rows parsed.

    The parsed result travels with the error so callers can downgrade it to a
    warning and keep going.
    """

    def __init__(self, parsed: int, declared: int, metadata: dict, links: List[Any]):
        self.parsed = parsed
        self.declared = declared
        self.metadata = metadata
        self.links = links
        super().__init__(f"declared {declared} links but parsed {parsed}")


class DuplicateNode(DataError):
    def __init__(self, node_id: int):
        self.node_id = node_id
        super().__init__(f"node {node_id} listed more than once")


# Graph metrics


class DegenerateGraph(DataError):
    pass


class MissingLengths(DataError):
    pass


class UndefinedCorrelation(DataError):
    """Degree sequence at one edge end is constant, so Pearson's r is undefined"""


# Feature matrix


class UnknownFeatureLabel(DataError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"unknown feature label: {label}")


class DuplicateLabel(DataError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"feature label selected twice: {label}")


class DegenerateMatrix(DataError):
    pass


# Reduction, clustering, evaluation


class DimensionTooLarge(DataError):
    pass


class TooFewPoints(DataError):
    pass


class TooManyClusters(DataError):
    pass


class InsufficientClusters(DataError):
    pass


class DegenerateRegression(DataError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, method: str, iterations: int, last_iterate: Any = None):
        self.method = method
        self.iterations = iterations
        self.last_iterate = last_iterate
        super().__init__(f"{method} did not converge after {iterations} iterations")


class PipelineStageError(RoadnetError):
    """A RoadnetError raised inside a named pipeline stage"""

    def __init__(self, stage: str, cause: RoadnetError):
        self.stage = stage
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"[{stage}] {cause}")
