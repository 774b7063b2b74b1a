"""
Readers and writers for the TNTP network distribution format, plus the dataset
manifest that lists which networks a run processes.

A .net file looks like:

    <NUMBER OF NODES> 24
    <NUMBER OF LINKS> 76
    <END OF METADATA>

    ~ init_node term_node capacity length free_flow_time b power speed toll link_type ;
        1   2   25900.2   6   6   0.15   4   0   0   1   ;
"""

from __future__ import annotations

import configparser
import logging
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

from .errors import (
    ConfigError,
    CountMismatch,
    DuplicateNetwork,
    DuplicateNode,
    EmptyManifest,
    MalformedMetadata,
    MalformedRow,
    UnknownConfigKey,
)
from .graph_core import DirectedGraph

logger = logging.getLogger(__name__)

LINK_FIELDS = (
    "init_node",
    "term_node",
    "capacity",
    "length",
    "free_flow_time",
    "b",
    "power",
    "speed",
    "toll",
    "link_type",
)

END_OF_METADATA = "END OF METADATA"
_TAG = re.compile(r"^<([^>]+)>\s*(.*)$")

Text = Union[str, TextIO, Iterable[str]]


@dataclass(frozen=True)
class RawLinkRecord:
    init_node: int
    term_node: int
    capacity: float = 0.0
    length: float = 0.0
    free_flow_time: float = 0.0
    b: float = 0.0
    power: float = 0.0
    speed: float = 0.0
    toll: float = 0.0
    link_type: int = 0


@dataclass(frozen=True)
class NodeCoordinate:
    node_id: int
    x: float
    y: float


@dataclass(frozen=True)
class ManifestEntry:
    network_name: str
    net_file_path: Path
    node_file_path: Optional[Path] = None


@dataclass(frozen=True)
class DatasetManifest:
    entries: Tuple[ManifestEntry, ...]
    path: Optional[Path] = None

    @property
    def names(self) -> List[str]:
        return [entry.network_name for entry in self.entries]


def _lines(text: Text) -> List[str]:
    if isinstance(text, str):
        return text.splitlines()
    return [line.rstrip("\n") for line in text]


def _strip_comment(line: str) -> str:
    return line.split("~", 1)[0].strip()


def _parse_id(token: str, line_number: int, line: str, field_name: str) -> int:
    try:
        value = float(token)
    except ValueError:
        raise MalformedRow(line_number, line, f"{field_name} is not numeric") from None
    if not value.is_integer() or value <= 0:
        raise MalformedRow(line_number, line, f"{field_name} must be a positive integer")
    return int(value)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _is_header(tokens: Sequence[str]) -> bool:
    # a column-name row has no numeric token at all
    return not any(_is_number(token) for token in tokens)


def parse_net_file(
    text: Text, strict_counts: bool = True
) -> Tuple[Dict[str, str], List[RawLinkRecord]]:
    """Parse TNTP .net text into (metadata, link records).

    Raises CountMismatch when the declared NUMBER OF LINKS disagrees with the
    rows found and strict_counts is set; otherwise the mismatch is logged.
    """
    metadata: Dict[str, str] = {}
    links: List[RawLinkRecord] = []
    in_metadata = True

    for line_number, line in enumerate(_lines(text), start=1):
        content = _strip_comment(line)
        if not content:
            continue

        if in_metadata:
            match = _TAG.match(content)
            if match is None:
                logger.debug("line %d: ignoring untagged metadata %r", line_number, content)
                continue
            tag = match.group(1).strip().upper()
            if tag == END_OF_METADATA:
                in_metadata = False
            else:
                metadata[tag] = match.group(2).strip()
            continue

        tokens = content.replace(";", " ").split()
        if not tokens:
            continue
        if not links and _is_header(tokens):
            continue
        if len(tokens) < 2:
            raise MalformedRow(line_number, line, "row needs init_node and term_node")

        init_node = _parse_id(tokens[0], line_number, line, "init_node")
        term_node = _parse_id(tokens[1], line_number, line, "term_node")
        try:
            extras = [float(token) for token in tokens[2:len(LINK_FIELDS)]]
        except ValueError:
            raise MalformedRow(line_number, line, "non-numeric link attribute") from None
        extras += [0.0] * (len(LINK_FIELDS) - 2 - len(extras))
        if extras[1] < 0:
            raise MalformedRow(line_number, line, "negative length")

        links.append(
            RawLinkRecord(
                init_node,
                term_node,
                capacity=extras[0],
                length=extras[1],
                free_flow_time=extras[2],
                b=extras[3],
                power=extras[4],
                speed=extras[5],
                toll=extras[6],
                link_type=int(extras[7]),
            )
        )

    if in_metadata:
        raise MalformedMetadata(f"missing <{END_OF_METADATA}>")

    declared = metadata.get("NUMBER OF LINKS")
    if declared is not None:
        try:
            declared_count = int(float(declared))
        except ValueError:
            raise MalformedMetadata(f"NUMBER OF LINKS is not a number: {declared!r}") from None
        if declared_count != len(links):
            if strict_counts:
                raise CountMismatch(len(links), declared_count, metadata, links)
            logger.warning("declared %d links but parsed %d", declared_count, len(links))

    return metadata, links


def format_net_file(metadata: Dict[str, str], links: Sequence[RawLinkRecord]) -> str:
    """Serialize records back to TNTP text; parse_net_file reverses it exactly"""
    lines = [f"<{tag}> {value}" for tag, value in metadata.items() if tag != END_OF_METADATA]
    lines.append(f"<{END_OF_METADATA}>")
    lines.append("")
    lines.append("~\t" + "\t".join(LINK_FIELDS) + "\t;")
    for link in links:
        fields = [
            str(link.init_node),
            str(link.term_node),
            repr(link.capacity),
            repr(link.length),
            repr(link.free_flow_time),
            repr(link.b),
            repr(link.power),
            repr(link.speed),
            repr(link.toll),
            str(link.link_type),
        ]
        lines.append("\t" + "\t".join(fields) + "\t;")
    return "\n".join(lines) + "\n"


def parse_node_file(text: Text) -> List[NodeCoordinate]:
    """Parse `node x y` rows; a leading header row and trailing `;` are allowed"""
    coords: List[NodeCoordinate] = []
    seen = set()

    for line_number, line in enumerate(_lines(text), start=1):
        tokens = _strip_comment(line).replace(";", " ").split()
        if not tokens:
            continue
        if not coords and _is_header(tokens):
            continue
        if len(tokens) < 3:
            raise MalformedRow(line_number, line, "expected node, x and y")

        node_id = _parse_id(tokens[0], line_number, line, "node")
        try:
            x, y = float(tokens[1]), float(tokens[2])
        except ValueError:
            raise MalformedRow(line_number, line, "coordinate is not numeric") from None
        if node_id in seen:
            raise DuplicateNode(node_id)
        seen.add(node_id)
        coords.append(NodeCoordinate(node_id, x, y))

    return coords


def build_graph(
    links: Sequence[RawLinkRecord], coords: Optional[Sequence[NodeCoordinate]] = None
) -> DirectedGraph:
    """Directed graph over every endpoint id (and coordinate-only ids).

    Repeated (init, term) pairs collapse to the first record; self-loops are
    dropped. Both are counted on the returned graph.
    """
    ids = {link.init_node for link in links} | {link.term_node for link in links}
    if coords:
        ids |= {coord.node_id for coord in coords}
    node_ids = sorted(ids)
    index = {node_id: i for i, node_id in enumerate(node_ids)}

    graph = DirectedGraph.from_edges(
        len(node_ids),
        ((index[link.init_node], index[link.term_node]) for link in links),
        lengths=[link.length for link in links],
        node_ids=node_ids,
    )
    if graph.duplicates_collapsed or graph.self_loops_dropped:
        logger.info(
            "collapsed %d duplicate links, dropped %d self-loops",
            graph.duplicates_collapsed,
            graph.self_loops_dropped,
        )
    return graph


def read_manifest(path: Union[str, Path]) -> DatasetManifest:
    """Read `name = net_path [, node_path]` lines under a [networks] section"""
    path = Path(path)
    parser = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    parser.optionxform = str  # network names keep their case
    try:
        with open(path, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except configparser.DuplicateOptionError as exc:
        raise DuplicateNetwork(exc.option) from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from None

    for section in parser.sections():
        if section != "networks":
            raise UnknownConfigKey(section)
    if not parser.has_section("networks"):
        raise EmptyManifest(path)

    base = path.parent
    entries = []
    for name, value in parser.items("networks"):
        parts = [part.strip() for part in value.split(",") if part.strip()]
        if not parts or len(parts) > 2:
            raise ConfigError(f"manifest entry {name!r} needs `net_path [, node_path]`")
        net_path = base / parts[0]
        node_path = base / parts[1] if len(parts) == 2 else None
        entries.append(ManifestEntry(name, net_path, node_path))

    if not entries:
        raise EmptyManifest(path)
    return DatasetManifest(entries=tuple(entries), path=path)


def read_net_file(
    path: Union[str, Path], strict_counts: bool = False
) -> Tuple[Dict[str, str], List[RawLinkRecord]]:
    with open(path, "r", encoding="utf-8", errors="replace") as f:
        return parse_net_file(f, strict_counts=strict_counts)


def read_node_file(path: Union[str, Path]) -> List[NodeCoordinate]:
    with open(path, "r", encoding="utf-8", errors="replace") as f:
        return parse_node_file(f)


def _first_thru_node(metadata: Dict[str, str], network_name: str) -> Optional[int]:
    value = metadata.get("FIRST THRU NODE")
    if value is None:
        return None
    try:
        return int(float(value))
    except ValueError:
        logger.warning("%s: ignoring unreadable FIRST THRU NODE %r", network_name, value)
        return None


def load_network(entry: ManifestEntry) -> DirectedGraph:
    """Read one manifest entry into a graph, downgrading count mismatches.

    FIRST THRU NODE is kept on the graph as `first_thru_node`; metrics ignore it.
    """
    metadata, links = read_net_file(entry.net_file_path)
    coords = read_node_file(entry.node_file_path) if entry.node_file_path else None
    graph = replace(build_graph(links, coords), first_thru_node=_first_thru_node(metadata, entry.network_name))
    logger.info("%s: %d nodes, %d links", entry.network_name, graph.n, graph.m)
    return graph
