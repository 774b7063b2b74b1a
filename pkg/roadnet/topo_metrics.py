"""
General (non-centrality) topology features of a road network.

Distances are directed hop counts. Metrics that need eccentricities use the giant
strongly connected component; path-length averages skip unreachable pairs.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import networkx as nx
import numpy as np

from .errors import DegenerateGraph, MissingLengths, UndefinedCorrelation
from .graph_core import (
    FORWARD,
    REVERSE,
    DirectedGraph,
    DistanceSummary,
    distance_rows,
    distance_summary,
    giant,
    strongly_connected_components,
    undirected_projection,
    weakly_connected_components,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneralFeatures:
    nodes: int
    links: int
    avg_link_length: float
    density: float
    diameter: int
    radius: int
    reciprocity: float
    transitivity: float
    gscc_size: int
    gwcc_size: int
    scc_count: int
    wcc_count: int
    acc: float
    dac: Optional[float]
    aspl: float
    age: float
    ale: float

    def as_dict(self) -> dict:
        return asdict(self)


def _require_nodes(g: DirectedGraph, minimum: int, metric: str) -> None:
    if g.n < minimum:
        raise DegenerateGraph(f"{metric} needs at least {minimum} nodes, graph has {g.n}")


def density(g: DirectedGraph) -> float:
    _require_nodes(g, 2, "density")
    return g.m / (g.n * (g.n - 1))


def reciprocity(g: DirectedGraph) -> float:
    """Share of directed edges whose reverse edge also exists"""
    if g.m == 0:
        raise DegenerateGraph("reciprocity is undefined without edges")
    mutual = g.adjacency.multiply(g.reverse_adjacency).nnz
    return mutual / g.m


def transitivity(g: DirectedGraph) -> float:
    """3 x triangles / connected triples on the undirected projection"""
    return float(nx.transitivity(undirected_projection(g).to_networkx(directed=False)))


def average_clustering_coefficient(g: DirectedGraph) -> float:
    """Mean directed clustering coefficient over all nodes, zeros included.

    c_v = T(v) / (d_tot(v)(d_tot(v) - 1) - 2 d_bi(v)) counting every directed
    triangle orientation, which is what networkx computes for a DiGraph.
    """
    if g.n == 0:
        return 0.0
    return float(nx.average_clustering(g.to_networkx(directed=True)))


def average_shortest_path_length(
    g: DirectedGraph, summary: Optional[DistanceSummary] = None
) -> float:
    _require_nodes(g, 2, "average shortest path length")
    summary = summary or distance_summary(g, REVERSE)
    pairs = int(summary.reach_count.sum())
    if pairs == 0:
        raise DegenerateGraph("no node can reach another")
    if pairs < g.n * (g.n - 1):
        logger.debug("ASPL over %d of %d ordered pairs", pairs, g.n * (g.n - 1))
    return float(summary.distance_sum.sum() / pairs)


def global_efficiency(g: DirectedGraph, summary: Optional[DistanceSummary] = None) -> float:
    _require_nodes(g, 2, "global efficiency")
    summary = summary or distance_summary(g, REVERSE)
    return float(summary.inverse_sum.sum() / (g.n * (g.n - 1)))


def eccentricities(g: DirectedGraph) -> np.ndarray:
    """Forward eccentricity of every node; g must be strongly connected"""
    ecc = np.zeros(g.n, dtype=np.int64)
    for chunk, block in distance_rows(g, FORWARD):
        ecc[chunk] = block.max(axis=1).astype(np.int64)
    return ecc


def diameter_and_radius(g: DirectedGraph) -> Tuple[int, int]:
    _require_nodes(g, 1, "diameter")
    core = giant(strongly_connected_components(g))
    if len(core) < 2:
        raise DegenerateGraph("giant strongly connected component has fewer than 2 nodes")
    subgraph = g if len(core) == g.n else g.subgraph(core)
    ecc = eccentricities(subgraph)
    return int(ecc.max()), int(ecc.min())


def component_stats(g: DirectedGraph) -> Tuple[int, int, int, int]:
    """(scc_count, wcc_count, gscc_size, gwcc_size)"""
    sccs = strongly_connected_components(g)
    wccs = weakly_connected_components(g)
    return len(sccs), len(wccs), len(giant(sccs)), len(giant(wccs))


def local_efficiency(g: DirectedGraph) -> float:
    """Mean global efficiency of each node's neighbour-induced subgraph (undirected)"""
    if g.n == 0:
        return 0.0
    return float(nx.local_efficiency(undirected_projection(g).to_networkx(directed=False)))


def degree_assortativity(g: DirectedGraph) -> float:
    """Pearson r between out-degree(u) and in-degree(v) over edges (u, v)"""
    if g.m < 2:
        raise UndefinedCorrelation(f"need at least 2 edges, graph has {g.m}")
    x = g.out_degree[g.sources].astype(float)
    y = g.in_degree[g.targets].astype(float)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedCorrelation("degree sequence is constant at one edge end")
    return float(np.corrcoef(x, y)[0, 1])


def average_link_length(g: DirectedGraph) -> float:
    if g.edge_lengths is None:
        raise MissingLengths("graph was built without link lengths")
    if g.m == 0:
        raise DegenerateGraph("average link length is undefined without edges")
    return float(np.mean(g.edge_lengths))


def general_features(g: DirectedGraph, summary: Optional[DistanceSummary] = None) -> GeneralFeatures:
    summary = summary or distance_summary(g, REVERSE)
    scc_count, wcc_count, gscc_size, gwcc_size = component_stats(g)
    diameter, radius = diameter_and_radius(g)
    try:
        dac: Optional[float] = degree_assortativity(g)
    except UndefinedCorrelation as exc:
        logger.info("degree assortativity undefined: %s", exc)
        dac = None

    return GeneralFeatures(
        nodes=g.n,
        links=g.m,
        avg_link_length=average_link_length(g),
        density=density(g),
        diameter=diameter,
        radius=radius,
        reciprocity=reciprocity(g),
        transitivity=transitivity(g),
        gscc_size=gscc_size,
        gwcc_size=gwcc_size,
        scc_count=scc_count,
        wcc_count=wcc_count,
        acc=average_clustering_coefficient(g),
        dac=dac,
        aspl=average_shortest_path_length(g, summary),
        age=global_efficiency(g, summary),
        ale=local_efficiency(g),
    )
