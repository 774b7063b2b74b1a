#!/usr/bin/env python3
"""
Time the metrics stage on square street grids of growing size.
"""

import argparse
import json
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Dict, List

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))
from roadnet.feature_pipeline import compute_network_features
from roadnet.graph_core import DirectedGraph


def grid_graph(side: int) -> DirectedGraph:
    """Bidirectional side x side grid with unit lengths"""
    edges = []
    for r in range(side):
        for c in range(side):
            here = r * side + c
            if c + 1 < side:
                edges += [(here, here + 1), (here + 1, here)]
            if r + 1 < side:
                edges += [(here, here + side), (here + side, here)]
    return DirectedGraph.from_edges(side * side, edges, lengths=[1.0] * len(edges))


class BenchmarkRunner:
    """Run the metric stage on synthetic grids and collect timings"""

    def __init__(self, workers: int = 1):
        self.workers = workers
        self.results: List[Dict] = []

    def run_benchmark(self, side: int) -> Dict:
        graph = grid_graph(side)
        print(f"🔍 grid {side}x{side}: {graph.n} nodes, {graph.m} links")
        started = time.perf_counter()
        vector = compute_network_features(f"grid{side}", graph, workers=self.workers)
        elapsed = time.perf_counter() - started
        result = {
            "name": f"grid{side}",
            "nodes": graph.n,
            "links": graph.m,
            "workers": self.workers,
            "elapsed_time": elapsed,
            "diameter": vector.general.diameter,
        }
        print(f"  ⏱  {elapsed:.3f}s")
        self.results.append(result)
        return result

    def generate_report(self) -> str:
        report = ["", "=" * 60, "SYNTHETIC GRID TIMINGS", "=" * 60]
        for result in self.results:
            report.append(
                f"{result['name']:<10} {result['nodes']:>7} nodes {result['links']:>8} links  "
                f"{result['elapsed_time']:>9.3f}s"
            )
        report.append("=" * 60)
        return "\n".join(report)


def main() -> int:
    parser = argparse.ArgumentParser(description="Metric-stage timings on synthetic grids")
    parser.add_argument("--sides", type=int, nargs="+", default=[10, 20, 40, 80])
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    runner = BenchmarkRunner(workers=args.workers)
    for side in args.sides:
        runner.run_benchmark(side)
    print(runner.generate_report())

    results_dir = Path(__file__).parent.parent / "results"
    results_dir.mkdir(exist_ok=True)
    results_file = results_dir / f"synthetic_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
    results_file.write_text(json.dumps(runner.results, indent=2) + "\n", encoding="utf-8")
    print(f"✅ Detailed results saved to: {results_file}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
