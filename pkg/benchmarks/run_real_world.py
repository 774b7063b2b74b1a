#!/usr/bin/env python3
"""
Time loading and the metrics stage for every network in a dataset manifest.

Usage: python benchmarks/run_real_world.py path/to/networks.ini [--workers N]
"""

import argparse
import json
import logging
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Dict, List

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))
from roadnet.errors import RoadnetError
from roadnet.feature_pipeline import compute_network_features
from roadnet.tntp_io import load_network, read_manifest


class BenchmarkRunner:
    """Per-network load and metric timings"""

    def __init__(self, workers: int = 1):
        self.workers = workers
        self.results: List[Dict] = []

    def run_benchmark(self, entry) -> Dict:
        print(f"\n{'=' * 60}")
        print(f"Network: {entry.network_name}")
        print(f"{'=' * 60}")
        result = {"name": entry.network_name, "success": False, "error": None}
        started = time.perf_counter()
        try:
            graph = load_network(entry)
            result["load_time"] = time.perf_counter() - started
            result.update(nodes=graph.n, links=graph.m)

            started = time.perf_counter()
            vector = compute_network_features(entry.network_name, graph, workers=self.workers)
            result["metrics_time"] = time.perf_counter() - started
            result["features"] = vector.as_dict()
            result["success"] = True
            print(f"  ⏱  load {result['load_time']:.3f}s, metrics {result['metrics_time']:.3f}s")
        except RoadnetError as e:
            result["error"] = str(e)
            print(f"  ❌ {e}")
        self.results.append(result)
        return result

    def generate_report(self) -> str:
        report = ["", "=" * 60, "BENCHMARK RESULTS SUMMARY", "=" * 60]
        for result in self.results:
            if result["success"]:
                report.append(
                    f"✅ {result['name']:<24} {result['nodes']:>7} nodes  "
                    f"load {result['load_time']:>8.3f}s  metrics {result['metrics_time']:>9.3f}s"
                )
            else:
                report.append(f"❌ {result['name']:<24} {result['error']}")
        report.append("=" * 60)
        return "\n".join(report)


def main() -> int:
    parser = argparse.ArgumentParser(description="Per-network timings for a TNTP dataset manifest")
    parser.add_argument("manifest", help="Dataset manifest (INI with a [networks] section)")
    parser.add_argument("--workers", type=int, default=1, help="Processes for betweenness")
    args = parser.parse_args()
    logging.basicConfig(level=logging.WARNING)

    try:
        manifest = read_manifest(args.manifest)
    except RoadnetError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code

    runner = BenchmarkRunner(workers=args.workers)
    for entry in manifest.entries:
        runner.run_benchmark(entry)
    print(runner.generate_report())

    results_dir = Path(__file__).parent.parent / "results"
    results_dir.mkdir(exist_ok=True)
    results_file = results_dir / f"real_world_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
    results_file.write_text(json.dumps(runner.results, indent=2) + "\n", encoding="utf-8")
    print(f"\nDetailed results saved to: {results_file}")
    return 0 if all(result["success"] for result in runner.results) else 1


if __name__ == "__main__":
    sys.exit(main())
