#!/usr/bin/env python3
"""Report how the bounded underlying device graph grows with the sample.

For a graph file, samples morphisms at increasing event budgets, computes
the interference cliques each time, and prints the device counts so the
stability of the finite approximation can be judged.

Usage: python scripts/bounded_underlying_report.py FILE [--pool W1,W2,...]
"""

from __future__ import annotations

import argparse
import sys

from restrace.cli import _pool_arg, parse_graph_file
from restrace.graphs import Word
from restrace.interference import underlying_device_graph_bounded


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("file")
    ap.add_argument("--pool", default="")
    ap.add_argument("--max-events", type=int, default=3)
    ap.add_argument("--cap", type=int, default=50_000)
    args = ap.parse_args()

    with open(args.file, encoding="utf-8") as fh:
        gf = parse_graph_file(fh.read())
    pool = _pool_arg(args.pool) if args.pool else [Word()]

    print(f"pool: {[str(w) or 'ε' for w in pool]}")
    previous = None
    for budget in range(1, args.max_events + 1):
        bounded = underlying_device_graph_bounded(gf.device_graph, budget, pool, args.cap)
        sizes = sorted(len(c) for c in bounded.cliques)
        print(
            f"max_events={budget}: {len(bounded.handles)} sampled morphisms, "
            f"{len(bounded.cliques)} devices, clique sizes {sizes}"
        )
        if previous is not None and len(bounded.cliques) != previous:
            print("  note: device count changed with the budget; the sample is not yet stable")
        previous = len(bounded.cliques)
    return 0


if __name__ == "__main__":
    sys.exit(main())
