"""Compare the compiled and pure-Python clique-counting kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--threads N] [--quick]

Prints one CSV row per (workload, backend): best wall time over the repeats
and the count, which must agree across backends.
"""
import argparse
import csv
import sys
import time

import numpy as np

from edl import _backend
from edl.graph import Graph, count_cliques, count_cliques_through, hamming_graph


def random_graph(n, density, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < density, 1)
    adj = upper | upper.T
    rows = [int.from_bytes(np.packbits(r, bitorder="little").tobytes(), "little") for r in adj]
    return Graph(n, rows, validate=False)


def workloads(quick):
    yield "gnp(200,0.5) K4", lambda be, th: count_cliques(random_graph(200, 0.5, 1), 4, backend=be, threads=th).cliques
    yield "gnp(400,0.3) K5", lambda be, th: count_cliques(random_graph(400, 0.3, 2), 5, backend=be, threads=th).cliques
    H = hamming_graph(10 if quick else 13, {1, 4, 5, 8, 9} if quick else {1, 4, 5, 8, 9, 11})
    yield f"cayley({H.n}) K4 via vertex 1", lambda be, th: count_cliques_through(H, 1, 4, backend=be, threads=th)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--quick", action="store_true", help="smaller Cayley graph")
    args = ap.parse_args(argv)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["workload", "backend", "seconds", "count"])
    for name, fn in workloads(args.quick):
        seen = set()
        for be in _backend.available():
            best, value = float("inf"), None
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                value = fn(be, args.threads)
                best = min(best, time.perf_counter() - t0)
            seen.add(value)
            writer.writerow([name, be, f"{best:.4f}", value])
            sys.stdout.flush()
        if len(seen) != 1:
            print(f"backends disagree on {name}: {sorted(seen)}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
