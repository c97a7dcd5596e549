"""Time the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter (the backend is fixed at import
time). Both must report identical solver counters; only timings differ.

    python3 benchmarks/bench_backends.py [--seeds 5]
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKLOADS = [
    # (solver, rows, cols, obstacles)
    ("backtrack", 20, 20, 133),
    ("mcts", 20, 20, 133),
    ("sat", 10, 10, 32),
]


def worker(seeds):
    from mazedash._jit import backend
    from mazedash.bench import run_solver, warmup
    from mazedash.generator import GenConfig, generate_puzzle

    warmup()
    out = {"backend": backend(), "rows": []}
    for solver, rows, cols, k in WORKLOADS:
        puzzles = [generate_puzzle(GenConfig(rows, cols, k, seed=s)).puzzle for s in range(seeds)]
        t0 = time.perf_counter()
        counters = [run_solver(solver, p, None, seed=s).counters() for s, p in enumerate(puzzles)]
        out["rows"].append({
            "workload": f"{solver} {rows}x{cols}/{k}",
            "seconds": time.perf_counter() - t0,
            "counters": counters,
        })
    json.dump(out, sys.stdout)


def run_backend(no_jit, seeds):
    env = dict(os.environ)
    env.pop("MAZEDASH_NO_JIT", None)
    if no_jit:
        env["MAZEDASH_NO_JIT"] = "1"
    proc = subprocess.run([sys.executable, __file__, "--worker", "--seeds", str(seeds)],
                          capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.seeds)
        return 0

    fast = run_backend(False, args.seeds)
    slow = run_backend(True, args.seeds)
    print(f"| workload ({args.seeds} instances) | {fast['backend']} s | {slow['backend']} s | speedup | counters match |")
    print("|---|---|---|---|---|")
    ok = True
    for a, b in zip(fast["rows"], slow["rows"]):
        same = a["counters"] == b["counters"]
        ok &= same
        print(f"| {a['workload']} | {a['seconds']:.4f} | {b['seconds']:.4f} | "
              f"{b['seconds'] / max(a['seconds'], 1e-9):.0f}x | {'yes' if same else 'NO'} |")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
