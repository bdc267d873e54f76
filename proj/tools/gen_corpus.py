#!/usr/bin/env python3
# Copyright 2026 The kperf Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Generates the bundled synthetic corpus next to data/corpus/kernels.ptx.

Writes trace.csv (launch configurations and block execution counts that
follow the control flow of each kernel), time.csv and power.csv (synthetic
measurements). Output is deterministic.

    python3 tools/gen_corpus.py [--out data/corpus] [--seed 20210419]
"""

import argparse
import math
import pathlib
import random

KERNELS = {
    "vecadd": "_Z6vecAddPKfS0_Pfi",
    "matmul": "_Z11matmulTiledPKfS0_Pfi",
    "reduce": "_Z10normReducePfS_i",
}
DATASETS = ("small", "large")
LAUNCHES = 25
TIME_RUNS = 10
POWER_RUNS = 10
POWER_SAMPLES = 5
KEY = "benchmark,dataset,kernel,launch_seq"


def ceil_div(a, b):
    return -(-a // b)


def launch(bench, size, rng):
    """Returns (grid, block, shared bytes, block counts, work units)."""
    if bench == "matmul":
        block = (16, 16, 1)
        g = ceil_div(size, 16)
        grid = (g, g, 1)
        threads = g * g * 256
        if size < 16:
            counts = {0: threads, 3: threads}
        else:
            counts = {0: threads, 1: threads, 2: threads * size // 16, 3: threads}
        return grid, block, 2048, counts, size ** 3
    bs = rng.choice((64, 128, 256, 512))
    grid = (ceil_div(size, bs), 1, 1)
    threads = grid[0] * bs
    active = min(threads, size)
    if bench == "vecadd":
        counts = {0: threads, 1: active, 2: threads}
        return grid, (bs, 1, 1), 0, counts, size
    counts = {0: threads, 1: threads, 2: active, 3: threads - active}
    return grid, (bs, 1, 1), 0, {b: c for b, c in counts.items() if c}, 2 * size


def duration_us(bench, work):
    rate = {"vecadd": 0.002, "matmul": 2e-6, "reduce": 0.003}[bench]
    return 3.0 + rate * work


def problem_size(bench, dataset, rng):
    if bench == "matmul":
        lo, hi = (4, 256) if dataset == "small" else (256, 2048)
        return rng.randint(lo, hi)
    lo, hi = (3.0, 5.5) if dataset == "small" else (5.5, 8.0)
    return int(10 ** rng.uniform(lo, hi))


def fmt(x):
    return repr(round(x, 4))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent
                                             / "data" / "corpus"))
    parser.add_argument("--seed", type=int, default=20210419)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    out = pathlib.Path(args.out)

    trace = [f"# trace v1: {KEY},grid_x,grid_y,grid_z,block_x,block_y,block_z,"
             "shared_mem_bytes,block_counts"]
    time = [f"# time v1: {KEY},run,duration_us"]
    power = [f"# power v1: {KEY},run,timestamp_ms,watts"]
    for bench, kernel in KERNELS.items():
        for dataset in DATASETS:
            for seq in range(LAUNCHES):
                size = problem_size(bench, dataset, rng)
                grid, block, shared, counts, work = launch(bench, size, rng)
                key = f"{bench},{dataset},{kernel},{seq}"
                pairs = ";".join(f"{b}:{c}" for b, c in sorted(counts.items()))
                trace.append(f"{key},{grid[0]},{grid[1]},{grid[2]},"
                             f"{block[0]},{block[1]},{block[2]},{shared},{pairs}")
                t = duration_us(bench, work)
                for run in range(TIME_RUNS):
                    time.append(f"{key},{run},{fmt(t * math.exp(rng.gauss(0, 0.03)))}")
                load = 1.0 - math.exp(-t / 5000.0)
                watts = 45.0 + {"vecadd": 90, "matmul": 160, "reduce": 110}[bench] * load
                for run in range(POWER_RUNS):
                    level = watts * (1 + rng.gauss(0, 0.01))
                    for s in range(POWER_SAMPLES):
                        stamp = 10.0 * s + rng.uniform(0, 1)
                        power.append(f"{key},{run},{fmt(stamp)},"
                                     f"{fmt(level + rng.gauss(0, 0.5))}")
    # A measurement whose launch was never traced.
    time.append(f"vecadd,small,{KERNELS['vecadd']},{LAUNCHES},0,42.0")
    power.append(f"vecadd,small,{KERNELS['vecadd']},{LAUNCHES},0,0.0,50.0")

    out.mkdir(parents=True, exist_ok=True)
    for name, lines in (("trace.csv", trace), ("time.csv", time), ("power.csv", power)):
        (out / name).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
