"""Compare the compiled and pure-Python threshold/decision kernels.

    python benchmarks/bench_kernels.py [--n 200000] [--repeat 3]

Times every kernel on one long random aggregate stream, then a tolerance x
strategy sweep over a fixture log, once per backend.
"""

import argparse
import timeit

import numpy as np

from implicitauth import fixtures as fx
from implicitauth import kernels
from implicitauth.config import EngineConfig
from implicitauth.evaluation import sweep


def kernel_cases(values):
    n = len(values)
    thr = values - 5.0
    return {
        "ewma_direct": lambda k: k.ewma_direct_stream(values, 0.2),
        "sd_block": lambda k: k.sd_block_stream(values, 50, 0),
        "static": lambda k: k.static_stream(values, n // 10, 0),
        "ewma_sd_block": lambda k: k.ewma_sd_block_stream(values, n // 10, 8, 0.2, 0),
        "classify": lambda k: k.classify_stream(values, thr, 10.0),
    }


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="stream length")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = {"python": kernels.python_backend}
    if kernels.compiled_backend is not None:
        backends["cython"] = kernels.compiled_backend
    else:
        print("compiled extension not available; timing the Python backend only")

    values = np.random.default_rng(0).uniform(0, 100, args.n)
    print(f"stream length {args.n}, best of {args.repeat}")
    print(f"{'kernel':<16}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for name, case in kernel_cases(values).items():
        times = [best_of(lambda k=k: case(k), args.repeat) for k in backends.values()]
        speed = f"{times[0] / times[1]:9.1f}x" if len(times) == 2 else ""
        print(f"{name:<16}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)

    log = fx.adversary_log("case1", fx.ADVERSARY_SEEDS[0])
    grid = {"strategy": ["static", "sd_block", "ewma_direct", "ewma_sd_block"],
            "tolerance": list(range(11)), "alpha": [0.05, 0.1, 0.2, 0.5]}
    times = [best_of(lambda k=k: sweep(log, fx.CONTACTS, EngineConfig(), grid,
                                       attack_start=fx.ATTACK_START, backend=k), args.repeat)
             for k in backends.values()]
    speed = f"{times[0] / times[1]:9.1f}x" if len(times) == 2 else ""
    print(f"{'sweep (176 pts)':<16}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
