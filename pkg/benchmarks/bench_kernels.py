"""Compare the compiled and pure-numpy LP kernels.

Runs the LP relaxation and a full DCA solve on synthetic instances with
both backends, checks that the answers are bit-identical and prints the
timings.

    python3 benchmarks/bench_kernels.py [--sizes 12x12x4 30x30x7] [--repeat 3]
"""

import argparse
import time

import numpy as np

from ngcut.dca import DcaConfig, run_dca
from ngcut.formulation import Formulation
from ngcut.lp import BACKENDS, solve_lp
from ngcut.model import Instance, Piece


def synthetic(L: int, W: int, m: int, seed: int = 0) -> Instance:
    rng = np.random.default_rng(seed)
    pieces = []
    for _ in range(m):
        l = int(rng.integers(max(1, L // 10), max(2, L // 2)))
        w = int(rng.integers(max(1, W // 10), max(2, W // 2)))
        v = int(l * w * rng.uniform(1, 3))
        pieces.append(Piece(l, w, max(v, 1), int(rng.integers(1, 4))))
    return Instance(L, W, tuple(pieces), f"syn{L}x{W}x{m}")


def best_of(fn, repeat: int):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", default=["12x12x4", "20x20x6", "30x30x7"],
                    help="LxWxm triples")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--t", type=float, default=50.0)
    ap.add_argument("--u", type=float, default=100.0)
    args = ap.parse_args(argv)

    backends = sorted(BACKENDS)
    if "cython" not in backends:
        print("compiled kernel not built; timing the numpy fallback only")
    header = f"{'instance':>14} {'n':>6} {'rows':>5} {'task':>5}" + "".join(f" {b:>9}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>8} {'same':>5}"
    print(header)
    for size in args.sizes:
        L, W, m = (int(v) for v in size.split("x"))
        form = Formulation(synthetic(L, W, m))
        tasks = {
            "lp": lambda be: solve_lp(form.A, -form.v, backend=be).x,
            "dca": lambda be: run_dca(form, DcaConfig(t=args.t, u=args.u, backend=be)).x_final,
        }
        for name, task in tasks.items():
            res = {be: best_of(lambda: task(be), args.repeat) for be in backends}
            line = f"{form.instance.name:>14} {form.n:>6} {form.A.n_rows:>5} {name:>5}"
            line += "".join(f" {res[be][0]:>8.3f}s" for be in backends)
            if len(backends) == 2:
                speed = res["python"][0] / res["cython"][0]
                same = np.array_equal(res["python"][1], res["cython"][1])
                line += f" {speed:>7.1f}x {str(same):>5}"
            print(line, flush=True)


if __name__ == "__main__":
    main()
