"""Compare the compiled Numerov kernel with the pure-Python fallback.

Usage: python3 benchmarks/bench_numerov.py [--sizes 1000 10000 100000] [--repeat 5]
"""
import argparse
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from robinbc import _kernels


def best_time(fn, f, h, repeat):
    return min(timeit.repeat(lambda: fn(f, h, 0.0, h), number=1, repeat=repeat))


def kernels(sizes, repeat):
    if _kernels.compiled_numerov is None:
        sys.exit("compiled kernel not built; run pip install --no-build-isolation -e .")
    print(f"{'n':>8} {'compiled [ms]':>14} {'python [ms]':>12} {'speed-up':>9} {'max |diff|':>11}")
    for n in sizes:
        h = 20.0 / n
        f = np.full(n, 4.0)  # psi'' = -4 psi, a few wavelengths
        tc = best_time(_kernels.compiled_numerov, f, h, repeat)
        tp = best_time(_kernels.python_numerov, f, h, max(1, repeat // 2))
        yc, _ = _kernels.compiled_numerov(f, h, 0.0, h)
        yp, _ = _kernels.python_numerov(f, h, 0.0, h)
        diff = float(np.max(np.abs(yc - yp)))
        print(f"{n:>8} {1e3 * tc:>14.3f} {1e3 * tp:>12.3f} {tp / tc:>9.1f} {diff:>11.1e}")


def end_to_end(repeat):
    # backend is fixed at import, so each one runs in its own interpreter
    code = ("import timeit; from robinbc import oracle, potentials as P; p = P.morse(10.0, 0.5); "
            f"print(min(timeit.repeat(lambda: oracle.integrate_scattering(p, 0.2), number=1, repeat={repeat})))")
    for flag, name in (("0", "compiled"), ("1", "python")):
        env = dict(os.environ, ROBINBC_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        print(f"Morse scattering phase, {name:>8}: {1e3 * float(out.stdout):.2f} ms")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10**3, 10**4, 10**5])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    kernels(args.sizes, args.repeat)
    end_to_end(max(1, math.ceil(args.repeat / 2)))


if __name__ == "__main__":
    main()
