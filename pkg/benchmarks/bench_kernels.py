"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--max-points N]

Both backends are imported directly, so one run times them side by side
regardless of SEQTOP_PURE_PYTHON.
"""

import argparse
import random
import sys
import timeit

from seqtop import _pykernels

try:
    from seqtop import _ckernels
except ImportError:
    _ckernels = None


def workloads(max_points: int):
    rng = random.Random(0)
    n = max_points
    full = (1 << n) - 1
    base = _pykernels.min_nbhds_from_subbasis(n, [rng.randrange(1, full) for _ in range(3)])
    cands = _pykernels.enumerate_min_nbhds(n)
    table = [0] + [rng.randrange(full + 1) for _ in range(full)]
    # antitone clean-up so the table is a plausible operator
    for a in range(1, full + 1):
        for b in range(1, full + 1):
            if a & b == b:
                table[a] &= table[b]
    subbasis = [rng.randrange(1, full) for _ in range(2 * n)]
    return {
        f"enumerate_min_nbhds({n})": lambda k: k.enumerate_min_nbhds(n),
        f"filter_finer_separating({n}, {len(cands)} candidates)":
            lambda k: k.filter_finer_separating(n, 1, list(base), cands),
        f"derived_closed_sets({n})": lambda k: k.derived_closed_sets(n, table),
        f"min_nbhds_from_subbasis({n}, {len(subbasis)} sets)": lambda k: k.min_nbhds_from_subbasis(n, subbasis),
    }


def per_call(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat, loops)) / loops


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-points", type=int, default=6)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
        return 2
    print(f"{'kernel':<52}{'python us':>12}{'cython us':>12}{'speedup':>9}")
    for name, fn in workloads(args.max_points).items():
        py, cy = (per_call(lambda k=k: fn(k), args.repeat) for k in (_pykernels, _ckernels))
        print(f"{name:<52}{py * 1e6:>12.1f}{cy * 1e6:>12.1f}{py / cy:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
