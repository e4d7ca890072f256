"""Compare the compiled and pure-Python race kernels.

    python3 benchmarks/bench_race.py [--samples N] [--repeat K]
"""
import argparse
import timeit

from hyll.simulator import _race_py

try:
    from hyll.simulator import _race
except ImportError:
    _race = None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    props = [2.0, 3.0]
    kernels = [("python", _race_py)] + ([("cython", _race)] if _race else [])
    base = None
    results = {}
    for name, mod in kernels:
        state = mod.seed_state(2024)
        t = min(timeit.repeat(lambda: mod.race_batch(props, args.samples, state),
                              number=1, repeat=args.repeat))
        results[name] = mod.race_batch(props, args.samples, state)
        base = base or t
        print(f"{name:7s} {args.samples} races: {t * 1e3:9.2f} ms  ({base / t:6.1f}x)")
    if len(results) == 2:
        same = results["python"] == results["cython"]
        print(f"identical output: {same}")
    else:
        print("compiled kernel not available; only the Python kernel was timed")


if __name__ == "__main__":
    main()
