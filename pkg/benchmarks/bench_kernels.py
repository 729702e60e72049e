"""Compare the compiled and pure-Python kernels on the hot paths.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import timeit

from orderdag import _pykernel

try:
    from orderdag import _ckernel
except ImportError:
    _ckernel = None


def cases(k):
    parents30 = [k.sample_parents(0, i, 30, 0.5) for i in range(200)]
    parents110 = [k.sample_parents(0, i, 110, 0.2) for i in range(50)]
    masks = [1 << v for v in range(30)]
    return {
        "sample n=30 (x200)": lambda: [k.sample_parents(0, i, 30, 0.5) for i in range(200)],
        "essential n=30 (x200)": lambda: [k.essential(30, p) for p in parents30],
        "essential n=110 (x50)": lambda: [k.essential(110, p) for p in parents110],
        "30 single targets n=30 (x20)": lambda: [k.undirected_counts(30, p, masks)
                                                 for p in parents30[:20]],
        "sample+count n=30 (x2000)": lambda: k.sample_undirected_counts(1, 30, 0.5, 0, 2000),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = {"python": _pykernel}
    if _ckernel is not None:
        backends["cython"] = _ckernel
    timings = {name: {label: min(timeit.repeat(fn, number=1, repeat=args.repeat))
                      for label, fn in cases(mod).items()}
               for name, mod in backends.items()}
    print(f"{'case':<30}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for label in timings["python"]:
        row = f"{label:<30}" + "".join(f"{timings[b][label] * 1e3:>10.2f}ms" for b in backends)
        if "cython" in timings:
            row += f"  {timings['python'][label] / timings['cython'][label]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
