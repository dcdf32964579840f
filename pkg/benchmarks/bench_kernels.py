"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Counting: exhaustive typed search for closed typable terms.
Sampling: attempts per second of the typed and normal-form samplers at the
default size windows (every attempt is consumed, none succeeds).
"""
import argparse
import time

from lambdagen import _backend
from lambdagen.sampler import SampleClass, default_thresholds


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def bench_count(k, units, repeat):
    return best_of(lambda: k.count_search(True, True, False, units), repeat)


def bench_sample(k, mode, cls, lo, hi, attempts, repeat):
    t = default_thresholds(cls)
    # a window that is never hit keeps the kernel busy for exactly `attempts`
    elapsed, (n, _, _) = best_of(lambda: k.run_sampler(mode, *t, lo, hi, attempts, 12345), repeat)
    return elapsed, n


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = _backend.available_backends()
    if "compiled" not in names:
        print("compiled kernels not built; only the Python backend is available")
    rows = []
    for name in names:
        k = _backend.load_backend(name)
        count_units = 13 if name == "python" else 15
        el, total = bench_count(k, count_units, args.repeat)
        rows.append((name, f"count closed-typable units={count_units}", f"{total} terms", el, None))
        attempts = 20_000 if name == "python" else 2_000_000
        for label, mode, cls, lo, hi in (("typed", 0, SampleClass.TYPED, 10_000, 10_000),
                                         ("typed-nf", 1, SampleClass.TYPED_NF, 10_000, 10_000)):
            el, n = bench_sample(k, mode, cls, lo, hi, attempts, args.repeat)
            rows.append((name, f"sample {label}", f"{n} attempts", el, n / el))
    print(f"{'backend':<9} {'workload':<32} {'size':>16} {'seconds':>9} {'attempts/s':>12}")
    for name, work, size, el, rate in rows:
        rate_s = f"{rate:,.0f}" if rate else ""
        print(f"{name:<9} {work:<32} {size:>16} {el:>9.3f} {rate_s:>12}")
    if "compiled" in names:
        rates = {(r[0], r[1]): r[4] for r in rows if r[4]}
        for label in ("sample typed", "sample typed-nf"):
            print(f"speedup {label}: {rates[('compiled', label)] / rates[('python', label)]:.0f}x")
        py_count = [r for r in rows if r[0] == "python" and r[1].startswith("count")][0]
        k = _backend.load_backend("compiled")
        el, _ = bench_count(k, 13, args.repeat)
        print(f"speedup count units=13: {py_count[3] / el:.0f}x")


if __name__ == "__main__":
    main()
