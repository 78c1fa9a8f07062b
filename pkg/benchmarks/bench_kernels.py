"""Compare the compiled kernels against the plain numpy fallbacks.

The package picks a backend at import time from VADKIT_BACKEND, so each
backend runs in a subprocess with the flag set. Timings are medians over
repeated calls on the same buffers.
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from vadkit import _kernels
from vadkit import AudioBuffer, FilterSpec, apply_cascade, design_butterworth_bandpass, resample

n = int(sys.argv[1])
repeats = int(sys.argv[2])
rng = np.random.default_rng(42)
samples = rng.standard_normal(n)
buf = AudioBuffer(samples, 44100)
cascade = design_butterworth_bandpass(FilterSpec(sample_rate_hz=44100))
_kernels.warm_up()

def median_ms(fn):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return sorted(times)[len(times) // 2]

out = {
    "backend": _kernels.BACKEND,
    "n_samples": n,
    "sos_ms": median_ms(lambda: apply_cascade(cascade, buf)),
    "resample_ms": median_ms(lambda: resample(buf, 16000)),
}
print(json.dumps(out))
"""


def run_backend(flag, n, repeats):
    env = dict(os.environ)
    if flag is None:
        env.pop("VADKIT_BACKEND", None)
    else:
        env["VADKIT_BACKEND"] = flag
    proc = subprocess.run(
        [sys.executable, "-c", _WORKER, str(n), str(repeats)],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=262144)
    parser.add_argument("--repeats", type=int, default=9)
    args = parser.parse_args()

    rows = [run_backend(None, args.samples, args.repeats),
            run_backend("numpy", args.samples, args.repeats)]
    width = max(len(r["backend"]) for r in rows)
    print(f"{args.samples} samples, median of {args.repeats} runs\n")
    print(f"{'backend':<{width}}  {'sos filter':>12}  {'resample':>12}")
    for r in rows:
        print(f"{r['backend']:<{width}}  {r['sos_ms']:>10.2f}ms  {r['resample_ms']:>10.2f}ms")
    if rows[0]["backend"] != rows[1]["backend"]:
        for key in ("sos_ms", "resample_ms"):
            ratio = rows[1][key] / rows[0][key]
            print(f"\n{key.removesuffix('_ms')}: {rows[0]['backend']} is {ratio:.1f}x faster")


if __name__ == "__main__":
    main()
