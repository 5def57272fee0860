"""Compare the numba and pure-numpy kernel backends.

The backend is chosen once at import time, so each one runs in its own
subprocess (``ISOFLOW_NO_NUMBA=1`` for numpy).  Timings are the median of
``--repeat`` runs after one warm-up call, which also pays numba's compile
cost.

    python3 benchmarks/bench_backends.py --n 256 --repeat 20
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from isoflow import _accel
from isoflow.curve import resample_arclength
from isoflow.curvegen import CurveSpec, FourierPerturbedCircle, generate
from isoflow.flow import FlowState, nominal_dt, step

n, repeat = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
raw = generate(CurveSpec(FourierPerturbedCircle(1.0, 11, 6, 0.5), n))
c = resample_arclength(raw)
coeffs = rng.normal(size=(2, n - 1)) + 1j * rng.normal(size=(2, n - 1))
u = np.sort(rng.uniform(0, 2 * np.pi, n))
x = np.cumsum(rng.uniform(0.1, 1.0, 4 * n))
y = np.cumsum(rng.uniform(0.0, 1.0, 4 * n))
xq = np.linspace(x[0], x[-1], 4 * n)
state = FlowState(c, 0.0, 0)
dt = nominal_dt(c, 0.2)

cases = {
    "trig_eval": lambda: _accel.trig_eval(coeffs, -(n // 2 - 1), u),
    "pchip": lambda: _accel.pchip_eval(x, y, xq),
    "resample": lambda: resample_arclength(raw),
    "flow_step": lambda: step(state, "jiang-pan", dt),
}
out = {"backend": _accel.BACKEND}
for name, fn in cases.items():
    fn()
    times = timeit.repeat(fn, number=1, repeat=repeat)
    out[name] = float(np.median(times))
print(json.dumps(out))
"""


def run_backend(disable_numba, n, repeat):
    env = dict(os.environ, ISOFLOW_NO_NUMBA="1" if disable_numba else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=256, help="samples per curve")
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args(argv)

    fast = run_backend(False, args.n, args.repeat)
    slow = run_backend(True, args.n, args.repeat)
    if fast["backend"] != "numba":
        print("numba is not importable; both columns use numpy")
    print(f"N = {args.n}, median of {args.repeat} runs")
    print(f"{'kernel':<12}{'numba [ms]':>12}{'numpy [ms]':>12}{'speed-up':>10}")
    for name in ("trig_eval", "pchip", "resample", "flow_step"):
        a, b = fast[name] * 1e3, slow[name] * 1e3
        print(f"{name:<12}{a:>12.3f}{b:>12.3f}{b / a:>10.2f}")


if __name__ == "__main__":
    main()
