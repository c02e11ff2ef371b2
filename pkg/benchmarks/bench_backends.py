"""Benchmark the numba-compiled kernels against the pure-numpy fallback.

The backend is fixed at import time by BILGAMMA_BACKEND, so this script
launches one worker subprocess per backend and prints the comparison.

Run: python benchmarks/bench_backends.py
"""

import json
import os
import subprocess
import sys
import time

import numpy as np

WORKLOADS = [
    ("adaptive_whittaker_quadrature", "400 scalar W evaluations, z in [0.01, 45]"),
    ("lnj_table_2048", "scaled-Whittaker table on 2048 grid arguments"),
    ("cubic_interp_1e5", "cubic interpolation of 1e5 points"),
    ("batch_logpdf_1e5", "batched log-density of 1e5 samples"),
    ("cdf_quadrature", "200 CDF evaluations"),
]


def run_workloads():
    import bilgamma as bg
    from bilgamma import _kernels as k
    from bilgamma.simfit import RngState, batch_log_pdf, sample

    p = bg.BgParams(1.55, 133.96, 0.94, 88.92)
    data = sample(p, 100_000, RngState(42))
    zs = np.geomspace(0.01, 45.0, 400)
    zgrid = np.geomspace(0.5, 2000.0, 2048)
    tab = k.lnj_grid_eval(0.94, 0.55, zgrid)
    uq = np.random.default_rng(0).uniform(np.log(0.6), np.log(1500.0), 100_000)

    def t_adaptive():
        for z in zs:
            bg.whittaker_w(0.305, 0.745, float(z), method="quadrature")

    def t_table():
        k.lnj_grid_eval(0.94, 0.55, zgrid)

    def t_interp():
        k.cubic_eval(float(np.log(zgrid[0])), float(np.log(zgrid[-1] / zgrid[0]) / 2047),
                     tab, uq)

    def t_batch():
        batch_log_pdf(p, data)

    def t_cdf():
        for x in np.linspace(-0.05, 0.05, 200):
            bg.cdf(p, float(x))

    fns = {
        "adaptive_whittaker_quadrature": t_adaptive,
        "lnj_table_2048": t_table,
        "cubic_interp_1e5": t_interp,
        "batch_logpdf_1e5": t_batch,
        "cdf_quadrature": t_cdf,
    }
    results = {}
    for name, _ in WORKLOADS:
        fn = fns[name]
        fn()  # warmup (and jit compile when applicable)
        reps = 5 if bg.USE_NUMBA else 2
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        results[name] = (time.perf_counter() - t0) / reps
    return {"backend": "numba" if bg.USE_NUMBA else "numpy", "times": results}


def main():
    if "--worker" in sys.argv:
        print(json.dumps(run_workloads()))
        return
    rows = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, BILGAMMA_BACKEND=backend)
        out = subprocess.run([sys.executable, os.path.abspath(__file__), "--worker"],
                             env=env, capture_output=True, text=True, check=True)
        rows[backend] = json.loads(out.stdout.strip().splitlines()[-1])["times"]
    width = max(len(n) for n, _ in WORKLOADS)
    print(f"{'workload':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, desc in WORKLOADS:
        tn = rows["numba"][name]
        tp = rows["numpy"][name]
        print(f"{name:<{width}}  {tn*1e3:9.2f}ms  {tp*1e3:9.2f}ms  {tp/tn:7.1f}x"
              f"   ({desc})")


if __name__ == "__main__":
    main()
