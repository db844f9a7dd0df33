"""Benchmark: compiled kernels vs the NumPy fallback.

Times every hot kernel on small/medium/large node arrays (the adaptive
quadrature mostly issues batches of 15-500 nodes) and a full Prawitz
right-hand-side evaluation through each backend.

Run with:  python benchmarks/bench_kernels.py
"""

import os
import sys
import time

import numpy as np

from beccert import _kernels_py

try:
    from beccert import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None

SIZES = (15, 240, 4096)
REPEAT = 200


def _time(fn, *args):
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(REPEAT):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / REPEAT)
    return best


def kernel_cases(size):
    t = np.linspace(1e-6, 12.0, size)
    u = np.linspace(1e-6, 2.48, size)
    return [
        ("b_vec", lambda k: k.b_vec(t, 0.7071)),
        ("fhat1_vec", lambda k: k.fhat1_vec(t, 0.5092)),
        ("fhat2_vec", lambda k: k.fhat2_vec(t, 0.3536, 8)),
        ("dhat1_vec", lambda k: k.dhat1_vec(t, 0.5092)),
        ("dhat2_vec", lambda k: k.dhat2_vec(t, 0.5092)),
        ("dhat3_integrand_vec", lambda k: k.dhat3_integrand_vec(t, 0.7071, 8)),
        ("dhat4_integrand_vec", lambda k: k.dhat4_integrand_vec(t, 0.54, 30)),
        ("kernel_weight_vec", lambda k: k.kernel_weight_vec(u, 5.9508)),
        ("residual_weight_vec", lambda k: k.residual_weight_vec(u, 5.9508)),
        ("i1_general_integrand_vec",
         lambda k: k.i1_general_integrand_vec(u, 5.9508, 0.5092)),
        ("i3_integrand_vec", lambda k: k.i3_integrand_vec(u, 5.9508)),
    ]


def bench_kernels():
    print(f"{'kernel':28s} {'n':>6s} {'numpy':>12s} {'cython':>12s} {'speedup':>8s}")
    for size in SIZES:
        for name, call in kernel_cases(size):
            t_py = _time(call, _kernels_py)
            if _kernels_cy is None:
                print(f"{name:28s} {size:6d} {t_py * 1e6:10.2f}us {'-':>12s}")
                continue
            t_cy = _time(call, _kernels_cy)
            print(f"{name:28s} {size:6d} {t_py * 1e6:10.2f}us "
                  f"{t_cy * 1e6:10.2f}us {t_py / t_cy:7.1f}x")


def bench_prawitz_backend(backend):
    """Full D* evaluations in a subprocess-free way is not possible since the
    backend binds at import, so this helper is invoked per backend via env."""
    import importlib

    os.environ["BECCERT_BACKEND"] = backend
    for mod in list(sys.modules):
        if mod.startswith("beccert"):
            del sys.modules[mod]
    bc = importlib.import_module("beccert")
    res = bc.prawitz_rhs(bc.General(0.5092), bc.PrawitzParams(2.4852, 5.9508))

    t0 = time.perf_counter()
    n = 0
    while time.perf_counter() - t0 < 1.0:
        bc.prawitz_rhs(bc.General(0.5092 + 1e-9 * n),
                       bc.PrawitzParams(2.4852, 5.9508))
        n += 1
    general_ms = (time.perf_counter() - t0) / n * 1e3

    mode = bc.IidFinite(0.3536, 8)
    bc.prawitz_rhs(mode, bc.PrawitzParams(2.6157, 8.9115))  # warm cache
    t0 = time.perf_counter()
    n = 0
    while time.perf_counter() - t0 < 1.0:
        bc.prawitz_rhs(mode, bc.PrawitzParams(2.6157 + 1e-6 * (n % 7), 8.9115))
        n += 1
    iid_ms = (time.perf_counter() - t0) / n * 1e3
    print(f"{backend:8s} dstar={res.dstar:.8f}  general {general_ms:7.3f} ms"
          f"  iid(warm cache) {iid_ms:7.3f} ms")


def main():
    print("== elementwise kernels ==")
    bench_kernels()
    print()
    print("== full Prawitz D* evaluation per backend ==")
    for backend in (["python"] + (["cython"] if _kernels_cy else [])):
        bench_prawitz_backend(backend)


if __name__ == "__main__":
    main()
