"""Benchmark the compiled kernels against the numpy fallback.

Run as: python3 benchmarks/bench_kernels.py [--qmax 31]
"""

import argparse
import time

import numpy as np

from momentkit import CharSumInstance, MultChar, canonical_psi, quad_ext
from momentkit import _kernels_py
from momentkit.field import odd_prime_powers

try:
    from momentkit import _kernels
except ImportError:
    _kernels = None


def conv_args(ctx):
    c1, c2 = MultChar(ctx, 1), MultChar(ctx, 2)
    return (c1.values(), c2.values(), canonical_psi(ctx).values(),
            ctx.log_table, ctx.exp_table, ctx._digits, ctx._pow_p, ctx.p)


def s_args(qctx):
    base, ext = qctx.base, qctx.ext
    inst = CharSumInstance(qctx, MultChar(base, 1),
                           MultChar(base, base.q - 2), MultChar(ext, 3))
    return (inst.rho.values(), inst.chi.values(), inst.eta.values(),
            qctx.embed_table, qctx.omega,
            ext.log_table, ext.exp_table, ext._digits, ext._pow_p, ext.p,
            base.log_table, base.exp_table, base._digits, base._pow_p,
            qctx.eps)


def timeit(fn, args, reps):
    best = float("inf")
    val = None
    for _ in range(reps):
        t0 = time.perf_counter()
        val = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, val


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--qmax", type=int, default=31)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    print(f"{'kernel':14s} {'q':>4s} {'python':>10s} {'compiled':>10s} "
          f"{'speedup':>8s}")
    for p, f in odd_prime_powers(3, args.qmax):
        qctx = quad_ext(p, f)
        for name, fn_py, fargs in (
                ("conv_psi", _kernels_py.conv_psi_table, conv_args(qctx.ext)),
                ("s_direct", _kernels_py.s_direct, s_args(qctx))):
            t_py, v_py = timeit(fn_py, fargs, args.reps)
            if _kernels is None:
                print(f"{name:14s} {p**f:4d} {t_py*1e3:9.2f}ms "
                      f"{'n/a':>10s} {'':>8s}")
                continue
            fn_c = getattr(_kernels, name.replace("psi", "psi_table"))
            t_c, v_c = timeit(fn_c, fargs, args.reps)
            err = np.max(np.abs(np.asarray(v_py) - np.asarray(v_c)))
            assert err < 1e-9 * (1 + np.max(np.abs(np.asarray(v_py)))), err
            print(f"{name:14s} {p**f:4d} {t_py*1e3:9.2f}ms {t_c*1e3:9.2f}ms "
                  f"{t_py/t_c:7.1f}x")


if __name__ == "__main__":
    main()
