"""Compiled kernel vs numpy fallback on typical workloads.

    python3 benchmarks/bench_kernel.py [--points N] [--repeat R]
"""
import argparse
import time

import numpy as np

from bendkit import _fallback, parse, derive
from bendkit.program import Program, available_backends


def _workloads():
    torus = [parse("(2 + cos(v))*cos(u)"), parse("(2 + cos(v))*sin(u)"), parse("sin(v)")]
    jet = torus + [derive(e, w) for e in torus for w in "uv"]
    jet += [derive(derive(e, a), b) for e in torus for a, b in ("uu", "uv", "vv")]
    bend = [parse("-u^2*v - v^3/3"), parse("-u*v^2 - u^3/3"), parse("u*v")]
    heavy = [parse("sqrt(2 + sin(u*v)) * exp(cos(u)/3) / (1 + u^2 + v^2) - log(3 + sinh(v/4))")]
    heavy += [derive(heavy[0], "u"), derive(derive(heavy[0], "u"), "v")]
    return {"torus 2-jet": jet, "Monge bending": bend, "nested scalar + derivatives": heavy}


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = available_backends()
    if not backends.get("compiled"):
        print("compiled kernel not built; only the fallback is available")
    rng = np.random.default_rng(0)
    u, v = rng.uniform(-1, 1, (2, args.points))
    print(f"{'workload':30} {'instr':>6} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for name, exprs in _workloads().items():
        prog = Program(exprs)
        slow = _time(lambda: prog.run(u, v, execute=_fallback.execute), args.repeat)
        if backends.get("compiled"):
            fast = _time(lambda: prog.run(u, v), args.repeat)
            np.testing.assert_allclose(prog.run(u, v), prog.run(u, v, execute=_fallback.execute),
                                       rtol=1e-13, atol=1e-13)
            print(f"{name:30} {len(prog.ops):6d} {slow * 1e3:10.2f} {fast * 1e3:12.2f} {slow / fast:8.2f}")
        else:
            print(f"{name:30} {len(prog.ops):6d} {slow * 1e3:10.2f} {'-':>12} {'-':>8}")
    # small batches: the regime of adaptive quadrature panels
    prog = Program(_workloads()["torus 2-jet"])
    us, vs = u[:15 * 15], v[:15 * 15]
    n = 2000
    slow = _time(lambda: [prog.run(us, vs, execute=_fallback.execute) for _ in range(n)], 1)
    if backends.get("compiled"):
        fast = _time(lambda: [prog.run(us, vs) for _ in range(n)], 1)
        print(f"{'torus 2-jet, 225-pt panels':30} {len(prog.ops):6d} {slow * 1e3:10.2f} "
              f"{fast * 1e3:12.2f} {slow / fast:8.2f}")


if __name__ == "__main__":
    main()
