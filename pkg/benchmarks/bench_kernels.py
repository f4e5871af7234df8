#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the transport-system assembly, gradient evaluation, stencil
matvec and the reduced-order rollout on realistic problem sizes, plus
one full solver step through each backend. Run:

    python benchmarks/bench_kernels.py [--cells 40000] [--repeat 5]

The package itself selects its backend at import time from the
COOKTWIN_NUMBA environment variable; here both implementations are
imported side by side.
"""

import argparse
import time

import numpy as np

from cooktwin.kernels import numba_impl, numpy_impl
from cooktwin.constitutive import MaterialModel
from cooktwin.fvm import BoundarySpec, SolverSettings, initialize, step
from cooktwin.mesh import MeshSpec, build_quarter_cuboid


def timeit(fn, repeat):
    fn()                     # warm-up (and JIT compile for numba)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_problem(nx, ny, nz, rng):
    d = {
        "phi": rng.uniform(0.3, 0.9, (nx, ny, nz)),
        "inertia": rng.uniform(0.5, 2.0, (nx, ny, nz)),
        "conv": rng.uniform(0.5, 2.0, (nx, ny, nz)),
        "gammas": [rng.uniform(0.1, 1.0, (nx, ny, nz)) for _ in range(3)],
        "dx": rng.uniform(5e-4, 1e-3, nx),
        "dy": rng.uniform(5e-4, 1e-3, ny),
        "dz": rng.uniform(5e-4, 1e-3, nz),
    }
    d["phi_old"] = d["phi"] + rng.normal(0, 0.01, (nx, ny, nz))
    Fx = np.zeros((nx + 1, ny, nz))
    Fx[1:-1] = rng.normal(0, 1e-6, (nx - 1, ny, nz))
    Fy = np.zeros((nx, ny + 1, nz))
    Fy[:, 1:-1] = rng.normal(0, 1e-6, (nx, ny - 1, nz))
    Fz = np.zeros((nx, ny, nz + 1))
    Fz[:, :, 1:-1] = rng.normal(0, 1e-6, (nx, ny, nz - 1))
    d["F"] = (Fx, Fy, Fz)
    planes = []
    for shape in ((ny, nz),) * 2 + ((nx, nz),) * 2 + ((nx, ny),) * 2:
        planes.append(rng.uniform(0.0, 2.0, shape))
        planes.append(rng.uniform(280.0, 450.0, shape))
    d["robin"] = planes
    d["faceb"] = [rng.uniform(0.3, 0.9, s) for s in
                  ((ny, nz),) * 2 + ((nx, nz),) * 2 + ((nx, ny),) * 2]
    return d


def bench_kernels(cells, repeat):
    n = max(4, round(cells ** (1 / 3)))
    nx, ny, nz = n + 4, n, n - 2
    rng = np.random.default_rng(0)
    d = make_problem(nx, ny, nz, rng)
    grads = numpy_impl.cell_gradient(d["phi"], d["dx"], d["dy"], d["dz"],
                                     *d["faceb"])
    asm_args = (d["phi"], d["phi_old"], d["inertia"], d["conv"], True,
                *d["gammas"], *d["F"], *grads, True, *d["robin"],
                d["dx"], d["dy"], d["dz"], 0.5)
    sys_np = numpy_impl.assemble_system(*asm_args)
    x = rng.normal(size=d["phi"].shape)

    rows = []
    for name, np_fn, nb_fn in (
            ("cell_gradient",
             lambda: numpy_impl.cell_gradient(d["phi"], d["dx"], d["dy"],
                                              d["dz"], *d["faceb"]),
             lambda: numba_impl.cell_gradient(d["phi"], d["dx"], d["dy"],
                                              d["dz"], *d["faceb"])),
            ("assemble_system",
             lambda: numpy_impl.assemble_system(*asm_args),
             lambda: numba_impl.assemble_system(*asm_args)),
            ("stencil_matvec",
             lambda: numpy_impl.stencil_matvec(*sys_np[:7], x),
             lambda: numba_impl.stencil_matvec(*sys_np[:7], x))):
        t_np = timeit(np_fn, repeat)
        t_nb = timeit(nb_fn, repeat)
        rows.append((name, f"{nx}x{ny}x{nz}", t_np, t_nb))
    return rows


def bench_rollout(steps, repeat):
    rng = np.random.default_rng(1)
    na, nb_lags = 4, np.array([4], dtype=np.int64)
    B = na + 4
    pairs = [(i, j) for i in range(B) for j in range(i, B)]
    pi = np.array([p[0] for p in pairs], dtype=np.int64)
    pj = np.array([p[1] for p in pairs], dtype=np.int64)
    n_feat = 1 + B + len(pairs)
    coef = rng.normal(0, 0.02, n_feat)
    lo = np.full(n_feat, -3.0)
    hi = np.full(n_feat, 3.0)
    u = rng.normal(0, 1.0, (1, steps))
    rows = []
    t_np = timeit(lambda: numpy_impl.narx_rollout(
        0.0, u, na, nb_lags, True, coef, lo, hi, pi, pj), repeat)
    t_nb = timeit(lambda: numba_impl.narx_rollout(
        0.0, u, na, nb_lags, True, coef, lo, hi, pi, pj), repeat)
    rows.append((f"narx_rollout ({steps:,} steps)", "-", t_np, t_nb))
    return rows


def bench_full_step(repeat):
    mesh = build_quarter_cuboid(MeshSpec(cuboid_dims=(0.04, 0.03, 0.02),
                                         spacing=1.5e-3, inflation_layers=4,
                                         first_layer_height=4e-4))
    rows = []
    for label, impl in (("numpy", numpy_impl), ("numba", numba_impl)):
        import cooktwin.kernels as K
        saved = {k: getattr(K, k) for k in
                 ("cell_gradient", "face_normal_velocity", "assemble_system",
                  "stencil_matvec", "scaled_residual_parts")}
        for k in saved:
            setattr(K, k, getattr(impl, k))
        try:
            def run():
                st = initialize(mesh, MaterialModel())
                bnd = BoundarySpec()
                for _ in range(5):
                    step(st, bnd.resolve(st.time + 1.0), SolverSettings())
            rows.append((f"solver 5 steps [{label}]",
                         f"{mesh.n_cells} cells", timeit(run, repeat)))
        finally:
            for k, v in saved.items():
                setattr(K, k, v)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cells", type=int, default=40_000)
    ap.add_argument("--rollout-steps", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"{'kernel':<34}{'size':>16}{'numpy':>12}{'numba':>12}{'speedup':>9}")
    for name, size, t_np, t_nb in (bench_kernels(args.cells, args.repeat)
                                   + bench_rollout(args.rollout_steps,
                                                   args.repeat)):
        print(f"{name:<34}{size:>16}{t_np * 1e3:>10.2f}ms"
              f"{t_nb * 1e3:>10.2f}ms{t_np / t_nb:>8.1f}x")
    pair = bench_full_step(args.repeat)
    for (name_a, size, t_a), (name_b, _, t_b) in [(pair[0], pair[1])]:
        print(f"{name_a:<34}{size:>16}{t_a * 1e3:>10.2f}ms")
        print(f"{name_b:<34}{size:>16}{'':>12}{t_b * 1e3:>10.2f}ms"
              f"{t_a / t_b:>8.1f}x")


if __name__ == "__main__":
    main()
