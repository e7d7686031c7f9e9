"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--size 256] [--repeat 20]

Prints per-kernel timings for both backends plus one end-to-end Q + gradient
evaluation, and checks that the two backends agree.
"""
import argparse
import timeit

import numpy as np

from sharploss import _backend, _kernels_py, box_kernel, q_and_gradient, spatial_gradients
from sharploss._backend import compiled
from sharploss.image import convolve, convolve_adjoint


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--patch-size", type=int, default=8)
    args = ap.parse_args()

    if compiled is None:
        raise SystemExit("compiled kernels are not available; build with `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(0)
    img = rng.random((args.size, args.size))
    k5 = np.ascontiguousarray(box_kernel(5).weights)
    gx, gy = spatial_gradients(img)
    d = args.patch_size
    ny, nx = args.size // d, args.size // d
    ga, gb, gc = (rng.standard_normal((ny, nx)) for _ in range(3))

    cases = {
        "correlate_reflect (5x5)": lambda m: m.correlate_reflect(img, k5),
        "correlate_reflect_adjoint (5x5)": lambda m: m.correlate_reflect_adjoint(img, k5),
        "patch_tensors": lambda m: m.patch_tensors(gx, gy, d),
        "patch_tensors_backward": lambda m: m.patch_tensors_backward(gx, gy, ga, gb, gc, d),
    }

    print(f"image {args.size}x{args.size}, patch {d}, best of {args.repeat} runs")
    print(f"{'kernel':34s} {'numpy ms':>10s} {'cython ms':>10s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, fn in cases.items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        a, b = fn(_kernels_py), fn(compiled)
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        diff = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))
        print(f"{name:34s} {1e3 * t_py:10.3f} {1e3 * t_cy:10.3f} {t_py / t_cy:8.1f} {diff:11.2e}")

    # one deconv descent iteration's worth of work: blur, adjoint, Q and its gradient
    def iteration():
        y = convolve(img, k5)
        convolve_adjoint(y, k5)
        return q_and_gradient(img)[1]

    timings = {}
    fields = {}
    for name in ("numpy", "cython"):
        _backend.use(name)
        timings[name] = min(timeit.repeat(iteration, number=1, repeat=args.repeat))
        fields[name] = iteration()
    diff = float(np.max(np.abs(fields["numpy"] - fields["cython"])))
    print(f"{'descent iteration (end to end)':34s} {1e3 * timings['numpy']:10.3f} "
          f"{1e3 * timings['cython']:10.3f} {timings['numpy'] / timings['cython']:8.1f} {diff:11.2e}")


if __name__ == "__main__":
    main()
