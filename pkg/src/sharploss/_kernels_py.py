"""Pure numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` one-for-one and are used whenever the compiled
extension is unavailable (or ``SHARPLOSS_PURE_PYTHON=1`` is set).
All inputs are C-contiguous float64 arrays; validation happens in the callers.
"""
import numpy as np


def reflect_index(n_pad_lo, n, n_pad_hi):
    """Mirror indices (edge sample not repeated) for positions -n_pad_lo .. n+n_pad_hi-1."""
    p = np.arange(-n_pad_lo, n + n_pad_hi)
    if n == 1:
        return np.zeros_like(p)
    period = 2 * (n - 1)
    p = np.mod(p, period)
    return np.where(p >= n, period - p, p)


def correlate_reflect(img, kernel):
    h, w = img.shape
    k = kernel.shape[0]
    r = k // 2
    padded = img[np.ix_(reflect_index(r, h, r), reflect_index(r, w, r))]
    out = np.zeros((h, w))
    # fixed (u, v) accumulation order, same as the compiled kernel
    for u in range(k):
        for v in range(k):
            out = out + kernel[u, v] * padded[u:u + h, v:v + w]
    return out


def correlate_reflect_adjoint(img, kernel):
    h, w = img.shape
    k = kernel.shape[0]
    r = k // 2
    full = np.zeros((h + 2 * r, w + 2 * r))
    for u in range(k):
        for v in range(k):
            full[u:u + h, v:v + w] += kernel[u, v] * img
    rows = np.zeros((h, w + 2 * r))
    np.add.at(rows, reflect_index(r, h, r), full)
    out = np.zeros((h, w))
    np.add.at(out.T, reflect_index(r, w, r), rows.T)
    return out


def patch_tensors(gx, gy, d):
    ny = gx.shape[0] // d
    nx = gx.shape[1] // d
    tx = gx[:ny * d, :nx * d].reshape(ny, d, nx, d)
    ty = gy[:ny * d, :nx * d].reshape(ny, d, nx, d)
    a = (tx * tx).sum(axis=(1, 3))
    b = (tx * ty).sum(axis=(1, 3))
    c = (ty * ty).sum(axis=(1, 3))
    return a, b, c


def patch_tensors_backward(gx, gy, ga, gb, gc, d):
    """Pull per-patch sensitivities (dQ/da, dQ/db, dQ/dc) back onto the gradient fields."""
    ny, nx = ga.shape
    dgx = np.zeros(gx.shape)
    dgy = np.zeros(gy.shape)
    ea = np.repeat(np.repeat(ga, d, axis=0), d, axis=1)
    eb = np.repeat(np.repeat(gb, d, axis=0), d, axis=1)
    ec = np.repeat(np.repeat(gc, d, axis=0), d, axis=1)
    sx = gx[:ny * d, :nx * d]
    sy = gy[:ny * d, :nx * d]
    dgx[:ny * d, :nx * d] = 2.0 * ea * sx + eb * sy
    dgy[:ny * d, :nx * d] = eb * sx + 2.0 * ec * sy
    return dgx, dgy
