"""Luma images: raster I/O, spatial gradients, patch tiling and convolution.

An image is a 2-D float64 numpy array with nominal range [0, 1]. Values may
leave that range during optimisation; they are clamped only on export.
"""
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import _backend
from .errors import DimensionError, ImageFormatError

# BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class GradientPair(NamedTuple):
    gx: np.ndarray
    gy: np.ndarray


def as_image(img) -> np.ndarray:
    """Validate and return ``img`` as a C-contiguous 2-D float64 array."""
    arr = np.ascontiguousarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite samples")
    return arr


def rgb_to_luma(rgb: np.ndarray) -> np.ndarray:
    """Convert an (H, W, 3) array of 8-bit codes to luma in [0, 1]."""
    rgb = np.asarray(rgb, dtype=np.float64) / 255.0
    wr, wg, wb = LUMA_WEIGHTS
    return wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]


def load_image(path) -> np.ndarray:
    """Read an 8-bit grayscale or RGB PNG / binary PGM file as a luma image.

    RGB files are converted with the BT.601 weights; codes are divided by 255.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            data = np.asarray(im)
    except FileNotFoundError:
        raise
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: unsupported raster format") from exc
    except OSError as exc:
        raise OSError(f"{path}: cannot read image ({exc})") from exc

    if mode == "L":
        return np.ascontiguousarray(data, dtype=np.float64) / 255.0
    if mode == "RGB":
        return np.ascontiguousarray(rgb_to_luma(data))
    raise ImageFormatError(f"{path}: unsupported pixel mode {mode!r} (need 8-bit gray or RGB)")


def to_codes(img) -> np.ndarray:
    """Clamp to [0, 1] and quantize to 8-bit codes, rounding halves up."""
    arr = np.clip(as_image(img), 0.0, 1.0)
    return np.floor(arr * 255.0 + 0.5).astype(np.uint8)


def save_image(img, path) -> None:
    """Write ``img`` as an 8-bit grayscale file; format follows the suffix (.png / .pgm)."""
    path = Path(path)
    codes = to_codes(img)
    suffix = path.suffix.lower()
    fmt = {".png": "PNG", ".pgm": "PPM"}.get(suffix)
    if fmt is None:
        raise ImageFormatError(f"{path}: unsupported output suffix {suffix!r} (use .png or .pgm)")
    try:
        Image.fromarray(codes, mode="L").save(path, format=fmt)
    except OSError as exc:
        raise OSError(f"{path}: cannot write image ({exc})") from exc


def spatial_gradients(img) -> GradientPair:
    """Central differences with replicate-padded borders.

    gx(x, y) = (I(x+1, y) - I(x-1, y)) / 2, with out-of-range neighbours replaced
    by the border sample, so the border value is half the one-sided difference.
    """
    img = as_image(img)
    h, w = img.shape
    if h < 2 or w < 2:
        raise DimensionError(f"spatial gradients need at least 2x2 pixels, got {w}x{h}")
    gx = np.empty_like(img)
    gx[:, 1:-1] = (img[:, 2:] - img[:, :-2]) * 0.5
    gx[:, 0] = (img[:, 1] - img[:, 0]) * 0.5
    gx[:, -1] = (img[:, -1] - img[:, -2]) * 0.5
    gy = np.empty_like(img)
    gy[1:-1, :] = (img[2:, :] - img[:-2, :]) * 0.5
    gy[0, :] = (img[1, :] - img[0, :]) * 0.5
    gy[-1, :] = (img[-1, :] - img[-2, :]) * 0.5
    return GradientPair(gx, gy)


def _diff_adjoint(g: np.ndarray, axis: int) -> np.ndarray:
    # transpose of the 1-D replicate-padded central difference along `axis`
    g = np.moveaxis(g, axis, 0)
    half = 0.5 * g
    out = np.zeros_like(g)
    out[2:] += half[1:-1]
    out[:-2] -= half[1:-1]
    out[1] += half[0]
    out[0] -= half[0]
    out[-1] += half[-1]
    out[-2] -= half[-1]
    return np.moveaxis(out, 0, axis)


def spatial_gradients_adjoint(dgx, dgy) -> np.ndarray:
    """Apply the transpose of :func:`spatial_gradients` to a pair of gradient-field cotangents."""
    dgx = np.asarray(dgx, dtype=np.float64)
    dgy = np.asarray(dgy, dtype=np.float64)
    if dgx.shape != dgy.shape:
        raise DimensionError(f"gradient fields differ in shape: {dgx.shape} vs {dgy.shape}")
    return np.ascontiguousarray(_diff_adjoint(dgx, 1) + _diff_adjoint(dgy, 0))


def patch_grid(shape, d: int) -> tuple[int, int]:
    """Number of full d x d tiles as (rows, cols); partial edge tiles are dropped."""
    if d < 2:
        raise ValueError(f"patch size must be >= 2, got {d}")
    h, w = shape
    return h // d, w // d


def extract_patches(img, d: int) -> list[tuple[int, int]]:
    """Origins (x, y) of the non-overlapping d x d tiles, in row-major order."""
    ny, nx = patch_grid(np.shape(img), d)
    return [(q * d, p * d) for p in range(ny) for q in range(nx)]


def convolve(img, kernel) -> np.ndarray:
    """2-D correlation with mirror (edge not repeated) boundaries; output has the input's size.

    ``kernel`` is a :class:`~sharploss.degradation.BlurKernel` or a square odd-sized array.
    """
    img = as_image(img)
    weights = _kernel_weights(kernel)
    if weights.shape == (1, 1):
        return img * weights[0, 0]
    return _backend.correlate_reflect(img, weights)


def convolve_adjoint(img, kernel) -> np.ndarray:
    """Exact transpose of :func:`convolve` (boundary folding included)."""
    img = as_image(img)
    weights = _kernel_weights(kernel)
    if weights.shape == (1, 1):
        return img * weights[0, 0]
    return _backend.correlate_reflect_adjoint(img, weights)


def _kernel_weights(kernel) -> np.ndarray:
    weights = getattr(kernel, "weights", kernel)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1] or weights.shape[0] % 2 == 0:
        raise DimensionError(f"kernel must be square with odd side, got shape {weights.shape}")
    return weights
