"""Full-reference quality metrics on luma images with peak value 1.0."""
import numpy as np

from .errors import DimensionError
from .image import as_image

PSNR_CAP = 99.0

SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pair(a, b):
    a = as_image(a)
    b = as_image(b)
    if a.shape != b.shape:
        raise DimensionError(f"images differ in shape: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b) -> float:
    """10 log10(1 / MSE), capped at 99 dB (identical images give the cap)."""
    a, b = _pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse < 1e-12:
        return PSNR_CAP
    return min(float(10.0 * np.log10(1.0 / mse)), PSNR_CAP)


def gaussian_window_1d(size: int = SSIM_WIN, sigma: float = SSIM_SIGMA) -> np.ndarray:
    off = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(off**2) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(x, w):
    # separable 'valid' filtering: rows, then columns
    n = w.size
    h, wd = x.shape
    tmp = np.zeros((h, wd - n + 1))
    for k in range(n):
        tmp += w[k] * x[:, k:k + wd - n + 1]
    out = np.zeros((h - n + 1, wd - n + 1))
    for k in range(n):
        out += w[k] * tmp[k:k + h - n + 1, :]
    return out


def ssim_map(a, b) -> np.ndarray:
    """Per-window SSIM over all valid 11x11 Gaussian-window positions."""
    a, b = _pair(a, b)
    if min(a.shape) < SSIM_WIN:
        raise DimensionError(f"SSIM needs images of at least {SSIM_WIN}x{SSIM_WIN}, got {a.shape}")
    w = gaussian_window_1d()
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2
    mu_a = _filter_valid(a, w)
    mu_b = _filter_valid(b, w)
    var_a = _filter_valid(a * a, w) - mu_a * mu_a
    var_b = _filter_valid(b * b, w) - mu_b * mu_b
    cov = _filter_valid(a * b, w) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b) -> float:
    """Single-scale SSIM (11x11 Gaussian window, sigma 1.5, K1 0.01, K2 0.03, range 1)."""
    return float(np.mean(ssim_map(a, b)))
