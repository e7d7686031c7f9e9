import numpy as np
import pytest

from sharploss import convolve, gaussian_kernel
from sharploss.image import rgb_to_luma

# everyday photographs shipped with scikit-image (no download needed)
NATURAL_NAMES = ("camera", "astronaut", "coffee", "chelsea", "rocket")


def natural_image(name, size=256):
    """Luma crop of a scikit-image sample photo: 2x2 box-downsampled when large, then center-cropped."""
    data = pytest.importorskip("skimage.data")
    a = getattr(data, name)()
    if a.ndim == 3:
        a = rgb_to_luma(a[..., :3])
    else:
        a = a / 255.0
    h, w = a.shape
    if min(h, w) >= 2 * size:
        a = a[: h // 2 * 2, : w // 2 * 2]
        a = 0.25 * (a[0::2, 0::2] + a[1::2, 0::2] + a[0::2, 1::2] + a[1::2, 1::2])
    h, w = a.shape
    y0, x0 = (h - size) // 2, (w - size) // 2
    return np.ascontiguousarray(a[y0:y0 + size, x0:x0 + size], dtype=np.float64)


def smooth_field(seed, shape=(32, 32), scale=1.0):
    """Gaussian white noise smoothed by a 3x3 Gaussian (sigma 1)."""
    rng = np.random.default_rng(seed)
    return scale * convolve(rng.standard_normal(shape), gaussian_kernel(3, 1.0))


def dyadic_image(seed, shape=(32, 32), bits=10):
    """Random image on a 2^-bits grid, so adding dyadic offsets is exact in float64."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2**bits, size=shape) / 2.0**bits


@pytest.fixture(scope="session")
def natural_images():
    return {name: natural_image(name) for name in NATURAL_NAMES}


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
