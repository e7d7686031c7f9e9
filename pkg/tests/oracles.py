"""Independent straight-line reference implementations used by the tests."""
import math

import numpy as np

PSNR_CAP = 99.0


def oracle_q(img, d=8, tau=0.5):
    """Straight-line Q: explicit gradient matrix per patch and a full SVD."""
    h, w = img.shape
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            gx[y, x] = (img[y, min(x + 1, w - 1)] - img[y, max(x - 1, 0)]) / 2
            gy[y, x] = (img[min(y + 1, h - 1), x] - img[max(y - 1, 0), x]) / 2
    scores = []
    for y0 in range(0, h - d + 1, d):
        for x0 in range(0, w - d + 1, d):
            rows = [(gx[y, x], gy[y, x]) for y in range(y0, y0 + d) for x in range(x0, x0 + d)]
            s1, s2 = np.linalg.svd(np.array(rows), compute_uv=False)
            r = (s1 - s2) / (s1 + s2) if s1 + s2 > 0 else 0.0
            scores.append(s1 * r if r > tau else 0.0)
    return sum(scores) / len(scores), scores


def oriented_patch(rng, d=8):
    """Random texture plus a random-direction ramp, so coherence spans [0, 1]."""
    theta = rng.uniform(0, np.pi)
    yy, xx = np.mgrid[0:d, 0:d]
    ramp = np.cos(theta) * xx + np.sin(theta) * yy
    return rng.uniform(0, 0.5) * ramp + rng.uniform(0, 1) * rng.random((d, d))


def loop_psnr(a, b):
    sq = 0.0
    for x, y in zip(a.ravel().tolist(), b.ravel().tolist()):
        sq += (x - y) ** 2
    mse = sq / a.size
    return PSNR_CAP if mse < 1e-12 else min(10 * math.log10(1 / mse), PSNR_CAP)


def loop_ssim(a, b, size=11, sigma=1.5):
    """Window-by-window SSIM with an explicit 2-D Gaussian weight table."""
    r = size // 2
    w = [[math.exp(-((i - r) ** 2 + (j - r) ** 2) / (2 * sigma**2)) for j in range(size)] for i in range(size)]
    tot = sum(map(sum, w))
    w = [[v / tot for v in row] for row in w]
    c1, c2 = 0.01**2, 0.03**2
    h, wd = a.shape
    vals = []
    for y0 in range(h - size + 1):
        for x0 in range(wd - size + 1):
            ma = mb = 0.0
            for i in range(size):
                for j in range(size):
                    ma += w[i][j] * a[y0 + i, x0 + j]
                    mb += w[i][j] * b[y0 + i, x0 + j]
            va = vb = cov = 0.0
            for i in range(size):
                for j in range(size):
                    da = a[y0 + i, x0 + j] - ma
                    db = b[y0 + i, x0 + j] - mb
                    va += w[i][j] * da * da
                    vb += w[i][j] * db * db
                    cov += w[i][j] * da * db
            vals.append((2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2)))
    return sum(vals) / len(vals)
