"""Analytic pixel gradient of Q and a finite-difference oracle to check it.

The backward pass runs the chain rule through coherence, the square roots,
the closed-form eigenvalues and the structure-tensor sums, then applies the
transpose of the central-difference stencil. Non-smooth points get zero
contribution:

* isotropic patches (Q is locally constant there);
* patches with s1 - s2 < eps (repeated singular values);
* the s2 branch when s2 < eps, where ds2/dlambda2 = 1 / (2 s2) diverges.
"""
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .image import as_image, save_image, spatial_gradients, spatial_gradients_adjoint
from .qmetric import PatchStats, QConfig, image_patch_stats, patch_stats


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_err: float
    mean_rel_err: float
    n_sites_checked: int
    n_sites_skipped_degenerate: int
    h: float

    @property
    def checked_fraction(self) -> float:
        total = self.n_sites_checked + self.n_sites_skipped_degenerate
        return self.n_sites_checked / total if total else 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _patch_sensitivities(st: PatchStats, cfg: QConfig):
    """dQ/da, dQ/db, dQ/dc for every patch (Q already divided by the patch count)."""
    eps = cfg.eps
    s1, s2, R = st.s1, st.s2, st.R
    total = s1 + s2
    active = st.anisotropic & (total >= eps) & (s1 - s2 >= eps)
    ga = np.zeros_like(s1)
    gb = np.zeros_like(s1)
    gc = np.zeros_like(s1)
    if not np.any(active):
        return ga, gb, gc

    a, b, c = st.a[active], st.b[active], st.c[active]
    s1, s2, R, total = s1[active], s2[active], R[active], total[active]
    disc = np.sqrt((0.5 * (a - c)) ** 2 + b * b)
    w = 1.0 / st.n_patches

    dq_ds1 = R + s1 * (2.0 * s2 / total**2)
    dq_ds2 = -2.0 * s1 * s1 / total**2
    g1 = w * dq_ds1 / (2.0 * s1)
    s2_ok = s2 >= eps
    g2 = np.where(s2_ok, w * dq_ds2 / (2.0 * np.where(s2_ok, s2, 1.0)), 0.0)

    t = (a - c) / (4.0 * disc)
    u = b / disc
    # dlambda1/d(a,b,c) = (1/2 + t, u, 1/2 - t); dlambda2/d(a,b,c) = (1/2 - t, -u, 1/2 + t)
    ga[active] = g1 * (0.5 + t) + g2 * (0.5 - t)
    gb[active] = (g1 - g2) * u
    gc[active] = g1 * (0.5 - t) + g2 * (0.5 + t)
    return ga, gb, gc


def q_and_gradient(img, cfg: QConfig = QConfig()) -> tuple[float, np.ndarray]:
    """Q and dQ/dI from a single forward pass."""
    img = as_image(img)
    gx, gy = spatial_gradients(img)
    st = patch_stats(gx, gy, cfg)
    ga, gb, gc = _patch_sensitivities(st, cfg)
    dgx, dgy = _backend.patch_tensors_backward(gx, gy, ga, gb, gc, cfg.patch_size)
    return st.q, spatial_gradients_adjoint(dgx, dgy)


def q_gradient(img, cfg: QConfig = QConfig()) -> np.ndarray:
    """Return dQ/dI, an array with the shape of ``img``."""
    return q_and_gradient(img, cfg)[1]


def _fd_scan(img, cfg, h, track_flips=False):
    img = as_image(img)
    base = image_patch_stats(img, cfg).anisotropic if track_flips else None
    field = np.zeros_like(img)
    flipped = np.zeros(img.shape, dtype=bool)
    x = img.copy()
    for i in range(img.shape[0]):
        for j in range(img.shape[1]):
            v = img[i, j]
            x[i, j] = v + h
            plus = image_patch_stats(x, cfg)
            x[i, j] = v - h
            minus = image_patch_stats(x, cfg)
            x[i, j] = v
            field[i, j] = (plus.q - minus.q) / (2.0 * h)
            if track_flips:
                flipped[i, j] = np.any(plus.anisotropic != base) or np.any(minus.anisotropic != base)
    return field, flipped


def fd_gradient(img, cfg: QConfig = QConfig(), h: float = 1e-5) -> np.ndarray:
    """Per-pixel central difference (Q(I + h e) - Q(I - h e)) / 2h.

    Costs two full Q evaluations per pixel; meant for verification only.
    """
    if not h > 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    return _fd_scan(img, cfg, h)[0]


def _site_patch_mask(shape, d, bad_patches):
    """Pixels whose gradient stencil reaches into any flagged patch."""
    h, w = shape
    ny, nx = bad_patches.shape
    # flagged gradient positions; pixels outside the tiled area are never flagged
    flag = np.zeros(shape, dtype=bool)
    flag[: ny * d, : nx * d] = np.repeat(np.repeat(bad_patches, d, axis=0), d, axis=1)
    # pixel (i, j) feeds gx at (i, j-1..j+1) and gy at (i-1..i+1, j), clipped to the image
    touched = flag.copy()
    touched[:, 1:] |= flag[:, :-1]
    touched[:, :-1] |= flag[:, 1:]
    touched[1:, :] |= flag[:-1, :]
    touched[:-1, :] |= flag[1:, :]
    return touched


def check_gradient(img, cfg: QConfig = QConfig(), h: float = 1e-5) -> GradCheckReport:
    """Compare :func:`q_gradient` with :func:`fd_gradient` site by site.

    A pixel is skipped when its stencil touches a degenerate patch
    (s1 + s2 < eps, s1 - s2 < eps or s2 < eps), a patch whose coherence is within
    10 h of ``tau``, or a patch whose anisotropy flag flips under the +-h probe.
    The per-site error is |a - f| / max(|a|, |f|, 1e-4 * max|a|), so sites with a
    vanishing gradient are judged against the field's scale.
    """
    if not h > 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    img = as_image(img)
    st = image_patch_stats(img, cfg)
    eps = cfg.eps
    bad = (
        (st.s1 + st.s2 < eps)
        | (st.s1 - st.s2 < eps)
        | (st.s2 < eps)
        | (np.abs(st.R - cfg.tau) <= 10.0 * h)
    )
    skip = _site_patch_mask(img.shape, cfg.patch_size, bad)

    analytic = q_gradient(img, cfg)
    numeric, flipped = _fd_scan(img, cfg, h, track_flips=True)
    skip |= flipped

    keep = ~skip
    n_checked = int(np.count_nonzero(keep))
    if n_checked == 0:
        return GradCheckReport(0.0, 0.0, 0, int(skip.size), h)

    a = analytic[keep]
    f = numeric[keep]
    scale = max(np.max(np.abs(a)), np.max(np.abs(f)))
    floor = 1e-4 * scale if scale > 0 else 1.0
    rel = np.abs(a - f) / np.maximum(np.maximum(np.abs(a), np.abs(f)), floor)
    return GradCheckReport(
        max_rel_err=float(np.max(rel)),
        mean_rel_err=float(np.mean(rel)),
        n_sites_checked=n_checked,
        n_sites_skipped_degenerate=int(np.count_nonzero(skip)),
        h=h,
    )


def save_gradient_image(field, path) -> None:
    """Write a gradient field as an 8-bit image after mapping min to 0 and max to 255."""
    field = as_image(field)
    lo, hi = float(field.min()), float(field.max())
    scaled = (field - lo) / (hi - lo) if hi > lo else np.zeros_like(field)
    save_image(scaled, path)


def save_gradient_csv(field, path) -> None:
    """Raw dump: one CSV row per image row, values in full precision."""
    field = as_image(field)
    with open(Path(path), "w", newline="") as fh:
        for row in field:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
