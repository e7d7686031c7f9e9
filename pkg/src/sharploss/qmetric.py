"""No-reference sharpness metric Q.

The image is tiled into non-overlapping d x d patches. For each patch the
2x2 structure tensor of the pixel gradients is eigen-decomposed in closed form,
giving singular values s1 >= s2 of the stacked gradient matrix. Patches whose
coherence R = (s1 - s2) / (s1 + s2) exceeds ``tau`` score s1 * R; all others
score zero. Q is the mean score over every patch.
"""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend
from .errors import ConfigError, DimensionError, EmptyDomainError
from .image import as_image, patch_grid, spatial_gradients


@dataclass(frozen=True)
class QConfig:
    patch_size: int = 8
    tau: float = 0.5
    eps: float = 1e-12

    def __post_init__(self):
        if int(self.patch_size) != self.patch_size or self.patch_size < 2:
            raise ConfigError(f"patch_size must be an integer >= 2, got {self.patch_size}")
        if not 0.0 <= self.tau < 1.0:
            raise ConfigError(f"tau must lie in [0, 1), got {self.tau}")
        if not self.eps > 0.0:
            raise ConfigError(f"eps must be positive, got {self.eps}")


@dataclass(frozen=True)
class PatchAnalysis:
    origin: tuple[int, int]
    s1: float
    s2: float
    R: float
    anisotropic: bool
    Qi: float


@dataclass(frozen=True)
class PatchStats:
    """Vectorised per-patch quantities on the (rows, cols) tile grid."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    R: np.ndarray
    anisotropic: np.ndarray
    qi: np.ndarray

    @property
    def n_patches(self) -> int:
        return self.qi.size

    @property
    def q(self) -> float:
        # row-major sequential reduction keeps Q bit-reproducible
        return math.fsum(self.qi.ravel().tolist()) / self.n_patches


@dataclass(frozen=True)
class QReport:
    config: QConfig
    stats: PatchStats = field(repr=False)
    Q: float = 0.0

    @property
    def N(self) -> int:
        return self.stats.n_patches

    @property
    def m_aniso(self) -> int:
        return int(np.count_nonzero(self.stats.anisotropic))

    @property
    def patches(self) -> list[PatchAnalysis]:
        d = self.config.patch_size
        st = self.stats
        ny, nx = st.qi.shape
        return [
            PatchAnalysis(
                origin=(q * d, p * d),
                s1=float(st.s1[p, q]),
                s2=float(st.s2[p, q]),
                R=float(st.R[p, q]),
                anisotropic=bool(st.anisotropic[p, q]),
                Qi=float(st.qi[p, q]),
            )
            for p in range(ny)
            for q in range(nx)
        ]

    def to_dict(self) -> dict:
        return {
            "q": self.Q,
            "n_patches": self.N,
            "n_anisotropic": self.m_aniso,
            "patch_size": self.config.patch_size,
            "tau": self.config.tau,
            "patches": [
                {"x": p.origin[0], "y": p.origin[1], "s1": p.s1, "s2": p.s2, "r": p.R, "qi": p.Qi}
                for p in self.patches
            ],
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def structure_tensor(gx, gy) -> np.ndarray:
    """Return the 2x2 matrix [[sum gx^2, sum gx gy], [sum gx gy, sum gy^2]] of one patch."""
    gx = np.asarray(gx, dtype=np.float64)
    gy = np.asarray(gy, dtype=np.float64)
    if gx.shape != gy.shape:
        raise DimensionError(f"gradient patches differ in shape: {gx.shape} vs {gy.shape}")
    a = float(np.sum(gx * gx))
    b = float(np.sum(gx * gy))
    c = float(np.sum(gy * gy))
    return np.array([[a, b], [b, c]])


def _eigen(a, b, c):
    half_tr = 0.5 * (a + c)
    disc = np.sqrt((0.5 * (a - c)) ** 2 + b * b)
    lam1 = half_tr + disc
    lam2 = np.maximum(half_tr - disc, 0.0)
    return lam1, lam2, disc


def singular_values(tensor) -> tuple[float, float]:
    """Singular values (s1, s2) of the gradient matrix from its 2x2 Gram matrix.

    Closed form: the eigenvalues of [[a, b], [b, c]] are tr/2 +- sqrt(((a-c)/2)^2 + b^2),
    with the smaller one clamped at 0 against round-off.
    """
    t = np.asarray(tensor, dtype=np.float64)
    if t.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise FloatingPointError("structure tensor contains NaN or Inf")
    a, b, c = t[0, 0], 0.5 * (t[0, 1] + t[1, 0]), t[1, 1]
    if a < 0.0 or c < 0.0:
        raise ValueError(f"structure tensor must be positive semidefinite, got diagonal ({a}, {c})")
    lam1, lam2, _ = _eigen(a, b, c)
    return float(np.sqrt(lam1)), float(np.sqrt(lam2))


def coherence(s1: float, s2: float, eps: float = 1e-12) -> float:
    if s2 > s1 or s2 < 0:
        raise ValueError(f"need s1 >= s2 >= 0, got s1={s1}, s2={s2}")
    total = s1 + s2
    if total > eps:
        return (s1 - s2) / total
    return 0.0


def patch_q(s1: float, s2: float, cfg: QConfig = QConfig()) -> float:
    """Sharpness of one patch: s1 * R when R > tau, else 0."""
    r = coherence(s1, s2, cfg.eps)
    if r > cfg.tau:
        return s1 * r
    return 0.0


def patch_stats(gx: np.ndarray, gy: np.ndarray, cfg: QConfig) -> PatchStats:
    """Run the per-patch pipeline on full-image gradient fields."""
    d = cfg.patch_size
    ny, nx = patch_grid(gx.shape, d)
    if ny == 0 or nx == 0:
        raise EmptyDomainError(
            f"a {gx.shape[1]}x{gx.shape[0]} image holds no full {d}x{d} patch"
        )
    a, b, c = _backend.patch_tensors(
        np.ascontiguousarray(gx), np.ascontiguousarray(gy), d
    )
    lam1, lam2, _ = _eigen(a, b, c)
    s1 = np.sqrt(lam1)
    s2 = np.sqrt(lam2)
    total = s1 + s2
    ok = total > cfg.eps
    R = np.where(ok, (s1 - s2) / np.where(ok, total, 1.0), 0.0)
    aniso = R > cfg.tau
    qi = np.where(aniso, s1 * R, 0.0)
    return PatchStats(a=a, b=b, c=c, s1=s1, s2=s2, R=R, anisotropic=aniso, qi=qi)


def image_patch_stats(img, cfg: QConfig) -> PatchStats:
    img = as_image(img)
    d = cfg.patch_size
    if img.shape[0] < d or img.shape[1] < d:
        raise EmptyDomainError(f"a {img.shape[1]}x{img.shape[0]} image holds no full {d}x{d} patch")
    gx, gy = spatial_gradients(img)
    return patch_stats(gx, gy, cfg)


def compute_q(img, cfg: QConfig = QConfig()) -> QReport:
    """Compute Q and the per-patch analysis of ``img``.

    Gradients are taken on the whole image before tiling, so patch rims see
    their true neighbours.
    """
    stats = image_patch_stats(img, cfg)
    return QReport(config=cfg, stats=stats, Q=stats.q)


def q_value(img, cfg: QConfig = QConfig()) -> float:
    """Shortcut for ``compute_q(img, cfg).Q``."""
    return image_patch_stats(img, cfg).q
