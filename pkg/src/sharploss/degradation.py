"""Synthetic out-of-focus degradation: blur kernel convolution plus Gaussian noise.

Noise comes from numpy's PCG64 bit generator (a fixed, documented algorithm)
through an explicit Box-Muller transform of its uniform doubles, so a seed
always replays the same field.
"""
import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .image import as_image, convolve


@dataclass(frozen=True, eq=False)
class BlurKernel:
    weights: np.ndarray
    kind: str = "custom"
    sigma: float | None = None

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2 == 0:
            raise ConfigError(f"kernel must be square with odd side, got shape {w.shape}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ConfigError("kernel weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ConfigError(f"kernel weights must sum to 1, got {w.sum()!r}")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def K(self) -> int:
        return self.weights.shape[0]

    def spec(self) -> str:
        """Short CLI form, e.g. ``box:5`` or ``gauss:5:1.0``."""
        if self.kind == "box":
            return f"box:{self.K}"
        if self.kind == "gaussian":
            return f"gauss:{self.K}:{self.sigma!r}"
        raise ConfigError("custom kernels have no short form")

    def to_dict(self) -> dict:
        if self.kind == "box":
            return {"type": "box", "k": self.K}
        if self.kind == "gaussian":
            return {"type": "gaussian", "k": self.K, "sigma": self.sigma}
        raise ConfigError("custom kernels cannot be serialised")


def _check_size(K):
    if int(K) != K or K < 1 or K % 2 == 0:
        raise ConfigError(f"kernel size must be a positive odd integer, got {K}")
    return int(K)


def box_kernel(K: int) -> BlurKernel:
    """K x K average blur, every weight 1/K^2."""
    K = _check_size(K)
    return BlurKernel(np.full((K, K), 1.0 / (K * K)), kind="box")


def gaussian_kernel(K: int, sigma: float) -> BlurKernel:
    K = _check_size(K)
    if not sigma > 0:
        raise ConfigError(f"gaussian sigma must be positive, got {sigma}")
    r = K // 2
    off = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(off[:, None] ** 2 + off[None, :] ** 2) / (2.0 * sigma * sigma))
    return BlurKernel(g / g.sum(), kind="gaussian", sigma=float(sigma))


def parse_kernel(spec: str) -> BlurKernel:
    """Parse ``box:K`` or ``gauss:K:sigma``."""
    parts = spec.strip().split(":")
    try:
        if parts[0] == "box" and len(parts) == 2:
            return box_kernel(int(parts[1]))
        if parts[0] in ("gauss", "gaussian") and len(parts) == 3:
            return gaussian_kernel(int(parts[1]), float(parts[2]))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad kernel spec {spec!r}: {exc}") from exc
    raise ConfigError(f"bad kernel spec {spec!r}; expected box:K or gauss:K:sigma")


def kernel_from_dict(d: dict) -> BlurKernel:
    kind = d.get("type")
    if kind == "box":
        return box_kernel(d["k"])
    if kind == "gaussian":
        return gaussian_kernel(d["k"], d["sigma"])
    raise ConfigError(f"unknown kernel type {kind!r}")


@dataclass(frozen=True)
class DegradationConfig:
    kernel: BlurKernel
    sigma_e: float = 0.0
    seed: int = 1234

    def __post_init__(self):
        if not self.sigma_e >= 0:
            raise ConfigError(f"sigma_e must be >= 0, got {self.sigma_e}")

    def to_json(self) -> str:
        return json.dumps(
            {"kernel": self.kernel.to_dict(), "sigma_e": self.sigma_e, "seed": self.seed}
        )

    @classmethod
    def from_json(cls, text: str) -> "DegradationConfig":
        d = json.loads(text)
        return cls(kernel=kernel_from_dict(d["kernel"]), sigma_e=float(d["sigma_e"]), seed=int(d["seed"]))


def gaussian_noise(shape, seed: int) -> np.ndarray:
    """Standard normal field filled in row-major order.

    Pairs of PCG64 uniforms (u1, u2) map to r cos(2 pi u2), r sin(2 pi u2) with
    r = sqrt(-2 log(1 - u1)); the ``1 - u1`` keeps the log argument in (0, 1].
    """
    n = int(np.prod(shape))
    pairs = (n + 1) // 2
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(2 * pairs)
    r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:n].reshape(shape)


def degrade(img, cfg: DegradationConfig) -> np.ndarray:
    """Blur with ``cfg.kernel`` and add N(0, sigma_e^2) noise. The result is not clamped."""
    out = convolve(as_image(img), cfg.kernel)
    if cfg.sigma_e > 0:
        out = out + cfg.sigma_e * gaussian_noise(out.shape, cfg.seed)
    return out
