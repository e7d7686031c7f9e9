"""Differentiable no-reference sharpness (Q), a sharpness-augmented loss, and
variational deblurring tools for luma images."""

__version__ = "0.1.0"

from ._backend import NAME as backend
from .degradation import (
    BlurKernel,
    DegradationConfig,
    box_kernel,
    degrade,
    gaussian_kernel,
    gaussian_noise,
    parse_kernel,
)
from .errors import ConfigError, DimensionError, EmptyDomainError, ImageFormatError
from .evaluation import (
    MetricRecord,
    SweepRecord,
    beta_sweep,
    beta_sweep_arrays,
    evaluate_pairs,
)
from .image import (
    GradientPair,
    convolve,
    convolve_adjoint,
    extract_patches,
    load_image,
    save_image,
    spatial_gradients,
    spatial_gradients_adjoint,
)
from .losses import LossConfig, composite_grad, composite_loss, l1_loss
from .metrics import psnr, ssim
from .optim import OptimizerConfig, OptTrace, richardson_lucy, variational_deblur
from .qgrad import GradCheckReport, check_gradient, fd_gradient, q_and_gradient, q_gradient
from .qmetric import (
    PatchAnalysis,
    QConfig,
    QReport,
    coherence,
    compute_q,
    patch_q,
    q_value,
    singular_values,
    structure_tensor,
)
