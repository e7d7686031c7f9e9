"""Batch evaluation (PSNR / SSIM / Q) and the beta sweep driver."""
import csv
import io
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import DimensionError
from .image import load_image
from .losses import LossConfig
from .metrics import psnr, ssim
from .optim import OptimizerConfig, variational_deblur
from .qmetric import QConfig, q_value

IMAGE_SUFFIXES = (".png", ".pgm")


@dataclass(frozen=True)
class MetricRecord:
    image_id: str
    psnr: float
    ssim: float
    q: float
    wall_time: float = 0.0

    def to_dict(self, timing=False) -> dict:
        d = {"image_id": self.image_id, "psnr": self.psnr, "ssim": self.ssim, "q": self.q}
        if timing:
            d["wall_time"] = self.wall_time
        return d


@dataclass(frozen=True)
class SweepRecord:
    beta: float
    mean_psnr: float
    mean_ssim: float
    mean_q: float


def evaluate_image(image_id, restored, reference, q_cfg: QConfig) -> MetricRecord:
    """PSNR and SSIM of ``restored`` against ``reference``; Q of ``restored`` alone."""
    t0 = time.perf_counter()
    p = psnr(restored, reference)
    s = ssim(restored, reference)
    q = q_value(restored, q_cfg)
    return MetricRecord(image_id, p, s, q, time.perf_counter() - t0)


def aggregate(records) -> dict:
    n = len(records)
    if n == 0:
        return {"psnr": float("nan"), "ssim": float("nan"), "q": float("nan")}
    return {
        "psnr": sum(r.psnr for r in records) / n,
        "ssim": sum(r.ssim for r in records) / n,
        "q": sum(r.q for r in records) / n,
    }


def read_pairs_csv(path) -> list[tuple[Path, Path]]:
    """Read a ``restored,reference`` CSV; relative paths resolve against the CSV's folder."""
    path = Path(path)
    base = path.parent
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"restored", "reference"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: header must contain 'restored,reference'")
        return [(base / row["restored"].strip(), base / row["reference"].strip()) for row in reader]


def evaluate_pairs(pairs, q_cfg: QConfig):
    """Evaluate (restored-path, reference-path) pairs in the order given.

    Returns the per-pair records and the arithmetic means. Any pair that fails
    to load or has mismatched shapes raises with both paths named.
    """
    records = []
    for restored_path, reference_path in pairs:
        try:
            restored = load_image(restored_path)
            reference = load_image(reference_path)
        except (OSError, ValueError) as exc:
            raise type(exc)(f"pair ({restored_path}, {reference_path}): {exc}") from exc
        if restored.shape != reference.shape:
            raise DimensionError(
                f"pair ({restored_path}, {reference_path}): shapes {restored.shape} and {reference.shape} differ"
            )
        records.append(evaluate_image(Path(restored_path).name, restored, reference, q_cfg))
    return records, aggregate(records)


def report_json(records, means, q_cfg: QConfig, timing=False) -> str:
    """Deterministic JSON report; wall times are left out unless ``timing`` is set."""
    doc = {
        "patch_size": q_cfg.patch_size,
        "tau": q_cfg.tau,
        "records": [r.to_dict(timing) for r in records],
        "mean": means,
    }
    return json.dumps(doc, indent=2)


def beta_sweep_arrays(observed, references, betas, loss_cfg: LossConfig, opt: OptimizerConfig):
    """Deblur every observed image at every beta and average the metrics per beta.

    ``loss_cfg.beta`` is ignored; each sweep entry substitutes its own value.
    The same ``loss_cfg.q_cfg`` is used for the loss and for the reported Q.
    """
    if len(betas) == 0:
        raise ValueError("beta sweep needs at least one beta")
    if len(observed) != len(references):
        raise ValueError(f"{len(observed)} observed images but {len(references)} references")
    out = []
    for beta in betas:
        cfg = replace(loss_cfg, beta=float(beta))
        records = []
        for k, (obs, ref) in enumerate(zip(observed, references)):
            obs = np.asarray(obs, dtype=np.float64)
            if obs.shape != np.shape(ref):
                raise DimensionError(f"image {k}: observed {obs.shape} vs reference {np.shape(ref)}")
            restored, _ = variational_deblur(obs, cfg, opt)
            records.append(evaluate_image(str(k), restored, ref, cfg.q_cfg))
        means = aggregate(records)
        out.append(SweepRecord(float(beta), means["psnr"], means["ssim"], means["q"]))
    return out


def list_images(folder) -> list[Path]:
    folder = Path(folder)
    if not folder.is_dir():
        raise FileNotFoundError(f"{folder}: not a directory")
    return sorted(p for p in folder.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)


def match_folders(inputs, refs) -> list[tuple[Path, Path]]:
    """Pair images in two folders by file stem."""
    ins = {p.stem: p for p in list_images(inputs)}
    rfs = {p.stem: p for p in list_images(refs)}
    missing = sorted(set(ins) ^ set(rfs))
    if missing:
        raise FileNotFoundError(f"unmatched images between {inputs} and {refs}: {', '.join(missing)}")
    if not ins:
        raise FileNotFoundError(f"{inputs}: no .png/.pgm images")
    return [(ins[k], rfs[k]) for k in sorted(ins)]


def beta_sweep(observed_paths, reference_paths, betas, loss_cfg: LossConfig, opt: OptimizerConfig):
    observed = [load_image(p) for p in observed_paths]
    references = [load_image(p) for p in reference_paths]
    return beta_sweep_arrays(observed, references, betas, loss_cfg, opt)


def sweep_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["beta", "mean_psnr", "mean_ssim", "mean_q"])
    for r in records:
        writer.writerow([repr(r.beta), repr(r.mean_psnr), repr(r.mean_ssim), repr(r.mean_q)])
    return buf.getvalue()
