"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numeric or validation failure.
"""
import argparse
import sys
from pathlib import Path

from . import __version__
from .degradation import DegradationConfig, degrade, parse_kernel
from .errors import ConfigError, DimensionError, EmptyDomainError, ImageFormatError
from .evaluation import beta_sweep, evaluate_pairs, match_folders, read_pairs_csv, report_json, sweep_csv
from .image import load_image, save_image
from .losses import LossConfig
from .optim import OptimizerConfig, richardson_lucy, variational_deblur
from .qgrad import check_gradient
from .qmetric import QConfig, compute_q

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

GRADCHECK_TOL = 1e-4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _count(text: str) -> int:
    """Integer flag that also accepts scientific notation such as 1e3."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value != int(value) or value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return int(value)


def _betas(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad beta list {text!r}")


def _add_q_flags(p):
    p.add_argument("--patch-size", type=_count, default=8)
    p.add_argument("--tau", type=float, default=0.5)


def _add_deblur_flags(p):
    p.add_argument("--mode", choices=("direct", "deconv"), default="direct")
    p.add_argument("--kernel", default="box:5", help="box:K or gauss:K:sigma (used in deconv mode)")
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--iters", type=_count, default=500)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--delta", type=float, default=1e-3, help="Charbonnier smoothing constant")
    p.add_argument("--init", choices=("observed", "zeros"), default="observed")
    _add_q_flags(p)


def _q_cfg(args) -> QConfig:
    return QConfig(patch_size=args.patch_size, tau=args.tau)


def _deblur_cfgs(args, beta=None):
    loss = LossConfig(beta=args.beta if beta is None else beta, q_cfg=_q_cfg(args), l1_delta=args.delta)
    kernel = parse_kernel(args.kernel) if args.mode == "deconv" else None
    opt = OptimizerConfig(
        step_size=args.step,
        max_iters=args.iters,
        fidelity=args.mode,
        kernel=kernel,
        tol=args.tol,
        init=args.init,
    )
    return loss, opt


def cmd_q(args):
    report = compute_q(load_image(args.image), _q_cfg(args))
    print(f"Q = {report.Q!r}")
    print(f"patches = {report.N}  anisotropic = {report.m_aniso}")
    if args.json:
        Path(args.json).write_text(report.to_json(indent=2) + "\n")
    return EXIT_OK


def cmd_degrade(args):
    cfg = DegradationConfig(kernel=parse_kernel(args.kernel), sigma_e=args.sigma_e, seed=args.seed)
    save_image(degrade(load_image(args.input), cfg), args.output)
    return EXIT_OK


def cmd_gradcheck(args):
    report = check_gradient(load_image(args.image), _q_cfg(args), h=args.h)
    for key, value in report.to_dict().items():
        print(f"{key} = {value!r}")
    ok = report.max_rel_err <= GRADCHECK_TOL
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_deblur(args):
    loss, opt = _deblur_cfgs(args)
    restored, trace = variational_deblur(load_image(args.input), loss, opt)
    save_image(restored, args.output)
    if args.trace:
        trace.write_csv(args.trace)
    last = trace.records[-1]
    print(f"iterations = {last.iter}  total_loss = {last.total_loss!r}  q = {last.q_value!r}")
    return EXIT_OK


def cmd_rl(args):
    restored = richardson_lucy(load_image(args.input), parse_kernel(args.kernel), iters=args.iters)
    save_image(restored, args.output)
    return EXIT_OK


def cmd_evaluate(args):
    q_cfg = _q_cfg(args)
    records, means = evaluate_pairs(read_pairs_csv(args.pairs), q_cfg)
    for r in records:
        print(f"{r.image_id}: psnr={r.psnr:.4f} ssim={r.ssim:.4f} q={r.q:.6f}")
    print(f"mean: psnr={means['psnr']:.4f} ssim={means['ssim']:.4f} q={means['q']:.6f}")
    if args.json:
        Path(args.json).write_text(report_json(records, means, q_cfg) + "\n")
    return EXIT_OK


def cmd_sweep(args):
    pairs = match_folders(args.inputs, args.refs)
    loss, opt = _deblur_cfgs(args, beta=0.0)
    records = beta_sweep([p for p, _ in pairs], [r for _, r in pairs], args.betas, loss, opt)
    text = sweep_csv(records)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sharploss", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("q", help="compute the sharpness metric Q of an image")
    p.add_argument("image")
    _add_q_flags(p)
    p.add_argument("--json", help="write the full per-patch report here")
    p.set_defaults(func=cmd_q)

    p = sub.add_parser("degrade", help="blur an image and add seeded Gaussian noise")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--kernel", required=True, help="box:K or gauss:K:sigma")
    p.add_argument("--sigma-e", type=float, default=0.0)
    p.add_argument("--seed", type=_count, default=1234)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("gradcheck", help="compare the analytic Q gradient with finite differences")
    p.add_argument("image")
    _add_q_flags(p)
    p.add_argument("--h", type=float, default=1e-5)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("deblur", help="variational deblurring with the sharpness-augmented loss")
    p.add_argument("input")
    p.add_argument("output")
    _add_deblur_flags(p)
    p.add_argument("--trace", help="write the per-iteration loss trace (CSV)")
    p.set_defaults(func=cmd_deblur)

    p = sub.add_parser("rl", help="Richardson-Lucy deconvolution baseline")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--kernel", required=True, help="box:K or gauss:K:sigma")
    p.add_argument("--iters", type=_count, default=50)
    p.set_defaults(func=cmd_rl)

    p = sub.add_parser("evaluate", help="PSNR / SSIM / Q over restored,reference pairs")
    p.add_argument("--pairs", required=True, help="CSV with header restored,reference")
    _add_q_flags(p)
    p.add_argument("--json", help="write the report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="deblur a folder at several beta values and tabulate metrics")
    p.add_argument("--inputs", required=True, help="folder of blurred images")
    p.add_argument("--refs", required=True, help="folder of reference images (matched by name)")
    p.add_argument("--betas", type=_betas, default=[0.0, 0.001, 0.01, 0.05, 0.1])
    p.add_argument("--out", help="write the sweep table here (CSV)")
    _add_deblur_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ImageFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, DimensionError, EmptyDomainError, ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
