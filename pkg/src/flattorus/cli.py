"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import analysis, bargmann, frames, signals, torus_stft as stft_mod
from .theta import DEFAULT_EPS

log = logging.getLogger("flattorus")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--n", type=int, help="dimension N of S_N")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="Gaussian dilation (default 1)")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS,
                   help=f"theta truncation target (default {DEFAULT_EPS:g})")
    p.add_argument("--quad", type=int, default=32,
                   help="quadrature nodes per unit length (default 32)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="output path (default stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flattorus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    shared = _shared()

    p = sub.add_parser("dgt", parents=[shared], help="finite Gabor transform of two vectors")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = sub.add_parser("stft", parents=[shared], help="STFT of an S_N vector at torus points")
    p.add_argument("--phi", required=True)
    p.add_argument("--points", required=True, help="CSV with x,xi per line")

    p = sub.add_parser("kernel", parents=[shared], help="Gaussian reproducing kernel K(p', p)")
    p.add_argument("--p-prime", required=True, help="x,xi")
    p.add_argument("--p", required=True, help="x,xi")

    p = sub.add_parser("zeros", parents=[shared], help="zeros of the Bargmann transform")
    p.add_argument("--phi", required=True)

    p = sub.add_parser("frame-check", parents=[shared], help="frame bounds of a point set")
    p.add_argument("--points", required=True, help="CSV of x,xi (or j,l with --grid)")
    p.add_argument("--grid", action="store_true", help="points are integer grid pairs j,l")

    p = sub.add_parser("verify", parents=[shared], help="brute-force frame characterization check")
    p.add_argument("--budget", type=int, default=2000, help="sampled subsets when not exhaustive")

    p = sub.add_parser("plot-window", parents=[shared], help="periodized Gaussian on [0,1)")
    p.add_argument("--samples", type=int, default=256)
    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".flattorus-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _csv_rows(path: str) -> list[list[float]]:
    rows = []
    for rec in csv.reader(io.StringIO(_read(path))):
        if not rec or rec[0].strip().startswith("#"):
            continue
        try:
            rows.append([float(v) for v in rec])
        except ValueError:
            if rows:
                raise
            continue  # header line
    return rows


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected x,xi but got {text!r}")
    return float(parts[0]), float(parts[1])


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _need_n(args, actual: int | None = None) -> int:
    if args.n is None:
        if actual is None:
            raise UsageError("--n is required")
        return actual
    if args.n < 1:
        raise UsageError("--n must be positive")
    if actual is not None and actual != args.n:
        raise UsageError(f"input has length {actual}, but --n is {args.n}")
    return args.n


def cmd_dgt(args) -> str:
    f = signals.FiniteSignal.from_json(_read(args.f))
    g = signals.FiniteSignal.from_json(_read(args.g))
    if len(f) != len(g):
        raise UsageError("f and g differ in length")
    N = _need_n(args, len(f))
    V = stft_mod.dgt(f, g)
    rows = [(k, l, V[k, l].real, V[k, l].imag) for k in range(N) for l in range(N)]
    return _csv_text(["k", "l", "re", "im"], rows)


def cmd_stft(args) -> str:
    phi = signals.SNVector.from_json(_read(args.phi))
    N = _need_n(args, phi.n_dim)
    pts = _csv_rows(args.points)
    if any(len(r) != 2 for r in pts):
        raise UsageError("points CSV needs exactly two columns x,xi")
    x = np.array([r[0] for r in pts])
    xi = np.array([r[1] for r in pts])
    vals = stft_mod.stft(signals.GaussianWindow(args.lam), phi, (x, xi), args.eps)
    vals = np.atleast_1d(vals)
    return _csv_text(["x", "xi", "re", "im"],
                     [(x[i], xi[i], vals[i].real, vals[i].imag) for i in range(len(x))])


def cmd_kernel(args) -> str:
    N = _need_n(args)
    pp = stft_mod.TorusPoint(*_pair(args.p_prime), N)
    p = stft_mod.TorusPoint(*_pair(args.p), N)
    w = signals.GaussianWindow(args.lam)
    closed = analysis.kernel_gaussian(args.lam, N, pp, p, args.eps)
    basis = analysis.kernel_basis_sum(w, N, pp, p, args.eps)
    grid = analysis.QuadratureGrid(N, args.quad, args.quad)
    repro = analysis.kernel_reproduce_check(args.lam, signals.SNVector.basis(N, 0), pp, grid, args.eps)
    return _dump_json({
        "value": [closed.real, closed.imag],
        "basis_sum": [basis.real, basis.imag],
        "deviation": abs(closed - basis),
        "reproduction_error_e0": repro,
    })


def cmd_zeros(args) -> str:
    phi = signals.SNVector.from_json(_read(args.phi))
    _need_n(args, phi.n_dim)
    if phi.norm() == 0:
        raise UsageError("phi must be nonzero")
    b = bargmann.BargmannFn(args.lam, phi)
    zs = bargmann.zero_locate(b, rng=np.random.default_rng(args.seed))
    return _dump_json(zs.to_dict())


def cmd_frame_check(args) -> str:
    N = _need_n(args)
    rows = _csv_rows(args.points)
    if any(len(r) != 2 for r in rows):
        raise UsageError("points CSV needs exactly two columns")
    if args.grid:
        if any(not float(v).is_integer() for r in rows for v in r):
            raise UsageError("grid pairs must be integers")
        cfg = frames.PointConfig.from_grid(N, [(int(a), int(b)) for a, b in rows])
    else:
        cfg = frames.PointConfig.from_points(N, rows)
    rep = frames.frame_check(args.lam, cfg, args.eps)
    return _dump_json({"n": N, "lambda": args.lam, "k": cfg.K, "kind": cfg.kind, **rep.to_dict()})


def cmd_verify(args) -> str:
    N = _need_n(args)
    rep = frames.verify_equivalence(N, args.lam, args.budget, args.seed, args.jobs, eps=args.eps)
    d = rep.to_dict()
    seconds = d.pop("seconds")  # kept out of the file so reruns are byte-identical
    sizes = ", ".join(f"{v} (K={k})" for k, v in rep.subsets.items())
    print(f"mismatches: {len(rep.mismatches)}, subsets: {sizes}, continuous: {rep.continuous}, "
          f"indeterminate: {rep.indeterminate}, seconds: {seconds:.2f}", file=sys.stderr)
    return _dump_json(d)


def cmd_plot_window(args) -> str:
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    t = np.arange(args.samples) / args.samples
    vals = np.atleast_1d(signals.periodize_at(signals.GaussianWindow(args.lam), t, args.eps)).real
    return _csv_text(["t", "value"], zip(t, vals))


COMMANDS = {
    "dgt": cmd_dgt,
    "stft": cmd_stft,
    "kernel": cmd_kernel,
    "zeros": cmd_zeros,
    "frame-check": cmd_frame_check,
    "verify": cmd_verify,
    "plot-window": cmd_plot_window,
}


def _validate(args) -> None:
    if not (args.lam > 0 and math.isfinite(args.lam)):
        raise UsageError("--lambda must be positive")
    if not (0 < args.eps <= 1e-6):
        raise UsageError("--eps must lie in (0, 1e-6]")
    if args.quad < 8:
        raise UsageError("--quad must be at least 8")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        text = COMMANDS[args.command](args)
        _write(text, args.out)
    except ArithmeticError as exc:
        print(f"flattorus: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"flattorus: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    logging.basicConfig(level=os.environ.get("FLATTORUS_LOG", "WARNING"))
    sys.exit(run())


if __name__ == "__main__":
    main()
