"""``sorsvd`` command-line front end.

Every command is a pure function of its arguments: seeds are explicit, CSV
floats are written with ``repr`` and JSON keys are sorted, so repeated runs
produce byte-identical files. Failures print one ``error: <Kind>: <message>``
line on stderr and exit with status 1 (argument errors exit with 2).
"""
import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as mio
from ._accel import apply_thread_cap
from .bounds import BoundParams, bound_tightness_experiment
from .core import full_svd
from .errors import ParameterError, SorsvdError
from .matrixgen import FAMILIES, GenSpec, generate
from .rpca import estimate_rank_bound, rpca_alm, rpca_default_config
from .sketch import SketchConfig, approx_error, decompose, r_svd, sor_svd_power, tsr_svd


def parse_range(text):
    """``a:b:step`` (inclusive of b) or a single integer."""
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from exc
    if len(nums) == 1:
        return [nums[0]]
    if len(nums) not in (2, 3):
        raise argparse.ArgumentTypeError(f"range must be a:b or a:b:step, got {text!r}")
    a, b = nums[0], nums[1]
    step = nums[2] if len(nums) == 3 else 1
    if step < 1 or b < a:
        raise argparse.ArgumentTypeError(f"need a <= b and step >= 1 in {text!r}")
    return list(range(a, b + 1, step))


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _ext(fmt):
    return ".csv" if fmt == "csv" else ".sord"


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _load(args):
    return mio.read_matrix(args.input, getattr(args, "input_format", None))


# commands ---------------------------------------------------------------

def cmd_gen(args):
    spec = GenSpec(args.family, args.n, args.k, args.s, args.seed)
    mats = generate(spec)
    out = Path(args.output)
    stem = out.with_suffix("")
    written = {}
    for name, mat in mats.items():
        path = out if name == "a" else Path(f"{stem}_{name}{_ext(args.format)}")
        mio.write_matrix(path, mat, args.format)
        written[name] = path.name
    sidecar = dict(spec.to_dict(), format=args.format, files=written)
    _write_json(f"{out}.json", sidecar)
    return 0


def cmd_decompose(args):
    a = _load(args)
    cfg = SketchConfig(ell=args.ell, q=args.q, seed=args.seed, single_pass=args.single_pass)
    x = decompose(a, args.k, args.algorithm, cfg)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    ext = _ext(args.format)
    mio.write_matrix(out / f"u{ext}", x.u, args.format)
    mio.write_matrix(out / f"sigma{ext}", x.sigma.reshape(-1, 1), args.format)
    mio.write_matrix(out / f"v{ext}", x.v, args.format)
    _write_json(out / "summary.json", {
        "method": x.method, "passes": x.passes, "k": x.k, "ell": x.ell, "q": x.q,
        "seed": x.seed, "single_pass": args.single_pass,
        "error_frobenius": approx_error(a, x, "frobenius"),
    })
    return 0


def _seeds(args):
    return [args.seed + t for t in range(args.trials)]


def cmd_svcompare(args):
    a = _load(args)
    ell, q = args.ell, args.q
    sig = full_svd(a).sigma
    rows = []
    for seed in _seeds(args):
        rs = r_svd(a, ell, q, seed).sigma
        ts = tsr_svd(a, ell, seed).sigma
        ss = sor_svd_power(a, ell, SketchConfig(ell=ell, q=q, seed=seed)).sigma
        for j in range(ell):
            rows.append([seed, j + 1, float(sig[j]), float(rs[j]), float(ts[j]), float(ss[j])])
    header = ["seed", "j", "sigma_svd", "sigma_rsvd", "sigma_tsr", "sigma_sor"]
    _emit(_csv_text(header, rows), args.output)
    return 0


def _ell_values(args):
    if args.ell_range is not None:
        return args.ell_range
    if args.ell is None:
        raise ParameterError("give --ell or --ell-range")
    return [args.ell]


def cmd_errcurve(args):
    a = _load(args)
    k = args.k
    sig = full_svd(a).sigma
    floor = float(np.sqrt(np.sum(sig[k:] ** 2)))
    rows = []
    for ell in _ell_values(args):
        errs = {"rsvd": [], "tsr": [], "sor": []}
        for seed in _seeds(args):
            errs["rsvd"].append(approx_error(a, r_svd(a, ell, args.q, seed, k=k)))
            errs["tsr"].append(approx_error(a, tsr_svd(a, ell, seed, k=k)))
            cfg = SketchConfig(ell=ell, q=args.q, seed=seed, single_pass=args.single_pass)
            errs["sor"].append(approx_error(a, sor_svd_power(a, k, cfg)))
        rows.append([ell, floor] + [float(np.mean(errs[m])) for m in ("rsvd", "tsr", "sor")])
    _emit(_csv_text(["ell", "err_svd_floor", "err_rsvd", "err_tsr", "err_sor"], rows), args.output)
    return 0


def cmd_boundcheck(args):
    a = _load(args)
    k = args.k
    svd_a = full_svd(a)
    rows = []
    for ell in _ell_values(args):
        params = BoundParams(k, ell, args.p, args.q)
        rep = bound_tightness_experiment(a, k, params, args.trials, args.seed, svd_a=svd_a)
        checked = [r for r in rep.records if r.full_row_rank]
        finite = lambda vals: float(np.mean(vals)) if vals else math.nan  # noqa: E731
        rows.append([
            ell, rep.trials, len(checked),
            rep.realized_error_frobenius, rep.realized_error_spectral,
            finite([r.bound_f for r in checked]), finite([r.bound_2 for r in checked]),
            int(all(r.satisfied_f and r.satisfied_2 and r.sv_satisfied for r in checked)),
            int(all(r.interlacing for r in rep.records)),
            rep.lowrank_bound_frobenius, rep.lowrank_bound_spectral,
        ])
    header = ["ell", "trials", "full_rank_trials", "err_f", "err_2", "det_bound_f", "det_bound_2",
              "det_satisfied", "interlacing", "avg_bound_f", "avg_bound_2"]
    _emit(_csv_text(header, rows), args.output)
    return 0


def _rpca_cfg(args, x, ell_default=None):
    over = {"q": args.q, "seed": args.seed, "mu_update_literal": args.mu_update_literal}
    if args.ell is not None:
        over["ell"] = args.ell
    elif ell_default is not None:
        over["ell"] = ell_default
    return rpca_default_config(x, **over)


def _warn_unconverged(res):
    if not res.converged:
        print(f"warning: no convergence after {res.iterations} iterations "
              f"(rel_error={res.rel_error!r})", file=sys.stderr)


def cmd_rpca(args):
    x = _load(args)
    cfg = _rpca_cfg(args, x) if np.any(x) else None
    res = rpca_alm(x, cfg)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    ext = _ext(args.format)
    mio.write_matrix(out / f"L{ext}", res.l, args.format)
    mio.write_matrix(out / f"S{ext}", res.s, args.format)
    (out / "telemetry.csv").write_text(res.telemetry_csv())
    _warn_unconverged(res)
    return 0


def cmd_bgsub(args):
    x, shape, maxval = mio.load_image_stack(args.input)
    cfg = None
    if np.any(x):
        ell = min(estimate_rank_bound(x), min(x.shape) - 1)
        cfg = _rpca_cfg(args, x, ell_default=max(ell, 1))
    res = rpca_alm(x, cfg)
    out = Path(args.output)
    mio.write_frames(out / "background", res.l, shape, maxval)
    mio.write_frames(out / "foreground", np.abs(res.s), shape, maxval)
    (out / "telemetry.csv").write_text(res.telemetry_csv())
    _warn_unconverged(res)
    return 0


COMMANDS = {
    "gen": cmd_gen, "decompose": cmd_decompose, "svcompare": cmd_svcompare,
    "errcurve": cmd_errcurve, "boundcheck": cmd_boundcheck, "rpca": cmd_rpca, "bgsub": cmd_bgsub,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="sorsvd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, *, needs_input=True, output_required=False):
        p = sub.add_parser(name, help=help_)
        if needs_input:
            p.add_argument("--input", required=True)
            p.add_argument("--input-format", choices=mio.MATRIX_FORMATS, default=None,
                           help="defaults to the input file extension")
        p.add_argument("--output", required=output_required, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=mio.MATRIX_FORMATS, default="sord")
        return p

    g = add("gen", "generate a synthetic matrix", needs_input=False, output_required=True)
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=0, help="rank parameter (k or r)")
    g.add_argument("--s", type=int, default=0, help="sparse cardinality (rpca_instance)")

    d = add("decompose", "rank-k randomized decomposition", output_required=True)
    d.add_argument("--algorithm", choices=("sor", "rsvd", "tsr"), default="sor")
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--ell", type=int, required=True)
    d.add_argument("--q", type=int, default=0)
    d.add_argument("--single-pass", action="store_true")

    for name, help_ in (("svcompare", "singular values of all methods"),
                        ("errcurve", "Frobenius error against ell"),
                        ("boundcheck", "realized errors against the bounds")):
        p = add(name, help_)
        p.add_argument("--ell", type=int, default=None)
        p.add_argument("--q", type=int, default=0)
        p.add_argument("--trials", type=int, default=1)
        if name != "svcompare":
            p.add_argument("--k", type=int, required=True)
            p.add_argument("--ell-range", type=parse_range, default=None)
        if name == "errcurve":
            p.add_argument("--single-pass", action="store_true")
        if name == "boundcheck":
            p.add_argument("--p", type=int, default=None,
                           help="split parameter; default is the tightest admissible p")

    for name, help_ in (("rpca", "robust PCA of a matrix file"),
                        ("bgsub", "background subtraction on a PGM frame directory")):
        p = add(name, help_, output_required=True)
        p.add_argument("--ell", type=int, default=None)
        p.add_argument("--q", type=int, default=1)
        p.add_argument("--mu-update-literal", action="store_true")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "svcompare" and args.ell is None:
        parser.error("svcompare needs --ell")
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be >= 1")
    try:
        apply_thread_cap()
        return COMMANDS[args.command](args)
    except (SorsvdError, OSError, ValueError) as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
