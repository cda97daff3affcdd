"""Convert between ReLU networks, explicit PWA functions and multiparametric LPs.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error. Errors
are reported on stderr as a single JSON line.
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .bounds import Architecture, HypothesisError, lower_bound, naive_bound, upper_bound
from .inverse_mplp import (MpLPError, MpLPFormatError, dc_to_mplp, load_mplp, to_text,
                           verify_inverse)
from .polyhedra import Polyhedron
from .pwa_core import (DCPair, DomainError, MaxAffine, PWAFormatError, PWAFunction,
                       check_continuity, dc_decompose_1d, eval_pwa_batch, is_convex_1d,
                       load_function, pieces_as_maxaffine, pwa1d_of_pieces)
from .region_analysis import RegionCapExceeded, net_to_pwa
from .relu_net import NetFormatError, ReLUNet, eval_batch, load_net
from .synthesis import dc_to_relu, maxaffine_to_relu


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _report("UsageError", message)
        self.exit(2)


def _report(kind, message):
    print(json.dumps({"error": kind, "message": str(message)}), file=sys.stderr)


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from None


def _box(text, dim) -> Polyhedron:
    vals = _floats(text, "--box")
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise UsageError(f"--box must be 'lo,hi' with lo < hi, got {text!r}")
    return Polyhedron.box([vals[0]] * dim, [vals[1]] * dim)


def _load_any(path):
    """Net or function file, told apart by its keys."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if isinstance(data, dict) and "hidden" in data:
        return ReLUNet.from_json(text)
    return load_function(path)


def _census(net, count):
    arch = Architecture.of(net)
    if arch.meets_hypothesis():
        lo, up = lower_bound(arch), upper_bound(arch)
    else:
        lo = up = "n/a"
    widths = ",".join(map(str, net.widths))
    return (f"census: regions={count} n0={net.input_dim} widths={widths} "
            f"lower={lo} upper={up} naive={naive_bound(arch)}")


def _export_pwa(f: PWAFunction) -> str:
    pieces = [type(p)(p.region.remove_redundant(), p.u, p.c) for p in f.pieces]
    return PWAFunction(pieces, f.domain).to_json() + "\n"


def cmd_net2pwa(args):
    net = load_net(args.net)
    box = _box(args.box, net.input_dim)
    f = net_to_pwa(net, box, mode=args.mode, n_samples=args.samples, seed=args.seed)
    _write_atomic(args.output, _export_pwa(f))
    print(f"{_census(net, len(f))} mode={args.mode}")


def _to_dc(obj, box) -> DCPair:
    if isinstance(obj, DCPair):
        return obj
    if isinstance(obj, MaxAffine):
        return DCPair(obj, MaxAffine.constant(0.0, obj.dim))
    if obj.input_dim != 1 or obj.output_dim != 1:
        raise UsageError("automatic DC decomposition needs a scalar function of one variable")
    return dc_decompose_1d(pwa1d_of_pieces(obj))


def cmd_pwa2net(args):
    obj = load_function(args.input)
    dim = obj.dim if isinstance(obj, (MaxAffine, DCPair)) else obj.input_dim
    box = _box(args.box, dim)
    if isinstance(obj, DCPair) or args.dc:
        net = dc_to_relu(_to_dc(obj, box), box)
    elif isinstance(obj, MaxAffine):
        net = maxaffine_to_relu(obj, box, pad=args.pad)
    else:
        if obj.output_dim != 1:
            raise UsageError("pwa2net handles scalar functions; split vector outputs first")
        g = pieces_as_maxaffine(obj)
        if obj.input_dim == 1:
            convex = is_convex_1d(pwa1d_of_pieces(obj), tol=1e-12)
        else:
            X = np.vstack([p.region.chebyshev().center for p in obj.pieces])
            convex = np.allclose(g.values(X), eval_pwa_batch(obj, X)[:, 0], atol=1e-9)
        if not convex:
            raise UsageError("function is not convex; rerun with --dc (1-D only)")
        net = maxaffine_to_relu(g, box, pad=args.pad)
    _write_atomic(args.output, net.to_json() + "\n")
    print(f"net: {net!r} depth={net.depth} widths={','.join(map(str, net.widths))}")


def cmd_pwa2mplp(args):
    obj = load_function(args.input)
    if isinstance(obj, PWAFunction):
        domain = obj.domain
        if args.box:
            domain = _box(args.box, obj.input_dim)
    else:
        if not args.box:
            raise UsageError("--box is required for max-affine or DC-pair input")
        domain = _box(args.box, obj.dim)
    mplp = dc_to_mplp(_to_dc(obj, domain), domain)
    _write_atomic(args.output, to_text(mplp))
    print(f"mp-LP: {mplp.n_z} decision variables, {mplp.const.size} constraints")


def cmd_bounds(args):
    try:
        arch = Architecture.parse(args.arch)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"architecture: {arch}")
    for name, fn in (("lower", lower_bound), ("upper", upper_bound)):
        try:
            print(f"{name}: {fn(arch)}")
        except HypothesisError as exc:
            print(f"{name}: n/a ({exc})")
    print(f"naive: {naive_bound(arch)}")


def cmd_verify(args):
    given = [a for a in (args.net, args.pwa, args.mplp) if a]
    if len(given) < 2:
        raise UsageError("verify needs at least two of --net, --pwa, --mplp")
    net = load_net(args.net) if args.net else None
    pwa = load_function(args.pwa) if args.pwa else None
    if pwa is not None and not isinstance(pwa, PWAFunction):
        raise UsageError("--pwa expects a PWA function file")
    ok = True
    if net is not None and pwa is not None:
        lo, hi = pwa.domain.as_box() or pwa.domain.bounding_box()
        X = np.random.default_rng(args.seed).uniform(lo, hi, size=(args.samples, pwa.input_dim))
        err = float(np.max(np.abs(eval_batch(net, X) - eval_pwa_batch(pwa, X))))
        passed = err <= args.tol
        ok &= passed
        print(f"net-vs-pwa: max_error={err:.3e} tol={args.tol:g} {'PASS' if passed else 'FAIL'}")
    if pwa is not None:
        cont = check_continuity(pwa, seed=args.seed)
        ok &= cont.passed
        print(f"pwa-continuity: max_jump={cont.max_jump:.3e} "
              f"points={cont.n_boundary_points} {'PASS' if cont.passed else 'FAIL'}")
    if args.mplp:
        mplp = load_mplp(args.mplp)
        ref = pwa if pwa is not None else net
        rep = verify_inverse(mplp, ref, n_samples=args.samples, tol=args.tol, seed=args.seed)
        ok &= rep.passed
        print(f"mplp-vs-{'pwa' if pwa is not None else 'net'}: max_error={rep.max_error:.3e} "
              f"value_convexity_violation={rep.convexity_violation:.3e} "
              f"{'PASS' if rep.passed else 'FAIL'}")
    if not ok:
        raise VerificationFailed("verification failed")


def cmd_eval(args):
    obj = _load_any(args.net or args.pwa)
    if args.net and not isinstance(obj, ReLUNet):
        raise UsageError("--net expects a network file")
    if args.pwa and isinstance(obj, ReLUNet):
        raise UsageError("--pwa expects a function file")
    x = np.array(_floats(args.at, "--at"))
    y = np.atleast_1d(obj(x))
    print(" ".join(f"{v:.12g}" for v in y))


def cmd_plotdata(args):
    obj = _load_any(args.input)
    if isinstance(obj, ReLUNet):
        dim, fn = obj.input_dim, lambda X: eval_batch(obj, X)
    elif isinstance(obj, PWAFunction):
        dim, fn = obj.input_dim, lambda X: eval_pwa_batch(obj, X)
    else:
        dim, fn = obj.dim, lambda X: obj.values(X).reshape(-1, 1)
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    box = _box(args.box, dim)
    lo, hi = box.as_box()
    axes = [np.linspace(a, b, args.grid) for a, b in zip(lo, hi)]
    X = np.array(list(itertools.product(*axes)))
    Y = fn(X)
    names = ["x"] if dim == 1 else [f"x{i + 1}" for i in range(dim)]
    outs = ["f"] if Y.shape[1] == 1 else [f"f{i + 1}" for i in range(Y.shape[1])]
    lines = [",".join(names + outs)]
    lines += [",".join(f"{v:.12g}" for v in np.concatenate([x, y])) for x, y in zip(X, Y)]
    _write_atomic(args.output, "\n".join(lines) + "\n")


def build_parser():
    p = _Parser(prog="relu-pwa", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("net2pwa", help="explicit PWA function of a network")
    s.add_argument("net")
    s.add_argument("--box", default="-10,10")
    s.add_argument("--mode", choices=["exact", "sample"], default="exact")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_net2pwa)

    s = sub.add_parser("pwa2net", help="ReLU network from a PWA, max-affine or DC-pair file")
    s.add_argument("input")
    s.add_argument("--box", required=True)
    s.add_argument("--dc", action="store_true", help="decompose a 1-D function first")
    s.add_argument("--pad", action="store_true", help="pad to exactly one layer per piece")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_pwa2net)

    s = sub.add_parser("pwa2mplp", help="multiparametric LP reproducing a function")
    s.add_argument("input")
    s.add_argument("--box")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_pwa2mplp)

    s = sub.add_parser("bounds", help="region-count bounds for an architecture")
    s.add_argument("--arch", required=True, help="n0:n1,...,nL")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("verify", help="cross-check a network, PWA function and mp-LP")
    s.add_argument("--net")
    s.add_argument("--pwa")
    s.add_argument("--mplp")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--tol", type=float, default=1e-7)
    s.add_argument("--seed", type=int, default=42)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("eval", help="evaluate a network or function at one point")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--net")
    g.add_argument("--pwa")
    s.add_argument("--at", required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("plotdata", help="grid samples as CSV")
    s.add_argument("input")
    s.add_argument("--box", required=True)
    s.add_argument("--grid", type=int, default=101)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_plotdata)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except VerificationFailed as exc:
        _report("VerificationFailed", exc)
        return 1
    except (UsageError, NetFormatError, PWAFormatError, MpLPFormatError, HypothesisError,
            DomainError, ValueError, OSError) as exc:
        _report(type(exc).__name__, exc)
        return 2
    except (RegionCapExceeded, MpLPError) as exc:
        _report(type(exc).__name__, exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
