"""Command-line front end.

Subcommands: roots | phi | osc | curv | cap | localize | scan | cheese.
Every run prints a one-line JSON summary to stdout and exits 0 on
success, 1 on domain errors (ellipticity, geometry, resolution), 2 on
usage or I/O format errors.  Reports embed the resolved configuration.
"""

import argparse
from dataclasses import dataclass, field
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .errors import EcapError, UsageError
from .grids import GridFunction
from .localization import (build_partition, c0_by_parts, laurent_coeffs,
                           localized_pieces, piece_density)
from .masks import CompactSetMask, make_swiss_cheese
from .menger import (capacity_lower_bound, curvature_energy, load_points_csv)
from .operators import grad_phi, new_operator, phi
from .oscillation import Disc, l_oscillation, oscillation_via_psi
from .scan import capacity_interval, criterion_scan, ratio_heatmap_svg

# complex literal: optional sign, decimal real part, then either an 'i'
# suffix (pure imaginary) or an optional signed imaginary part with 'i'
_NUM = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^({_NUM})(?:(i)|({_NUM})i)?$")


def parse_complex(text: str) -> complex:
    """Whitespace-free literal like 1, -0.5, 2+3i, 1-0.25i, or 0.5i."""
    m = _COMPLEX_RE.match(text)
    if not m:
        raise UsageError(f"bad complex literal {text!r}")
    first, pure_i, imag = m.groups()
    if pure_i:
        return complex(0.0, float(first))
    return complex(float(first), float(imag) if imag else 0.0)


def parse_op_spec(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"operator spec needs three literals, got {text!r}")
    return tuple(parse_complex(p) for p in parts)


def parse_point(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"point needs two coordinates, got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise UsageError(f"bad point {text!r}") from exc


def parse_reals(text: str):
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _cnum(z: complex):
    return [z.real, z.imag]


@dataclass
class RunConfig:
    """Resolved invocation: embedded verbatim in every report."""
    command: str
    op_spec: str | None = None
    inputs: tuple = ()
    out: str | None = None
    threads: int = 1
    params: dict = field(default_factory=dict)

    def validate(self):
        for path in self.inputs:
            if not os.path.exists(path):
                raise UsageError(f"input path does not exist: {path}")
        if self.threads < 1:
            raise UsageError("thread count must be >= 1")
        if self.out:
            parent = os.path.dirname(os.path.abspath(self.out)) or "."
            if not os.path.isdir(parent):
                raise UsageError(f"output directory missing: {parent}")
        return self

    def to_dict(self) -> dict:
        d = {"command": self.command, "threads": self.threads,
             "version": __version__}
        if self.op_spec:
            d["op"] = self.op_spec
        if self.inputs:
            d["inputs"] = list(self.inputs)
        if self.out:
            d["out"] = self.out
        d.update({k: v for k, v in self.params.items() if v is not None})
        return d


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return args.threads
    env = os.environ.get("ECAP_THREADS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"bad ECAP_THREADS value {env!r}") from exc
    return 1


def _emit(payload: dict):
    sys.stdout.write(json.dumps(payload, sort_keys=True,
                                separators=(",", ":")) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    p = _Parser(prog="ecap", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: ECAP_THREADS or 1)")
        return sp

    sp = add("roots", "characteristic roots and kernel constants")
    sp.add_argument("--op", required=True, help='e.g. "1,0,1"')

    sp = add("phi", "fundamental solution at points")
    sp.add_argument("--op", required=True)
    sp.add_argument("--at", required=True, action="append",
                    help='point "x1,x2"; repeatable')

    sp = add("osc", "operator oscillation of f over a disc")
    sp.add_argument("--op", required=True)
    sp.add_argument("--f", required=True, help="grid function JSON")
    sp.add_argument("--center", required=True, help='"x1,x2"')
    sp.add_argument("--radius", required=True, type=float)
    sp.add_argument("--check", action="store_true",
                    help="also run the quadrature cross-check route")

    sp = add("curv", "triple-point curvature energy of a point cloud")
    sp.add_argument("--in", dest="infile", required=True,
                    help="CSV of x,y[,weight]")

    sp = add("cap", "capacity lower bound of a point cloud")
    sp.add_argument("--in", dest="infile", required=True)

    sp = add("localize", "split f into localized pieces, emit coefficients")
    sp.add_argument("--op", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--delta", required=True, type=float)
    sp.add_argument("--bbox", default=None,
                    help='"x1min,x2min,x1max,x2max" (default: grid box '
                         "shrunk by 4 cells)")
    sp.add_argument("--out", required=True, help="output directory")

    sp = add("scan", "oscillation-vs-capacity criterion sweep")
    sp.add_argument("--op", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--mask", required=True, help="compact set PGM")
    sp.add_argument("--radii", required=True, help='"0.125,0.25"')
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--centers", default=None,
                    help='semicolon-separated points "x,y;x,y" '
                         "(default: probe lattice)")
    sp.add_argument("--out", required=True, help="report JSON path")
    sp.add_argument("--svg", default=None, help="heatmap SVG path")

    sp = add("cheese", "seeded disc-minus-discs test set")
    sp.add_argument("--seed", required=True, type=int)
    sp.add_argument("--holes", required=True, type=int)
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--center", default="0,0")
    sp.add_argument("--hole-scale", type=float, default=0.1)
    sp.add_argument("--spacing", type=float, default=None)
    sp.add_argument("--out", required=True, help="PGM path")
    return p


# -- subcommand bodies -------------------------------------------------

def _cmd_roots(args, cfg: RunConfig) -> dict:
    op = new_operator(*parse_op_spec(args.op))
    return {"lambda1": _cnum(op.lambda1), "lambda2": _cnum(op.lambda2),
            "nu": op.nu, "repeated": op.repeated, "k1": _cnum(op.k1),
            "config": cfg.to_dict()}


def _cmd_phi(args, cfg: RunConfig) -> dict:
    op = new_operator(*parse_op_spec(args.op))
    out = []
    for spec in args.at:
        z = parse_point(spec)
        g1, g2 = grad_phi(op, z)
        out.append({"at": _cnum(z), "phi": _cnum(phi(op, z)),
                    "cgrad": [_cnum(complex(g1)), _cnum(complex(g2))]})
    return {"points": out, "config": cfg.to_dict()}


def _cmd_osc(args, cfg: RunConfig) -> dict:
    op = new_operator(*parse_op_spec(args.op))
    f = GridFunction.load(args.f)
    b = Disc(parse_point(args.center), args.radius)
    osc = l_oscillation(op, f, b)
    out = {"oscillation": _cnum(osc), "config": cfg.to_dict()}
    if args.check:
        if f.grad1 is None:
            f = f.fill_gradients(order=4)
        other = oscillation_via_psi(op, f, b)
        out["oscillation_check"] = _cnum(other)
        out["route_gap"] = abs(osc - other)
    return out


def _cmd_curv(args, cfg: RunConfig) -> dict:
    mu = load_points_csv(args.infile)
    energy = curvature_energy(mu, threads=cfg.threads)
    return {"energy": energy, "n_points": int(mu.points.size),
            "mass": mu.mass, "config": cfg.to_dict()}


def _cmd_cap(args, cfg: RunConfig) -> dict:
    mu = load_points_csv(args.infile)
    bound = capacity_lower_bound(mu, threads=cfg.threads)
    return {"lower_bound": bound.value, "t_star": bound.t_star,
            "mass": bound.mass, "growth_constant": bound.growth_constant,
            "curvature_energy": bound.curvature_energy,
            "caveat": bound.caveat, "config": cfg.to_dict()}


def _cmd_localize(args, cfg: RunConfig) -> dict:
    op = new_operator(*parse_op_spec(args.op))
    f = GridFunction.load(args.f)
    if f.grad1 is None:
        f = f.fill_gradients(order=4)
    if args.bbox:
        vals = parse_reals(args.bbox)
        if len(vals) != 4:
            raise UsageError("bbox needs four numbers")
        bbox = vals
    else:
        pad = 4 * f.spacing
        bbox = (f.origin.real + pad, f.origin.imag + pad,
                f.xmax - pad, f.ymax - pad)
    part = build_partition(bbox, args.delta, spacing=f.spacing)
    pieces = localized_pieces(op, f, part)
    os.makedirs(args.out, exist_ok=True)
    rows = []
    n_nonzero = 0
    for cell, piece in zip(part.cells, pieces):
        if piece.zero:
            c0 = c11 = c12 = 0j
        else:
            dens = piece_density(op, f, part, cell)
            co = laurent_coeffs(op, dens, cell.center, m_max=1)
            c0, (c11, c12) = co.c0, co.c1s
            piece.f.save(os.path.join(
                args.out, f"piece_{cell.j1}_{cell.j2}.json"))
            n_nonzero += 1
        rows.append((cell.j1, cell.j2, c0, c11, c12))
    csv_path = os.path.join(args.out, "coefficients.csv")
    with open(csv_path, "w") as fh:
        fh.write("j1,j2,re_c0,im_c0,re_c11,im_c11,re_c12,im_c12\n")
        for j1, j2, c0, c11, c12 in rows:
            fh.write(f"{j1},{j2},{c0.real!r},{c0.imag!r},"
                     f"{c11.real!r},{c11.imag!r},"
                     f"{c12.real!r},{c12.imag!r}\n")
    return {"n_cells": len(part.cells), "n_nonzero": n_nonzero,
            "delta": args.delta, "coefficients": csv_path,
            "out": args.out, "config": cfg.to_dict()}


def _cmd_scan(args, cfg: RunConfig) -> dict:
    op = new_operator(*parse_op_spec(args.op))
    f = GridFunction.load(args.f)
    if f.grad1 is None:
        f = f.fill_gradients(order=4)
    mask = CompactSetMask.load_pgm(args.mask)
    radii = parse_reals(args.radii)
    centers = None
    if args.centers:
        centers = [parse_point(p) for p in args.centers.split(";")]
    report = criterion_scan(op, f, mask, radii, k=args.k, centers=centers,
                            function_id=os.path.basename(args.f),
                            threads=cfg.threads, config=cfg.to_dict())
    with open(args.out, "w") as fh:
        fh.write(report.to_json() + "\n")
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(ratio_heatmap_svg(report))
    return {"report": args.out, "svg": args.svg,
            "summary": report.summary, "config": cfg.to_dict()}


def _cmd_cheese(args, cfg: RunConfig) -> dict:
    if not args.out.endswith(".pgm"):
        raise UsageError("cheese output must be a .pgm path")
    cheese = make_swiss_cheese(args.seed, Disc(parse_point(args.center),
                                               args.radius),
                               args.holes, args.hole_scale,
                               spacing=args.spacing)
    cheese.save_pgm(args.out)
    return {"out": args.out, "sidecar": args.out + ".json",
            "n_holes": len(cheese.holes),
            "occupied_cells": int(cheese.mask.sum()),
            "spacing": cheese.spacing, "config": cfg.to_dict()}


_COMMANDS = {"roots": _cmd_roots, "phi": _cmd_phi, "osc": _cmd_osc,
             "curv": _cmd_curv, "cap": _cmd_cap, "localize": _cmd_localize,
             "scan": _cmd_scan, "cheese": _cmd_cheese}

_INPUT_ATTRS = ("f", "infile", "mask")


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        inputs = tuple(getattr(args, a) for a in _INPUT_ATTRS
                       if getattr(args, a, None))
        params = {k: v for k, v in vars(args).items()
                  if k not in ("command", "threads") and v is not None
                  and not callable(v)}
        cfg = RunConfig(command=args.command,
                        op_spec=getattr(args, "op", None),
                        inputs=inputs,
                        out=getattr(args, "out", None),
                        threads=_resolve_threads(args),
                        params=params).validate()
        _emit(_COMMANDS[args.command](args, cfg))
        return 0
    except UsageError as exc:
        parser.print_help(sys.stderr)
        sys.stderr.write(f"\nerror: {exc}\n")
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except EcapError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
