"""Capacity intervals for disc-minus-set regions and the oscillation
criterion scanner.

The scanner sweeps a family of discs B(a, r), compares the operator
oscillation of f on each disc against omega(grad f, r) times a capacity
interval for B(a, kr) \\ X, and reports ratio trends.  It never emits a
boolean verdict: the criterion quantifies over all discs and the capacity
is computable only up to absolute constants, so trends plus an explicit
constants-unknown caveat are the honest output.
"""

from dataclasses import dataclass, field
import json
import logging
import math

import numpy as np
import scipy.spatial
import skimage.measure

from .errors import DiscOutsideGrid, RasterTooCoarse
from .grids import GridFunction
from .masks import CompactSetMask
from .menger import CAPACITY_CAVEAT, DiscreteMeasure, capacity_lower_bound
from .operators import EllipticOperator
from .oscillation import (Disc, interp_noise_floor, l_oscillation,
                          modulus_of_continuity)

log = logging.getLogger("ecap.scan")

REPORT_SCHEMA = "ecap-report/1"

# Engineering defaults where the theory gives existence-only constants;
# carried in report metadata so downstream readers see them.
CONSTANT_DEFAULTS = {"k2": 2.0, "k4": 8.0}

MIN_CURVE_SAMPLES = 64
MAX_CURVE_SAMPLES = 384

_CONSTANTS_CAVEAT = (CAPACITY_CAVEAT + "; scan ratios inherit that slack "
                     "and carry no proof-grade meaning")


def region_in_disc(x: CompactSetMask, disc: Disc) -> CompactSetMask:
    """Raster of B(a, r) \\ X on a window of X's frame.

    The window is the disc's bounding box padded by two cells, so boundary
    curves of the region never touch the raster frame.
    """
    h = x.spacing
    lo = disc.center - disc.radius * (1 + 1j)
    hi = disc.center + disc.radius * (1 + 1j)
    j0 = math.floor((lo.real - x.origin.real) / h) - 2
    j1 = math.ceil((hi.real - x.origin.real) / h) + 3
    i0 = math.floor((lo.imag - x.origin.imag) / h) - 2
    i1 = math.ceil((hi.imag - x.origin.imag) / h) + 3
    if i0 < 0 or j0 < 0 or i1 > x.ny or j1 > x.nx:
        raise DiscOutsideGrid(
            f"disc B({disc.center}, {disc.radius}) leaves the mask frame")
    window = x.mask[i0:i1, j0:j1]
    origin = x.origin + j0 * h + 1j * i0 * h
    xs = origin.real + np.arange(j1 - j0) * h
    ys = origin.imag + np.arange(i1 - i0) * h
    pts = xs[None, :] + 1j * ys[:, None]
    region = (np.abs(pts - disc.center) <= disc.radius) & ~window
    return CompactSetMask(origin, h, region)


def boundary_measure(region: CompactSetMask) -> DiscreteMeasure | None:
    """Arclength-weighted samples of the region's boundary curves.

    Each connected boundary curve is traced at sub-cell resolution and
    resampled arclength-uniformly with at least MIN_CURVE_SAMPLES points,
    one point per ~4 cells of arclength, capped per curve.  Returns None
    for an empty region.
    """
    if not region.mask.any():
        return None
    h = region.spacing
    contours = skimage.measure.find_contours(region.mask.astype(float), 0.5)
    pts = []
    wts = []
    for curve in contours:
        z = (region.origin + curve[:, 1] * h + 1j * curve[:, 0] * h)
        ds = np.abs(np.diff(z))
        total = float(ds.sum())
        if total == 0.0:
            continue
        s = np.concatenate([[0.0], np.cumsum(ds)])
        n = max(MIN_CURVE_SAMPLES,
                min(MAX_CURVE_SAMPLES, math.ceil(total / (4 * h))))
        targets = (np.arange(n) + 0.5) * total / n
        pts.append(np.interp(targets, s, z.real)
                   + 1j * np.interp(targets, s, z.imag))
        wts.append(np.full(n, total / n))
    if not pts:
        return None
    return DiscreteMeasure(np.concatenate(pts), np.concatenate(wts))


@dataclass(frozen=True)
class CapacityInterval:
    lower: float
    upper: float
    n_samples: int = 0
    caveat: str = _CONSTANTS_CAVEAT

    def __iter__(self):
        return iter((self.lower, self.upper))


def _diameter(points: np.ndarray) -> float:
    """Max pairwise distance of a complex point cloud."""
    if points.size <= 1:
        return 0.0
    if points.size > 16:
        xy = np.column_stack([points.real, points.imag])
        try:
            hull = scipy.spatial.ConvexHull(xy)
            points = points[hull.vertices]
        except scipy.spatial.QhullError:
            pass    # collinear cloud: fall through to pairwise
    d = np.abs(points[:, None] - points[None, :])
    return float(d.max())


def capacity_interval(op: EllipticOperator, region: CompactSetMask,
                      threads: int | None = None) -> CapacityInterval:
    """Two-sided capacity estimate (lower, upper) for a raster region.

    Lower: curvature-based bound on an arclength-weighted boundary sample
    (operator-independent; the coefficients enter only through unknown
    comparability constants, hence the caveat).  Upper: the diameter of
    the occupied cells, corners included.  Empty region gives (0, 0).
    """
    if not region.mask.any():
        return CapacityInterval(0.0, 0.0, 0)
    h = region.spacing
    occupied = region.points()[region.mask]
    upper = _diameter(occupied) + h * math.sqrt(2.0)
    mu = boundary_measure(region)
    bound = capacity_lower_bound(mu, threads=threads)
    lower = bound.value
    if lower > upper:
        log.warning("capacity lower bound %.3g above upper %.3g; clamping",
                    lower, upper)
        lower = upper
    return CapacityInterval(lower, upper, mu.points.size)


@dataclass(frozen=True)
class DiscRecord:
    center: complex
    radius: float
    oscillation: complex
    omega: float
    cap_lower: float
    cap_upper: float
    ratio_lower: float     # |O| / (omega * cap_lower), the optimistic ratio
    ratio_upper: float     # |O| / (omega * cap_upper), the conservative one
    infinite: bool

    def to_dict(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "oscillation": [self.oscillation.real, self.oscillation.imag],
            "omega": self.omega,
            "cap_lower": self.cap_lower,
            "cap_upper": self.cap_upper,
            "ratio_lower": _json_real(self.ratio_lower),
            "ratio_upper": _json_real(self.ratio_upper),
            "infinite": self.infinite,
        }


@dataclass(frozen=True)
class CriterionReport:
    operator: EllipticOperator
    function_id: str
    k: float
    radii: tuple
    centers: tuple
    records: tuple
    max_ratio_by_radius: tuple     # (radius, finite max ratio_lower, n_inf)
    summary: dict
    config: dict = field(default_factory=dict)
    caveat: str = _CONSTANTS_CAVEAT

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "kind": "criterion-scan",
            "operator": [[c.real, c.imag] for c in
                         (self.operator.c11, self.operator.c12,
                          self.operator.c22)],
            "function_id": self.function_id,
            "k": self.k,
            "radii": list(self.radii),
            "centers": [[c.real, c.imag] for c in self.centers],
            "records": [r.to_dict() for r in self.records],
            "max_ratio_by_radius": [
                {"radius": r, "max_ratio": _json_real(m), "n_infinite": n}
                for r, m, n in self.max_ratio_by_radius],
            "summary": self.summary,
            "constants": dict(CONSTANT_DEFAULTS),
            "config": self.config,
            "caveat": self.caveat,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True,
                          separators=(",", ":"))


def _json_real(v: float):
    if math.isinf(v):
        return "inf"
    return v


def _ratio(num: float, den: float, tol: float):
    """(ratio, infinite_flag) with a noise floor on the numerator."""
    if num <= tol:
        return 0.0, False
    if den <= 0.0:
        return math.inf, True
    return num / den, False


def default_centers(x: CompactSetMask, n: int = 3) -> tuple:
    """Deterministic n x n probe lattice over the occupied bounding box,
    snapped to occupied cell centers."""
    pts = x.points()
    occ = pts[x.mask]
    out = []
    for t1 in np.linspace(0.25, 0.75, n):
        for t2 in np.linspace(0.25, 0.75, n):
            target = (occ.real.min() + t1 * (occ.real.max() - occ.real.min())
                      + 1j * (occ.imag.min()
                              + t2 * (occ.imag.max() - occ.imag.min())))
            z = occ[np.argmin(np.abs(occ - target))]
            if z not in out:
                out.append(z)
    return tuple(sorted(out, key=lambda z: (z.real, z.imag)))


def criterion_scan(op: EllipticOperator, f: GridFunction, x: CompactSetMask,
                   radii, k: float = 1.0, centers=None,
                   function_id: str = "grid-function",
                   threads: int | None = None,
                   config: dict | None = None) -> CriterionReport:
    """Oscillation-versus-capacity sweep over discs B(a, r), a in centers.

    For each disc: the operator oscillation of f, omega(grad f, r), and a
    capacity interval for B(a, kr) \\ X.  Ratios treat oscillations under
    the interpolation noise floor as zero, so near-cancelling numerators
    never raise the infinite flag; a genuinely nonzero oscillation against
    an empty region does.
    """
    if k < 1.0:
        raise ValueError("k must be >= 1")
    radii = tuple(sorted(float(r) for r in radii))
    if not radii or radii[0] <= 0:
        raise ValueError("radii must be positive")
    if x.spacing > radii[0] / 32 * (1 + 1e-12):
        raise RasterTooCoarse(
            f"mask spacing {x.spacing:.4g} exceeds r_min/32 = "
            f"{radii[0] / 32:.4g}")
    if centers is None:
        centers = default_centers(x)
    centers = tuple(sorted((complex(c) for c in centers),
                           key=lambda z: (z.real, z.imag)))
    tol = interp_noise_floor(op, f)
    omega_by_radius = {r: modulus_of_continuity(f, r) for r in radii}
    records = []
    for a in centers:
        for r in radii:
            osc = l_oscillation(op, f, Disc(a, r))
            omega = omega_by_radius[r]
            cap = capacity_interval(op, region_in_disc(x, Disc(a, k * r)),
                                    threads=threads)
            rl, inf_l = _ratio(abs(osc), omega * cap.lower, tol)
            ru, inf_u = _ratio(abs(osc), omega * cap.upper, tol)
            records.append(DiscRecord(a, r, osc, omega, cap.lower, cap.upper,
                                      rl, ru, inf_l or inf_u))
    by_radius = []
    for r in radii:
        rs = [rec for rec in records if rec.radius == r]
        finite = [rec.ratio_lower for rec in rs
                  if not math.isinf(rec.ratio_lower)]
        by_radius.append((r, max(finite) if finite else 0.0,
                          sum(rec.infinite for rec in rs)))
    finite_all = [rec.ratio_lower for rec in records
                  if not math.isinf(rec.ratio_lower)]
    summary = {
        "n_records": len(records),
        "n_infinite": sum(rec.infinite for rec in records),
        "max_ratio": max(finite_all) if finite_all else 0.0,
        "median_ratio": float(np.median(finite_all)) if finite_all else 0.0,
        "max_oscillation": max(abs(rec.oscillation) for rec in records),
    }
    return CriterionReport(op, function_id, k, radii, centers,
                           tuple(records), tuple(by_radius), summary,
                           config or {})


# -- SVG heatmap -------------------------------------------------------

_INF_COLOR = "#c510c5"


def _cell_color(value: float, lo: float, hi: float) -> str:
    """Log-scale ramp from pale blue to deep red; gray for zero."""
    if math.isinf(value):
        return _INF_COLOR
    if value <= 0.0:
        return "#d8d8d8"
    t = 0.0 if hi <= lo else (math.log10(value) - math.log10(lo)) \
        / (math.log10(hi) - math.log10(lo))
    t = min(1.0, max(0.0, t))
    r = round(40 + 215 * t)
    g = round(80 * (1 - t))
    b = round(220 * (1 - t) + 30)
    return f"#{r:02x}{g:02x}{b:02x}"


def ratio_heatmap_svg(report: CriterionReport) -> str:
    """Standalone SVG: centers down the side, radii across, one cell per
    (center, radius) colored by ratio_lower.  Byte-deterministic."""
    cw, ch, mx, my = 72, 24, 150, 40
    nr, nc = len(report.centers), len(report.radii)
    width, height = mx + nc * cw + 20, my + nr * ch + 30
    lut = {(rec.center, rec.radius): rec for rec in report.records}
    finite = [rec.ratio_lower for rec in report.records
              if not math.isinf(rec.ratio_lower) and rec.ratio_lower > 0]
    lo = min(finite) if finite else 1.0
    hi = max(finite) if finite else 1.0
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{mx}" y="16" font-family="monospace" font-size="12">'
        f'max |O| / (omega cap_lower), k={report.k:.4g}</text>',
    ]
    for j, r in enumerate(report.radii):
        out.append(f'<text x="{mx + j * cw + 4}" y="{my - 6}" '
                   f'font-family="monospace" font-size="10">r={r:.4g}</text>')
    for i, a in enumerate(report.centers):
        y = my + i * ch
        out.append(f'<text x="4" y="{y + 16}" font-family="monospace" '
                   f'font-size="10">a=({a.real:.3g},{a.imag:.3g})</text>')
        for j, r in enumerate(report.radii):
            rec = lut[(a, r)]
            col = _cell_color(rec.ratio_lower, lo, hi)
            label = ("inf" if math.isinf(rec.ratio_lower)
                     else f"{rec.ratio_lower:.2g}")
            out.append(f'<rect x="{mx + j * cw}" y="{y}" width="{cw - 2}" '
                       f'height="{ch - 2}" fill="{col}"/>')
            out.append(f'<text x="{mx + j * cw + 4}" y="{y + 16}" '
                       f'font-family="monospace" font-size="10" '
                       f'fill="#ffffff">{label}</text>')
    out.append(f'<text x="4" y="{height - 8}" font-family="monospace" '
               f'font-size="9">{report.caveat}</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"
