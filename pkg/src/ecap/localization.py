"""Localization of L-singularities by partitions of unity.

Builds delta-lattice partitions, smoothed indices psi_j (two mollifier
convolutions), localized pieces f_j = Phi * (psi_j . L f), Laurent-type
far-field coefficients of compactly supported densities, and fitted
far-field decay exponents.

All convolutions are discrete on the shared grid; the kernel table for
Phi is built once per (operator, frame) and sliced per cell.
"""

from dataclasses import dataclass
import functools
import math

import numpy as np
import scipy.signal
import scipy.stats

from .errors import (AnnulusInsideSupport, BoxTooSmall, CoverageGap,
                     MissingGradients, SupportLeak)
from .grids import GridFunction
from .menger import DiscreteMeasure
from .operators import (EllipticOperator, apply_L, coords, derivation_coeffs,
                        grad_phi, phi_field)
from .oscillation import Disc

MOLLIFIER_SPAN = 16     # default samples per delta across the bump
ALIGN_TOL = 1e-6        # grids must share a lattice to this fraction of h


def _bump(rho2):
    # (1 - |u|^2)^2 on the unit disc, clamped outside
    return np.square(np.maximum(1.0 - rho2, 0.0))


def mollifier(delta: float, spacing: float | None = None) -> GridFunction:
    """Even C^1 bump phi_delta with unit mass, sampled on its own frame.

    The continuum normalization of (1 - |x|^2)^2 on B(0,1) is 3/pi; the
    samples are then rescaled so the grid mass is exactly 1, which keeps
    the discrete partition identities exact in floating point.  The
    rescaling factor is 1 + O((h/delta)^3).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    h = delta / MOLLIFIER_SPAN if spacing is None else spacing
    half = int(math.ceil(delta / h - 1e-12))
    n = 2 * half + 1
    u = (np.arange(n) - half) * h / delta
    rho2 = u[None, :] ** 2 + u[:, None] ** 2
    vals = (3.0 / math.pi) * _bump(rho2) / delta ** 2
    vals /= vals.sum() * h * h
    origin = -half * h * (1 + 1j)
    return GridFunction(origin, h, n, n, vals.astype(complex))


@dataclass(frozen=True)
class PartitionCell:
    """One lattice cell: raw bump phi_j and smoothed index psi_j.

    Windows are stored cropped; (i0, j0) is the upper-left corner of the
    phi window in the partition frame, (psi_i0, psi_j0) that of psi.
    """
    j1: int
    j2: int
    center: complex
    i0: int
    j0: int
    phi: np.ndarray
    psi_i0: int
    psi_j0: int
    psi: np.ndarray


@dataclass(frozen=True)
class PartitionOfUnity:
    delta: float
    spacing: float
    origin: complex
    nx: int
    ny: int
    cells: tuple
    a_grad_phi: float   # max_j delta * ||grad phi_j||, finite-difference
    a_grad_psi: float

    def frame(self):
        return self.origin, self.spacing, self.nx, self.ny

    def _accumulate(self, which: str) -> np.ndarray:
        out = np.zeros((self.ny, self.nx))
        for c in self.cells:
            if which == "phi":
                w, i0, j0 = c.phi, c.i0, c.j0
            else:
                w, i0, j0 = c.psi, c.psi_i0, c.psi_j0
            out[i0:i0 + w.shape[0], j0:j0 + w.shape[1]] += w
        return out

    def sum_phi(self) -> np.ndarray:
        return self._accumulate("phi")

    def sum_psi(self) -> np.ndarray:
        return self._accumulate("psi")

    def psi_function(self, cell: PartitionCell) -> GridFunction:
        """psi_j as a standalone GridFunction (zero pad ring, with
        gradients), aligned to the partition frame.

        Gradients use the 5-point stencil: the by-parts pairings need
        them resolved well past the h^2 floor of the 3-point one.
        """
        pad = np.zeros((cell.psi.shape[0] + 4, cell.psi.shape[1] + 4),
                       dtype=complex)
        pad[2:-2, 2:-2] = cell.psi
        org = (self.origin
               + (cell.psi_j0 - 2) * self.spacing
               + 1j * (cell.psi_i0 - 2) * self.spacing)
        g = GridFunction(org, self.spacing, pad.shape[1], pad.shape[0], pad)
        return g.fill_gradients(order=4)


def _shepard_denominator(x1, x2, delta):
    """Sum of lattice bumps at (x1 row, x2 col) broadcast arrays.

    On a delta-lattice only the four corners of the containing cell sit
    strictly within delta of a point, so the infinite-lattice sum reduces
    to a closed four-term form in the fractional coordinates.
    """
    t1 = x1 / delta - np.floor(x1 / delta)
    t2 = x2 / delta - np.floor(x2 / delta)
    s = np.zeros(np.broadcast(t1, t2).shape)
    for e1 in (0.0, 1.0):
        for e2 in (0.0, 1.0):
            s += _bump((t1 - e1) ** 2 + (t2 - e2) ** 2)
    return s


def _fd_grad_max(w: np.ndarray, h: float) -> float:
    gy, gx = np.gradient(w, h)
    return float(np.max(np.hypot(gx, gy)))


def build_partition(bbox, delta: float,
                    spacing: float | None = None) -> PartitionOfUnity:
    """Shepard partition of unity on the delta-lattice covering bbox.

    bbox = (x1min, x2min, x1max, x2max).  Bumps are normalized translates
    of (1 - |x|^2)^2; each phi_j is supported in B(a_j, delta) and the
    smoothed psi_j = phi_delta * phi_delta * phi_j in B(a_j, 3 delta).
    The frame extends bbox by 4 delta so every psi window fits.
    """
    x1min, x2min, x1max, x2max = map(float, bbox)
    if x1max <= x1min or x2max <= x2min:
        raise BoxTooSmall("empty bbox")
    if min(x1max - x1min, x2max - x2min) < 4 * delta - 1e-12:
        raise BoxTooSmall("bbox side must be at least 4 delta")
    h = delta / MOLLIFIER_SPAN if spacing is None else spacing
    w_cells = int(round(delta / h))
    if w_cells < 4 or abs(delta - w_cells * h) > 1e-9 * delta:
        raise ValueError("spacing must divide delta, at least 4 per delta")

    eps = 1e-9 * delta
    j1_lo = math.ceil((x1min - delta + eps) / delta)
    j1_hi = math.floor((x1max + delta - eps) / delta)
    j2_lo = math.ceil((x2min - delta + eps) / delta)
    j2_hi = math.floor((x2max + delta - eps) / delta)

    origin = (j1_lo - 3) * delta + 1j * (j2_lo - 3) * delta
    nx = (j1_hi - j1_lo + 6) * w_cells + 1
    ny = (j2_hi - j2_lo + 6) * w_cells + 1

    xs = origin.real + np.arange(nx) * h
    ys = origin.imag + np.arange(ny) * h
    denom = _shepard_denominator(ys[:, None], xs[None, :], delta)

    md = mollifier(delta, h).values.real
    off = (np.arange(2 * w_cells + 1) - w_cells) * h
    rho2_loc = (off[None, :] ** 2 + off[:, None] ** 2) / delta ** 2
    w_raw = _bump(rho2_loc)

    psi_off = (np.arange(6 * w_cells + 1) - 3 * w_cells) * h
    psi_rho2 = psi_off[None, :] ** 2 + psi_off[:, None] ** 2
    psi_outside = psi_rho2 > (3 * delta) ** 2 * (1 + 1e-12)

    cells = []
    a_phi = 0.0
    a_psi = 0.0
    for j1 in range(j1_lo, j1_hi + 1):
        for j2 in range(j2_lo, j2_hi + 1):
            cj = (j1 - j1_lo + 3) * w_cells   # column of the center
            ci = (j2 - j2_lo + 3) * w_cells
            i0, j0 = ci - w_cells, cj - w_cells
            sl = (slice(i0, i0 + 2 * w_cells + 1),
                  slice(j0, j0 + 2 * w_cells + 1))
            phi_w = w_raw / denom[sl]
            psi_w = scipy.signal.fftconvolve(phi_w, md) * h * h
            psi_w = scipy.signal.fftconvolve(psi_w, md) * h * h
            psi_w[psi_outside] = 0.0    # strip fft roundoff off-support
            np.maximum(psi_w, 0.0, out=psi_w)
            cells.append(PartitionCell(
                j1, j2, j1 * delta + 1j * j2 * delta, i0, j0, phi_w,
                i0 - 2 * w_cells, j0 - 2 * w_cells, psi_w))
            a_phi = max(a_phi, delta * _fd_grad_max(phi_w, h))
            a_psi = max(a_psi, delta * _fd_grad_max(psi_w, h))
    return PartitionOfUnity(delta, h, origin, nx, ny, tuple(cells),
                            a_phi, a_psi)


# -- grid convolution with the fundamental solution -------------------------

@functools.lru_cache(maxsize=4)
def _phi_kernel(op: EllipticOperator, spacing: float, ny: int, nx: int):
    """Phi sampled on the full offset table of an (ny, nx) frame.

    The singular cell at offset zero takes the mean over a 4x4 sub-cell
    refinement (kernel at sub-cell centers), the rest are cell-center
    samples.
    """
    dx = (np.arange(2 * nx - 1) - (nx - 1)) * spacing
    dy = (np.arange(2 * ny - 1) - (ny - 1)) * spacing
    k = phi_field(op, dx[None, :] + 1j * dy[:, None])
    sub = (np.arange(4) + 0.5) / 4.0 - 0.5
    sz = spacing * (sub[None, :] + 1j * sub[:, None])
    k[ny - 1, nx - 1] = np.mean(phi_field(op, sz))
    return k


def _convolve_phi(op, like: GridFunction, density: np.ndarray,
                  i0: int, j0: int) -> np.ndarray:
    """h^2 sum_s Phi(x_o - x_s) density(s), output on the whole frame.

    density is a cropped window anchored at (i0, j0) of the frame; the
    kernel table is sliced so a 'valid' FFT convolution lands exactly on
    the frame indices.
    """
    ny, nx = like.ny, like.nx
    wh, ww = density.shape
    k = _phi_kernel(op, like.spacing, ny, nx)
    block = k[ny - i0 - wh:2 * ny - 1 - i0, nx - j0 - ww:2 * nx - 1 - j0]
    out = scipy.signal.fftconvolve(block, density, mode="valid")
    return out * like.spacing ** 2


def _nonzero_window(a: np.ndarray):
    rows = np.flatnonzero(np.any(a != 0, axis=1))
    cols = np.flatnonzero(np.any(a != 0, axis=0))
    if rows.size == 0:
        return None
    return rows[0], rows[-1] + 1, cols[0], cols[-1] + 1


def vitushkin_localize(op: EllipticOperator, f: GridFunction,
                       phi: GridFunction, support: Disc) -> GridFunction:
    """Phi * (phi . L f) on f's frame.

    phi must live on the same frame as f and vanish (to 1e-12 of its
    peak) outside the declared support disc.
    """
    if (abs(phi.origin - f.origin) > ALIGN_TOL * f.spacing
            or abs(phi.spacing - f.spacing) > 1e-12 * f.spacing
            or phi.values.shape != f.values.shape):
        raise ValueError("phi must be sampled on f's frame")
    pts = f.points()
    scale = float(np.max(np.abs(phi.values)))
    outside = np.abs(pts - support.center) >= support.radius
    if scale > 0 and np.max(np.abs(phi.values[outside])) > 1e-12 * scale:
        raise SupportLeak("bump is nonzero outside its declared disc")
    lf = apply_L(op, f)
    density = phi.values * lf.values
    win = _nonzero_window(density)
    out = np.zeros_like(f.values)
    if win is not None:
        r0, r1, c0, c1 = win
        out = _convolve_phi(op, f, density[r0:r1, c0:c1], r0, c0)
    return GridFunction(f.origin, f.spacing, f.nx, f.ny, out)


@dataclass(frozen=True)
class LocalizedPiece:
    j1: int
    j2: int
    center: complex
    f: GridFunction
    zero: bool


def localized_pieces(op: EllipticOperator, f: GridFunction,
                     partition: PartitionOfUnity) -> list:
    """Pieces f_j = Phi * (psi_j . L f) on f's frame, cell by cell.

    Cells whose smoothed index never meets supp L f come back as exact
    zero grids.  The smoothed indices must sum to 1 on supp L f
    (CoverageGap otherwise), which makes sum_j f_j a discrete identity
    convolution of f.
    """
    h = f.spacing
    if abs(partition.spacing - h) > 1e-12 * h:
        raise ValueError("partition and f use different spacings")
    shift = (partition.origin - f.origin) / h
    di, dj = round(shift.imag), round(shift.real)
    if (abs(shift.real - dj) > ALIGN_TOL or abs(shift.imag - di) > ALIGN_TOL):
        raise ValueError("partition frame is not lattice-aligned with f")

    lf = apply_L(op, f)
    lmax = float(np.max(np.abs(lf.values)))

    cover = np.zeros((f.ny, f.nx))
    windows = []
    for c in partition.cells:
        ri, rj = c.psi_i0 + di, c.psi_j0 + dj
        hh, ww = c.psi.shape
        r0, c0 = max(ri, 0), max(rj, 0)
        r1, c1 = min(ri + hh, f.ny), min(rj + ww, f.nx)
        if r0 >= r1 or c0 >= c1:
            windows.append(None)
            continue
        sub = c.psi[r0 - ri:r1 - ri, c0 - rj:c1 - rj]
        cover[r0:r1, c0:c1] += sub
        windows.append((r0, r1, c0, c1, sub))
    if lmax > 0:
        active = np.abs(lf.values) > 1e-12 * lmax
        gap = float(np.max(np.abs(cover[active] - 1.0))) if active.any() else 0.0
        if gap > 1e-8:
            raise CoverageGap(f"sum psi_j deviates from 1 on supp Lf by {gap:.2e}")

    pieces = []
    for c, win in zip(partition.cells, windows):
        dens = None
        if win is not None:
            r0, r1, c0, c1, sub = win
            dens = sub * lf.values[r0:r1, c0:c1]
            if not np.any(dens):
                dens = None
        if dens is None:
            g = GridFunction(f.origin, h, f.nx, f.ny,
                             np.zeros_like(f.values))
            pieces.append(LocalizedPiece(c.j1, c.j2, c.center, g, True))
            continue
        out = _convolve_phi(op, f, dens, r0, c0)
        g = GridFunction(f.origin, h, f.nx, f.ny, out)
        pieces.append(LocalizedPiece(c.j1, c.j2, c.center, g, False))
    return pieces


def sum_pieces(pieces, like: GridFunction) -> GridFunction:
    total = np.zeros_like(like.values)
    for p in pieces:
        if not p.zero:
            total += p.f.values
    return GridFunction(like.origin, like.spacing, like.nx, like.ny, total)


def piece_density(op: EllipticOperator, f: GridFunction,
                  partition: PartitionOfUnity,
                  cell: PartitionCell) -> GridFunction:
    """psi_j . L f as a standalone grid on the psi window (for pairings)."""
    lf = apply_L(op, f)
    shift = (partition.origin - f.origin) / f.spacing
    di, dj = round(shift.imag), round(shift.real)
    ri, rj = cell.psi_i0 + di, cell.psi_j0 + dj
    hh, ww = cell.psi.shape
    r0, c0 = max(ri, 0), max(rj, 0)
    r1, c1 = min(ri + hh, f.ny), min(rj + ww, f.nx)
    sub = cell.psi[r0 - ri:r1 - ri, c0 - rj:c1 - rj]
    vals = sub * lf.values[r0:r1, c0:c1]
    org = f.origin + c0 * f.spacing + 1j * r0 * f.spacing
    return GridFunction(org, f.spacing, c1 - c0, r1 - r0, vals)


# -- Laurent-type far-field coefficients ------------------------------------

@dataclass(frozen=True)
class PointDistribution:
    """Finitely supported distribution with complex weights."""
    points: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class LaurentCoeffs:
    center: complex
    c0: complex
    c1s: tuple              # (c_1^1, c_1^2)
    higher: tuple           # ((c_m^1, c_m^2) for m = 2..m_max)
    case_tag: str           # "distinct" | "repeated"

    def pair(self, m: int):
        if m == 1:
            return self.c1s
        return self.higher[m - 2]

    @property
    def m_max(self) -> int:
        return 1 + len(self.higher)


def _pairing_data(T, a: complex):
    """(points - a, weights) realizing <T, g> = sum w g(p)."""
    if isinstance(T, GridFunction):
        pts = T.points().ravel() - a
        w = T.values.ravel() * T.spacing ** 2
        keep = w != 0
        return pts[keep], w[keep]
    if isinstance(T, (PointDistribution, DiscreteMeasure)):
        return (np.asarray(T.points, dtype=complex) - a,
                np.asarray(T.weights, dtype=complex))
    raise TypeError("T must be a GridFunction, PointDistribution or "
                    "DiscreteMeasure")


def laurent_coeffs(op: EllipticOperator, T, a: complex,
                   m_max: int = 8) -> LaurentCoeffs:
    """Far-field expansion coefficients of Phi * T around a.

    c0 = <T, 1>.  Distinct roots: c_m^s = -k1 nu^(s-1)/m <T, (w-a)_s^m>.
    Repeated roots: c_m^1 = -k1 <T, (w-a)_1 (w-a)_2^(m-1)> and
    c_m^2 = k1 <T, (w-a)_2^m>, matching the ratio-type basis.
    """
    pts, w = _pairing_data(T, a)
    c = coords(op, pts)
    c0 = complex(np.sum(w))
    out = []
    if op.repeated:
        for m in range(1, m_max + 1):
            cm1 = -op.k1 * complex(np.sum(w * c.z1 * c.z2 ** (m - 1)))
            cm2 = op.k1 * complex(np.sum(w * c.z2 ** m))
            out.append((cm1, cm2))
        tag = "repeated"
    else:
        for m in range(1, m_max + 1):
            cm1 = -op.k1 / m * complex(np.sum(w * c.z1 ** m))
            cm2 = -op.k1 * op.nu / m * complex(np.sum(w * c.z2 ** m))
            out.append((cm1, cm2))
        tag = "distinct"
    return LaurentCoeffs(complex(a), c0, out[0], tuple(out[1:]), tag)


def laurent_series(op: EllipticOperator, co: LaurentCoeffs, z,
                   m_max: int | None = None):
    """Truncated far-field series c0 Phi + sum of basis terms at z."""
    z = np.asarray(z, dtype=complex)
    top = co.m_max if m_max is None else min(m_max, co.m_max)
    d = z - co.center
    c = coords(op, d)
    val = co.c0 * phi_field(op, d)
    for m in range(1, top + 1):
        cm1, cm2 = co.pair(m)
        if op.repeated:
            val = val + cm1 / c.z2 ** m + cm2 * c.z1 / c.z2 ** (m + 1)
        else:
            val = val + cm1 / c.z1 ** m + cm2 / c.z2 ** m
    return val


def laurent_series_cgrad(op: EllipticOperator, co: LaurentCoeffs, z,
                         m_max: int | None = None):
    """Derivation components (d1, d2) of the truncated series at z."""
    z = np.asarray(z, dtype=complex)
    top = co.m_max if m_max is None else min(m_max, co.m_max)
    d = z - co.center
    c = coords(op, d)
    g1, g2 = grad_phi(op, d)
    d1 = co.c0 * g1
    d2 = co.c0 * g2
    for m in range(1, top + 1):
        cm1, cm2 = co.pair(m)
        if op.repeated:
            d1 = d1 + cm2 / c.z2 ** (m + 1)
            d2 = d2 - m * cm1 / c.z2 ** (m + 1) \
                - (m + 1) * cm2 * c.z1 / c.z2 ** (m + 2)
        else:
            d1 = d1 - m * cm1 / c.z1 ** (m + 1)
            d2 = d2 - m * cm2 / c.z2 ** (m + 1)
    return d1, d2


def density_potential(op: EllipticOperator, density):
    """Direct-summation potential of a grid density or point distribution.

    Returns eval(z) -> (value, d1, d2) summing Phi and its derivation
    components over the nonzero samples; exact far-field reference for
    fitted decay checks, no grid extent limits.
    """
    if isinstance(density, GridFunction):
        pts = density.points().ravel()
        w = density.values.ravel() * density.spacing ** 2
    else:
        pts = np.asarray(density.points, dtype=complex).ravel()
        w = np.asarray(density.weights, dtype=complex).ravel()
    keep = w != 0
    pts, w = pts[keep], w[keep]

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        d = z[..., None] - pts
        val = np.sum(w * phi_field(op, d), axis=-1)
        g1, g2 = grad_phi(op, d)
        return val, np.sum(w * g1, axis=-1), np.sum(w * g2, axis=-1)

    return evaluate


# -- by-parts coefficient routes --------------------------------------------

def _canonical_grads(op: EllipticOperator, g: GridFunction):
    if g.grad1 is None or g.grad2 is None:
        raise MissingGradients("gradients are required for by-parts pairings")
    (_, b1), (_, b2) = derivation_coeffs(op)
    return g.grad1 + b1 * g.grad2, g.grad1 + b2 * g.grad2


def _subgrid_slices(outer: GridFunction, inner: GridFunction):
    h = outer.spacing
    if abs(inner.spacing - h) > 1e-12 * h:
        raise ValueError("spacing mismatch")
    shift = (inner.origin - outer.origin) / h
    di, dj = round(shift.imag), round(shift.real)
    if (abs(shift.real - dj) > ALIGN_TOL or abs(shift.imag - di) > ALIGN_TOL):
        raise ValueError("grids are not lattice-aligned")
    if di < 0 or dj < 0 or di + inner.ny > outer.ny or dj + inner.nx > outer.nx:
        raise ValueError("window does not sit inside the outer grid")
    return slice(di, di + inner.ny), slice(dj, dj + inner.nx)


def c0_by_parts(op: EllipticOperator, f: GridFunction,
                psi: GridFunction) -> complex:
    """c0 of the piece by one integration by parts.

    With the derivations d_s = d/dx1 - lambda_s d/dx2 the operator
    factors as c11 d1 d2 (distinct roots) or c11 d1^2 (repeated), so
    c0 = int f L psi = -c11 int (d1 f)(d2 psi)  [distinct]
                     = -c11 int (d1 f)(d1 psi)  [repeated].
    """
    sy, sx = _subgrid_slices(f, psi)
    f1, _ = _canonical_grads(op, f)
    p1, p2 = _canonical_grads(op, psi)
    pd = p1 if op.repeated else p2
    total = np.sum(f1[sy, sx] * pd) * f.spacing ** 2
    return complex(-op.c11 * total)


def c1_by_parts(op: EllipticOperator, f: GridFunction, psi: GridFunction,
                a: complex) -> tuple:
    """(c_1^1, c_1^2) by one integration by parts.

    Moving the outer derivation of the factored operator onto the test
    function psi (w-a)_s and using d_s (w-a)_t = delta_st:

      distinct: c_1^1 =  c11 k1    int (d1 f) [(d2 psi) m1          ]
                c_1^2 =  c11 k1 nu int (d2 f) [(d1 psi) m2          ]
      repeated: c_1^1 =  c11 k1    int (d1 f) [(d1 psi) m1 + psi    ]
                c_1^2 = -c11 k1    int (d1 f) [(d1 psi) m2          ]
    """
    sy, sx = _subgrid_slices(f, psi)
    f1, f2 = _canonical_grads(op, f)
    p1, p2 = _canonical_grads(op, psi)
    m = coords(op, psi.points() - a)
    h2 = f.spacing ** 2
    if op.repeated:
        t1 = np.sum(f1[sy, sx] * (p1 * m.z1 + psi.values)) * h2
        t2 = np.sum(f1[sy, sx] * (p1 * m.z2)) * h2
        return (complex(op.c11 * op.k1 * t1), complex(-op.c11 * op.k1 * t2))
    t1 = np.sum(f1[sy, sx] * (p2 * m.z1)) * h2
    t2 = np.sum(f2[sy, sx] * (p1 * m.z2)) * h2
    return (complex(op.c11 * op.k1 * t1),
            complex(op.c11 * op.k1 * op.nu * t2))


# -- far-field decay --------------------------------------------------------

@dataclass(frozen=True)
class DecaySlope:
    slope: float
    ci95: float
    values: tuple


@dataclass(frozen=True)
class DecayReport:
    center: complex
    radii: tuple
    gradient: DecaySlope          # |grad g|, expect -1 when c0 != 0
    minus_c0: DecaySlope          # |grad (g - c0 Phi)|, expect -2
    minus_first: DecaySlope       # first-order terms removed too, expect -3
    k4: float


def _fit(radii, vals):
    res = scipy.stats.linregress(np.log(radii), np.log(vals))
    n = len(radii)
    ci = float(res.stderr * scipy.stats.t.ppf(0.975, n - 2))
    return DecaySlope(float(res.slope), ci, tuple(float(v) for v in vals))


def farfield_decay_check(op: EllipticOperator, g, co: LaurentCoeffs,
                         r_support: float, k4: float = 8.0,
                         n_annuli: int = 6, n_theta: int = 64,
                         radii=None) -> DecayReport:
    """Fit log-log decay of the potential gradient over dyadic annuli.

    g is either a callable z -> (value, d1, d2) (see density_potential)
    or a GridFunction with gradients.  The three fitted exponents track
    the full gradient, the gradient after removing c0 Phi, and after
    removing the first-order terms as well.
    """
    a = co.center
    if radii is None:
        radii = [k4 * r_support * 2.0 ** (t + 0.5) for t in range(n_annuli)]
    radii = sorted(float(r) for r in radii)
    if radii[0] < k4 * r_support * (1 - 1e-12):
        raise AnnulusInsideSupport(
            f"innermost annulus {radii[0]:g} is below k4 r = {k4 * r_support:g}")
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    ring = np.exp(1j * theta)

    v_full, v_c0, v_first = [], [], []
    for r in radii:
        z = a + r * ring
        if callable(g):
            _, d1, d2 = g(z)
        else:
            gx, gy = g.interp_grad(z)
            (_, b1), (_, b2) = derivation_coeffs(op)
            d1, d2 = gx + b1 * gy, gx + b2 * gy
        p1, p2 = grad_phi(op, z - a)
        s1, s2 = laurent_series_cgrad(op, co, z, m_max=1)
        v_full.append(np.max(np.hypot(np.abs(d1), np.abs(d2))))
        v_c0.append(np.max(np.hypot(np.abs(d1 - co.c0 * p1),
                                    np.abs(d2 - co.c0 * p2))))
        v_first.append(np.max(np.hypot(np.abs(d1 - s1), np.abs(d2 - s2))))
    return DecayReport(a, tuple(radii), _fit(radii, v_full),
                       _fit(radii, v_c0), _fit(radii, v_first), k4)


def c0_capacity_ratio(c0: complex, omega: float, cap_lower: float) -> float:
    """Diagnostic |c0| / (omega cap); inf when the capacity bound is 0."""
    denom = omega * cap_lower
    if denom <= 0:
        return math.inf if abs(c0) > 0 else 0.0
    return abs(c0) / denom
