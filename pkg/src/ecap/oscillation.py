"""Disc oscillation functional for elliptic operators.

For a disc B = B(a, r) the functional pairs f against the operator's
symbol on the boundary and subtracts a trace-weighted area mean:

    O(f) = (1/(2 pi r)) * int_{dB} f(x) L(x - a)/r^2 dl
         - (c11 + c22)/(2 pi r^2) * int_B f dA

It equals the pairing of L f against an explicit parabolic weight, which
this module also evaluates directly as a cross-check route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DiscOutsideGrid, GridTooSmall, MissingGradients, \
    QuadratureUnderresolved
from .grids import GridFunction
from .operators import EllipticOperator, apply_L


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("disc radius must be positive")


def psi_weight(b: Disc, x):
    """Parabolic weight (r^2 - |x-a|^2) / (4 pi r^2) inside B, zero outside."""
    x = np.asarray(x, dtype=complex)
    d2 = np.abs(x - b.center) ** 2
    r2 = b.radius ** 2
    return np.maximum(r2 - d2, 0.0) / (4 * math.pi * r2)


def symbol_on_circle(op: EllipticOperator, theta):
    """L(cos t, sin t): the quadratic symbol evaluated on unit directions."""
    ct, st = np.cos(theta), np.sin(theta)
    return op.c11 * ct * ct + 2 * op.c12 * ct * st + op.c22 * st * st


def _oscillation_once(op, f, b, n_boundary, n_radial):
    th_b = np.arange(n_boundary) * (2 * math.pi / n_boundary)
    ring = b.center + b.radius * np.exp(1j * th_b)
    boundary = np.mean(f.interp(ring) * symbol_on_circle(op, th_b))

    th_a = (np.arange(n_boundary) + 0.5) * (2 * math.pi / n_boundary)
    rho = (np.arange(n_radial) + 0.5) * (b.radius / n_radial)
    pts = b.center + rho[:, None] * np.exp(1j * th_a)[None, :]
    area_int = np.sum(f.interp(pts) * rho[:, None]) \
        * (b.radius / n_radial) * (2 * math.pi / n_boundary)
    trace = op.c11 + op.c22
    return complex(boundary - trace / (2 * math.pi * b.radius ** 2) * area_int)


def interp_noise_floor(op: EllipticOperator, f: GridFunction) -> float:
    """Scale below which oscillation values are interpolation noise.

    Bilinear interpolation of the samples carries ~ h^2 |D^2 f| / 8 of
    error per point; second differences give a cheap global |D^2 f|.  A
    small floor tied to |f| covers flat fields.  Near-cancelling
    (L-analytic) inputs produce oscillations at this scale, which is
    noise around zero rather than an unresolved value.
    """
    v = f.values
    h = f.spacing
    d2h2 = max(float(np.abs(v[2:, :] - 2 * v[1:-1, :] + v[:-2, :]).max()),
               float(np.abs(v[:, 2:] - 2 * v[:, 1:-1] + v[:, :-2]).max()))
    fmax = float(np.abs(v).max())
    lnorm = abs(op.c11) + 2 * abs(op.c12) + abs(op.c22)
    return max(1e-8 * (1 + fmax), 0.25 * d2h2) * max(lnorm, 1.0)


def l_oscillation(op: EllipticOperator, f: GridFunction, b: Disc,
                  n_boundary: int = 256, n_radial: int = 256) -> complex:
    """Oscillation of f over the disc b by boundary/area quadrature.

    Boundary term: trapezoid rule on n_boundary equispaced angles.  Area
    term: midpoint rule on an (n_radial x n_boundary) polar grid.  The
    value at the requested resolution is returned after checking it against
    a doubled-angle evaluation.
    """
    if not f.contains_disc(b.center, 1.05 * b.radius):
        raise DiscOutsideGrid(
            f"disc at {b.center} radius {b.radius} (with 5% margin) "
            "is not inside the grid")
    o1 = _oscillation_once(op, f, b, n_boundary, n_radial)
    o2 = _oscillation_once(op, f, b, 2 * n_boundary, n_radial)
    floor = interp_noise_floor(op, f)
    if abs(o2 - o1) > max(1e-3 * abs(o2), floor):
        raise QuadratureUnderresolved(
            f"doubling n_boundary moved the oscillation from {o1} to {o2}")
    return o1


def oscillation_via_psi(op: EllipticOperator, f: GridFunction, b: Disc) -> complex:
    """Independent route: grid quadrature of psi * (L f) over the disc."""
    if not f.contains_disc(b.center, 1.05 * b.radius):
        raise DiscOutsideGrid("disc (with 5% margin) is not inside the grid")
    lf = apply_L(op, f)
    margin = lf.invalid_margin * f.spacing
    if not f.contains_disc(b.center, b.radius + margin):
        raise DiscOutsideGrid("disc meets the invalid stencil ring")
    w = psi_weight(b, f.points())
    return complex(np.sum(w * lf.values) * f.spacing ** 2)


def modulus_of_continuity(f: GridFunction, r: float) -> float:
    """max |grad f(x) - grad f(y)| over sampled grid pairs with |x-y| <= r.

    The pair family is deterministic: every valid grid point, displaced by
    a fixed fan of offsets (up to 64 directions at 4 radial fractions of r,
    rounded to grid steps).  With typical grids this is far more than 1e5
    pairs; smaller grids simply use every available pair.
    """
    if f.grad1 is None or f.grad2 is None:
        raise MissingGradients("modulus of continuity needs gradient samples")
    h = f.spacing
    if r < h:
        raise GridTooSmall(f"radius {r} below grid spacing {h}")
    offsets = set()
    for frac in (1.0, 0.75, 0.5, 0.25):
        rho = frac * r
        for k in range(64):
            t = 2 * math.pi * k / 64
            di = round(rho * math.sin(t) / h)
            dj = round(rho * math.cos(t) / h)
            if (di, dj) == (0, 0):
                continue
            if math.hypot(di, dj) * h <= r + 1e-12 * r:
                offsets.add((di, dj))
    m = f.invalid_margin
    g1 = f.grad1[m:f.ny - m, m:f.nx - m] if m else f.grad1
    g2 = f.grad2[m:f.ny - m, m:f.nx - m] if m else f.grad2
    best = 0.0
    for di, dj in sorted(offsets):
        i0, i1 = max(0, di), min(g1.shape[0], g1.shape[0] + di)
        j0, j1 = max(0, dj), min(g1.shape[1], g1.shape[1] + dj)
        if i0 >= i1 or j0 >= j1:
            continue
        a = np.s_[i0:i1, j0:j1]
        bsl = np.s_[i0 - di:i1 - di, j0 - dj:j1 - dj]
        d = np.abs(g1[a] - g1[bsl]) ** 2 + np.abs(g2[a] - g2[bsl]) ** 2
        best = max(best, float(d.max()))
    return math.sqrt(best)
