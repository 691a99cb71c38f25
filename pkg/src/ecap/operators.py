"""Planar second-order elliptic operators with constant complex coefficients.

An operator L = c11 d11 + 2 c12 d12 + c22 d22 is encoded through the two
roots of its characteristic polynomial c11 t^2 + 2 c12 t + c22.  The roots
give a pair of first-order derivations d1, d2 that factor L, a pair of
canonical linear coordinates z1, z2 dual to them, and a fundamental
solution of the form k1*log(z1*z2^nu) (distinct roots) or k1*z1/z2
(repeated root).  The normalization k1 is calibrated numerically by pairing
the unnormalized kernel against smooth bumps, with closed forms substituted
for the Laplacian and Bitsadze families.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (BranchCut, CalibrationFailed, DegenerateOperator,
                     GridTooSmall, NotElliptic, SingularPoint)
from .grids import GridFunction

ROOT_REAL_TOL = 1e-12
REPEATED_TOL = 1e-9
CUT_TOL = 1e-14


@dataclass(frozen=True)
class CanonicalCoords:
    z1: complex
    z2: complex


@dataclass(frozen=True)
class EllipticOperator:
    c11: complex
    c12: complex
    c22: complex
    lambda1: complex
    lambda2: complex
    repeated: bool
    nu: int
    k1: complex
    branch_cut_angle: float
    # z_s = a_s * z + b_s * conj(z); windings cancel, see _theta_field
    a1: complex
    b1: complex
    a2: complex
    b2: complex
    branch_offset: float

    def coeffs(self):
        return (self.c11, self.c12, self.c22)


def characteristic_roots(c11: complex, c12: complex, c22: complex):
    """Roots of c11 t^2 + 2 c12 t + c22, sorted by (Im, Re) descending."""
    if c11 == 0 and c12 == 0 and c22 == 0:
        raise DegenerateOperator("all coefficients vanish")
    if c11 == 0:
        raise NotElliptic("leading coefficient c11 vanishes; "
                          "the (1,0) direction is characteristic")
    disc = cmath.sqrt(c12 * c12 - c11 * c22)
    roots = sorted(((-c12 + disc) / c11, (-c12 - disc) / c11),
                   key=lambda t: (t.imag, t.real), reverse=True)
    for lam in roots:
        if abs(lam.imag) <= ROOT_REAL_TOL * (1.0 + abs(lam)):
            raise NotElliptic(f"characteristic root {lam} is real")
    return roots[0], roots[1]


def _coord_coeffs(lam1: complex, lam2: complex, repeated: bool):
    """Coefficients (a_s, b_s) of z_s = a_s z + b_s conj(z)."""
    if repeated:
        p1, q1 = 0.5, -0.5 / lam1
        p2, q2 = 0.5, 0.5 / lam1
    else:
        p1, q1 = lam2 / (lam2 - lam1), 1.0 / (lam2 - lam1)
        p2, q2 = lam1 / (lam1 - lam2), 1.0 / (lam1 - lam2)
    a1, b1 = (p1 - 1j * q1) / 2, (p1 + 1j * q1) / 2
    a2, b2 = (p2 - 1j * q2) / 2, (p2 + 1j * q2) / 2
    return a1, b1, a2, b2


def _branch_terms(a: complex, b: complex):
    """(base angle, ratio, True if the z part dominates) for a*z + b*conj(z)."""
    if abs(a) > abs(b):
        return cmath.phase(a), b / a, True
    return cmath.phase(b), a / b, False


def new_operator(c11, c12, c22, branch_cut_angle: float = math.pi,
                 calibrate: bool = True) -> EllipticOperator:
    """Build an operator record from its three coefficients."""
    c11, c12, c22 = complex(c11), complex(c12), complex(c22)
    lam1, lam2 = characteristic_roots(c11, c12, c22)
    repeated = abs(lam1 - lam2) <= REPEATED_TOL * (1.0 + abs(lam1))
    if repeated:
        lam = (lam1 + lam2) / 2
        lam1 = lam2 = lam
        nu = -1
    else:
        nu = 1 if (lam1.imag > 0) != (lam2.imag > 0) else -1
    a1, b1, a2, b2 = _coord_coeffs(lam1, lam2, repeated)

    branch_offset = 0.0
    if not repeated:
        base1, ratio1, zdom1 = _branch_terms(a1, b1)
        base2, ratio2, zdom2 = _branch_terms(a2, b2)
        wind1 = 1 if zdom1 else -1
        wind2 = 1 if zdom2 else -1
        if wind1 + nu * wind2 != 0:
            raise NotElliptic("coordinate maps do not orient consistently")
        theta_raw = (base1 + cmath.phase(1 + ratio1)
                     + nu * (base2 + cmath.phase(1 + ratio2)))
        w1 = (a1 + b1) * (a2 + b2) ** nu
        branch_offset = 2 * math.pi * round((theta_raw - cmath.phase(w1))
                                            / (2 * math.pi))

    op = EllipticOperator(c11, c12, c22, lam1, lam2, repeated, nu,
                          1.0 + 0j, branch_cut_angle,
                          a1, b1, a2, b2, branch_offset)
    if calibrate:
        op = _with_k1(op, calibrate_k1(op))
    return op


def _with_k1(op: EllipticOperator, k1: complex) -> EllipticOperator:
    return EllipticOperator(op.c11, op.c12, op.c22, op.lambda1, op.lambda2,
                            op.repeated, op.nu, k1, op.branch_cut_angle,
                            op.a1, op.b1, op.a2, op.b2, op.branch_offset)


# -- canonical coordinates -------------------------------------------------

def coords(op: EllipticOperator, z) -> CanonicalCoords:
    """Canonical coordinates (z1, z2) of a point (vectorizes over arrays)."""
    z = np.asarray(z, dtype=complex)
    zc = np.conj(z)
    z1 = op.a1 * z + op.b1 * zc
    z2 = op.a2 * z + op.b2 * zc
    if z.ndim == 0:
        return CanonicalCoords(complex(z1), complex(z2))
    return CanonicalCoords(z1, z2)


def derivation_coeffs(op: EllipticOperator):
    """(alpha_s, beta_s) with d_s = alpha_s d/dx1 + beta_s d/dx2."""
    if op.repeated:
        return (1.0, -op.lambda1), (1.0, op.lambda1)
    return (1.0, -op.lambda1), (1.0, -op.lambda2)


# -- fundamental solution --------------------------------------------------

def _theta_field(op: EllipticOperator, z):
    """Continuous argument of z1 * z2^nu on C minus the origin.

    Writing z_s = a_s z (1 + (b_s/a_s) conj(z)/z) when |a_s| > |b_s| (and the
    mirrored form otherwise), the principal arguments of the parenthesized
    factors are continuous because each ratio has modulus < 1, and the
    winding terms of the two coordinates cancel exactly, so no unwrapping
    is needed.
    """
    base1, ratio1, zdom1 = _branch_terms(op.a1, op.b1)
    base2, ratio2, zdom2 = _branch_terms(op.a2, op.b2)
    u = np.conj(z) / z
    t1 = base1 + np.angle(1 + ratio1 * (u if zdom1 else np.conj(u)))
    t2 = base2 + np.angle(1 + ratio2 * (u if zdom2 else np.conj(u)))
    return t1 + op.nu * t2 - op.branch_offset


def phi_field(op: EllipticOperator, z):
    """Fundamental solution on an array of points; no branch-cut policing.

    The branch is globally continuous off the origin (the two coordinate
    windings cancel), so values on the nominal cut ray are the continuous
    limit.  Entries at z == 0 come back as nan.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    bad = z == 0
    zs = np.where(bad, 1.0, z)
    c = coords(op, zs)
    if op.repeated:
        out = op.k1 * c.z1 / c.z2
    else:
        mag = np.log(np.abs(c.z1)) + op.nu * np.log(np.abs(c.z2))
        out = op.k1 * (mag + 1j * _theta_field(op, zs))
    out[bad] = np.nan
    return complex(out[0]) if scalar else out


def on_branch_cut(op: EllipticOperator, z: complex) -> bool:
    if op.repeated or z == 0:
        return False
    d = cmath.phase(z) - op.branch_cut_angle
    return abs(math.sin(d)) <= CUT_TOL and math.cos(d) > 0


def phi(op: EllipticOperator, z: complex) -> complex:
    """Fundamental solution at a single point, with domain checks."""
    z = complex(z)
    if z == 0:
        raise SingularPoint("fundamental solution evaluated at its pole")
    if on_branch_cut(op, z):
        raise BranchCut(f"point {z} lies on the branch cut ray "
                        f"arg z = {op.branch_cut_angle}")
    if op.repeated:
        c = coords(op, z)
        if c.z2 == 0:
            raise SingularPoint("z2 coordinate vanishes")
    return phi_field(op, z)


def grad_phi(op: EllipticOperator, z):
    """Derivation components (d1 Phi, d2 Phi); vectorizes over arrays."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise SingularPoint("gradient of the fundamental solution at its pole")
    c = coords(op, z)
    if op.repeated:
        d1 = op.k1 / c.z2
        d2 = -op.k1 * c.z1 / c.z2 ** 2
    else:
        d1 = op.k1 / c.z1
        d2 = op.k1 * op.nu / c.z2
    return d1, d2


def kernels(op: EllipticOperator, z):
    """Unnormalized convolution kernels (K1, K2); vectorizes over arrays."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise SingularPoint("kernel evaluated at its pole")
    c = coords(op, z)
    if op.repeated:
        return c.z1 / c.z2 ** 2, 1.0 / c.z2
    return 1.0 / c.z1, 1.0 / c.z2


def cartesian_grad_phi(op: EllipticOperator, z):
    """(d/dx1 Phi, d/dx2 Phi) recovered from the derivation components."""
    d1, d2 = grad_phi(op, z)
    (a1x, a1y), (a2x, a2y) = derivation_coeffs(op)
    # invert [d1; d2] = M [dx1; dx2] with rows (a_sx, a_sy)
    det = a1x * a2y - a1y * a2x
    gx = (a2y * d1 - a1y * d2) / det
    gy = (-a2x * d1 + a1x * d2) / det
    return gx, gy


def kernel_growth_bound(op: EllipticOperator, n_angles: int = 4096,
                        radii=(0.25, 1.0, 4.0)):
    """Empirical constant A with |K_s(z)| <= A/|z| and |grad K_s| <= A/|z|^2.

    The kernels are homogeneous of degree -1 so the per-annulus values
    should agree; the spread across radii is reported as a diagnostic.
    """
    th = np.linspace(0, 2 * math.pi, n_angles, endpoint=False)
    ring = np.exp(1j * th)
    per_radius = []
    for r in radii:
        z = r * ring
        k1v, k2v = kernels(op, z)
        per_radius.append(max(np.abs(k1v).max(), np.abs(k2v).max()) * r)
    a_val = max(per_radius)
    # gradient constant via the quotient-rule closed forms
    dz1 = (op.a1 + op.b1, 1j * (op.a1 - op.b1))   # (d/dx1 z1, d/dx2 z1)
    dz2 = (op.a2 + op.b2, 1j * (op.a2 - op.b2))
    z = ring
    c = coords(op, z)
    if op.repeated:
        gk1 = [dz1[i] / c.z2 ** 2 - 2 * c.z1 * dz2[i] / c.z2 ** 3 for i in (0, 1)]
        gk2 = [-dz2[i] / c.z2 ** 2 for i in (0, 1)]
    else:
        gk1 = [-dz1[i] / c.z1 ** 2 for i in (0, 1)]
        gk2 = [-dz2[i] / c.z2 ** 2 for i in (0, 1)]
    gmax = max(np.sqrt(np.abs(gk1[0]) ** 2 + np.abs(gk1[1]) ** 2).max(),
               np.sqrt(np.abs(gk2[0]) ** 2 + np.abs(gk2[1]) ** 2).max())
    return {"A": float(max(a_val, gmax)),
            "A_value": float(a_val),
            "A_gradient": float(gmax),
            "per_radius": [float(v) for v in per_radius]}


# -- calibration -----------------------------------------------------------

def _radial_bump(power: int, radius: float):
    """Bump (1 - |x|^2/R^2)^p and its image under L, both as callables."""
    r2 = radius * radius

    def value(z):
        s = (z.real ** 2 + z.imag ** 2) / r2
        return np.where(s < 1.0, (1.0 - s) ** power, 0.0)

    def l_image(op, z):
        x, y = z.real, z.imag
        s = (x * x + y * y) / r2
        inside = s < 1.0
        gp = -power / r2 * np.maximum(1.0 - s, 0.0) ** (power - 1)
        gpp = power * (power - 1) / r2 ** 2 * np.maximum(1.0 - s, 0.0) ** (power - 2)
        lx = op.c11 * x * x + 2 * op.c12 * x * y + op.c22 * y * y
        return np.where(inside, 2 * (op.c11 + op.c22) * gp + 4 * lx * gpp, 0.0)

    return value, l_image


def _pairing_integral(op: EllipticOperator, power: int, radius: float,
                      n_theta: int = 256, n_panels: int = 42,
                      gl_nodes: int = 12) -> complex:
    """integral of Phi_unnormalized * (L bump) over the bump's support.

    Polar quadrature: trapezoid in angle, Gauss-Legendre on dyadic radial
    panels [R 2^-k-1, R 2^-k] so the logarithmic singularity at the origin
    never meets a node.
    """
    _, l_image = _radial_bump(power, radius)
    base = _with_k1(op, 1.0 + 0j)
    xs, ws = np.polynomial.legendre.leggauss(gl_nodes)
    r_nodes, r_weights = [], []
    for k in range(n_panels):
        hi = radius * 2.0 ** (-k)
        lo = hi / 2
        r_nodes.append((hi + lo) / 2 + (hi - lo) / 2 * xs)
        r_weights.append((hi - lo) / 2 * ws)
    r_nodes = np.concatenate(r_nodes)
    r_weights = np.concatenate(r_weights)
    th = (np.arange(n_theta) + 0.5) * (2 * math.pi / n_theta)
    z = r_nodes[:, None] * np.exp(1j * th)[None, :]
    vals = phi_field(base, z) * l_image(op, z)
    ang = vals.sum(axis=1) * (2 * math.pi / n_theta)
    return complex(np.sum(ang * r_nodes * r_weights))


def calibrate_k1(op: EllipticOperator, force_numeric: bool = False) -> complex:
    """Normalization constant of the fundamental solution.

    Closed forms cover the Laplacian family (c12 = 0, c11 = c22) and the
    Bitsadze family (c12 = i c11, c22 = -c11); everything else is pinned by
    pairing the unnormalized kernel against a smooth bump, cross-checked
    against a second, independent bump.
    """
    if not force_numeric:
        if op.c12 == 0 and op.c11 == op.c22:
            return 1.0 / (4 * math.pi * op.c11)
        if op.c12 == 1j * op.c11 and op.c22 == -op.c11:
            return 1.0 / (4 * math.pi * op.c11)
    i1 = _pairing_integral(op, power=4, radius=1.0)
    i2 = _pairing_integral(op, power=3, radius=0.75)
    k1a = 1.0 / i1
    k1b = 1.0 / i2
    if abs(k1a - k1b) > 1e-4 * abs(k1a):
        raise CalibrationFailed(
            f"bump calibrations disagree: {k1a} vs {k1b}")
    return k1a


# -- grid action -----------------------------------------------------------

def apply_L(op: EllipticOperator, g: GridFunction,
            order: int = 4) -> GridFunction:
    """Apply L by central differences; a boundary ring becomes invalid.

    order=4 (default) uses 5-point stencils, which keeps the stencil
    truncation comfortably below the coefficient-pairing tolerances;
    order=2 is the plain 3x3 scheme.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    m = order // 2
    if g.nx < 2 * m + 1 or g.ny < 2 * m + 1:
        raise GridTooSmall("grid too small for the L stencil")
    h = g.spacing
    f = g.values
    out = np.zeros_like(f)
    if order == 2:
        d11 = (f[1:-1, 2:] - 2 * f[1:-1, 1:-1] + f[1:-1, :-2]) / h ** 2
        d22 = (f[2:, 1:-1] - 2 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / h ** 2
        d12 = (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / (4 * h ** 2)
        out[1:-1, 1:-1] = op.c11 * d11 + 2 * op.c12 * d12 + op.c22 * d22
    else:
        d11 = (-f[2:-2, 4:] + 16 * f[2:-2, 3:-1] - 30 * f[2:-2, 2:-2]
               + 16 * f[2:-2, 1:-3] - f[2:-2, :-4]) / (12 * h ** 2)
        d22 = (-f[4:, 2:-2] + 16 * f[3:-1, 2:-2] - 30 * f[2:-2, 2:-2]
               + 16 * f[1:-3, 2:-2] - f[:-4, 2:-2]) / (12 * h ** 2)
        gx = np.zeros_like(f)
        gx[:, 2:-2] = (-f[:, 4:] + 8 * f[:, 3:-1]
                       - 8 * f[:, 1:-3] + f[:, :-4]) / (12 * h)
        d12 = (-gx[4:, 2:-2] + 8 * gx[3:-1, 2:-2]
               - 8 * gx[1:-3, 2:-2] + gx[:-4, 2:-2]) / (12 * h)
        out[2:-2, 2:-2] = op.c11 * d11 + 2 * op.c12 * d12 + op.c22 * d22
    return GridFunction(g.origin, g.spacing, g.nx, g.ny, out,
                        invalid_margin=max(g.invalid_margin + m, m))
