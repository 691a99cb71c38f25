"""Menger curvature of weighted planar point clouds.

The curvature of a triple is the reciprocal circumradius, computed as
4*area / (product of side lengths); coincident or collinear triples count
as zero.  The triple-sum energy drives a capacity lower bound of the form
t*|mu| with t = min(1/A0, sqrt(|mu|/c2)), where A0 is an empirical linear
growth constant.  Comparability constants between this scale and the true
capacity are unknown; every report carries that caveat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import SingularMap, ZeroMeasure

# triples with c^2 * (shortest side)^2 below this are treated as exactly
# collinear; keeps cross-product rounding noise out of exact-zero cases
COLLINEAR_EPS2 = 1e-30
# cross products this far below their operands carry no correct digits;
# rounding in the construction of nominally collinear data lands at a few
# ulps of the coordinates, well under this, while genuinely curved triples
# in sane clouds sit many orders above it
CROSS_ULP_EPS = 1e-12

CAPACITY_CAVEAT = ("lower bound holds up to unknown absolute comparability "
                   "constants; treat as a scale, not a certified bound")


@dataclass
class DiscreteMeasure:
    points: np.ndarray   # complex (n,)
    weights: np.ndarray  # nonnegative float (n,)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex).ravel()
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.points.shape != self.weights.shape:
            raise ValueError("points and weights must have the same length")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def __len__(self):
        return self.points.shape[0]


@dataclass
class GrowthProfile:
    constant: float
    witness_center: complex
    witness_radius: float
    small_scale: list = field(default_factory=list)  # (radius, max ratio) pairs


@dataclass
class CapacityBound:
    value: float
    t_star: float
    mass: float
    growth_constant: float
    curvature_energy: float
    caveat: str = CAPACITY_CAVEAT


def menger_curvature(z: complex, w: complex, xi: complex) -> float:
    """Reciprocal circumradius of a point triple (0 for degenerate ones)."""
    ux, uy = w.real - z.real, w.imag - z.imag
    vx, vy = xi.real - z.real, xi.imag - z.imag
    cross = ux * vy - uy * vx
    if abs(cross) <= CROSS_ULP_EPS * (abs(ux * vy) + abs(uy * vx)):
        return 0.0
    a2 = ux * ux + uy * uy
    b2 = vx * vx + vy * vy
    dx, dy = w.real - xi.real, w.imag - xi.imag
    d2 = dx * dx + dy * dy
    if a2 == 0.0 or b2 == 0.0 or d2 == 0.0:
        return 0.0
    c2 = 4.0 * cross * cross / (a2 * b2 * d2)
    if c2 * min(a2, b2, d2) < COLLINEAR_EPS2:
        return 0.0
    return math.sqrt(c2)


@numba.njit(parallel=True, cache=True)
def _energy_partials(x, y, w, eps2, ulp):
    """Per-anchor partial sums w_i * sum_{j<k, j,k != i} w_j w_k c^2.

    Each anchor's inner double loop runs in a fixed sequential order with
    compensated accumulation, so the partials do not depend on how anchors
    are distributed over threads.
    """
    n = x.shape[0]
    out = np.zeros(n)
    for i in numba.prange(n):
        acc = 0.0
        comp = 0.0
        xi = x[i]
        yi = y[i]
        for j in range(n):
            if j == i:
                continue
            ux = x[j] - xi
            uy = y[j] - yi
            a2 = ux * ux + uy * uy
            if a2 == 0.0:
                continue
            wj = w[j]
            for k in range(j + 1, n):
                if k == i:
                    continue
                vx = x[k] - xi
                vy = y[k] - yi
                p1 = ux * vy
                p2 = uy * vx
                cross = p1 - p2
                if abs(cross) <= ulp * (abs(p1) + abs(p2)):
                    continue
                b2 = vx * vx + vy * vy
                dx = x[j] - x[k]
                dy = y[j] - y[k]
                d2 = dx * dx + dy * dy
                if b2 == 0.0 or d2 == 0.0:
                    continue
                c2 = 4.0 * cross * cross / (a2 * b2 * d2)
                m2 = a2
                if b2 < m2:
                    m2 = b2
                if d2 < m2:
                    m2 = d2
                if c2 * m2 < eps2:
                    continue
                term = wj * w[k] * c2
                t = acc + term
                if abs(acc) >= abs(term):
                    comp += (acc - t) + term
                else:
                    comp += (term - t) + acc
                acc = t
        out[i] = w[i] * (acc + comp)
    return out


def curvature_energy(mu: DiscreteMeasure, threads: int | None = None) -> float:
    """Triple-sum curvature energy over ordered index triples.

    Equals 6 * sum over i<j<k of w_i w_j w_k c(p_i,p_j,p_k)^2.  The result
    is invariant under the worker count: per-anchor partials are summed
    with math.fsum in index order.
    """
    n = len(mu)
    if n < 3:
        return 0.0
    x = np.ascontiguousarray(mu.points.real)
    y = np.ascontiguousarray(mu.points.imag)
    w = np.ascontiguousarray(mu.weights)
    old = numba.get_num_threads()
    if threads is not None:
        numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))
    try:
        partials = _energy_partials(x, y, w, COLLINEAR_EPS2, CROSS_ULP_EPS)
    finally:
        numba.set_num_threads(old)
    return 2.0 * math.fsum(partials.tolist())


def curvature_energy_naive(mu: DiscreteMeasure) -> float:
    """Reference sequential triple loop (use only for small clouds)."""
    pts, w = mu.points, mu.weights
    n = len(mu)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                c = menger_curvature(pts[i], pts[j], pts[k])
                total += 6.0 * w[i] * w[j] * w[k] * c * c
    return total


def growth_profile(mu: DiscreteMeasure) -> GrowthProfile:
    """Empirical linear-growth constant max mu(B(z, r))/r.

    Centers run over the data points.  Radii run over each center's own
    positive distances (the ratio is locally maximal there) plus half the
    global minimum gap.  Off-family (center, radius) pairs can exceed the
    reported constant by at most a factor 2 down to half-gap scale; atom
    masses make the ratio diverge below that scale, which the +inf flag
    records for effectively point-like clouds.
    """
    pts, w = mu.points, mu.weights
    n = len(mu)
    if n == 0:
        return GrowthProfile(0.0, 0j, 0.0)
    diff = np.abs(pts[None, :] - pts[:, None])
    pos = diff[diff > 0]
    if pos.size == 0:
        # all mass at one location: no linear growth at small scales
        return GrowthProfile(math.inf, complex(pts[0]), 0.0)
    mingap = float(pos.min())
    best = -math.inf
    best_center, best_radius = complex(pts[0]), 0.0
    order = np.argsort(diff, axis=1, kind="stable")
    for i in range(n):
        d = diff[i, order[i]]
        cw = np.cumsum(w[order[i]])
        posmask = d > 0
        if np.any(posmask):
            ratios = cw[posmask] / d[posmask]
            jbest = int(np.argmax(ratios))
            if ratios[jbest] > best:
                best = float(ratios[jbest])
                best_center = complex(pts[i])
                best_radius = float(d[posmask][jbest])
        # sub-gap candidate: only mass coincident with the center counts
        r0 = mingap / 2
        m0 = float(cw[np.searchsorted(d, r0, side="right") - 1])
        if m0 > 0 and m0 / r0 > best:
            best = m0 / r0
            best_center = complex(pts[i])
            best_radius = r0
    # dyadic small-scale profile down to the half gap
    diam = float(diff.max())
    small = []
    r = diam
    while r >= mingap / 2 and len(small) < 48:
        masses = [float(np.sum(w[diff[i] <= r])) for i in range(n)]
        small.append((r, max(masses) / r))
        r /= 2
    return GrowthProfile(best, best_center, best_radius, small)


def capacity_lower_bound(mu: DiscreteMeasure, threads: int | None = None,
                         growth: GrowthProfile | None = None,
                         energy: float | None = None) -> CapacityBound:
    """Scale t*|mu| with t = min(1/A0, sqrt(|mu|/c2))."""
    mass = mu.mass
    if mass == 0:
        raise ZeroMeasure("point cloud carries no mass")
    if growth is None:
        growth = growth_profile(mu)
    if energy is None:
        energy = curvature_energy(mu, threads=threads)
    t_growth = 0.0 if math.isinf(growth.constant) else 1.0 / growth.constant
    t_energy = math.inf if energy <= 0 else math.sqrt(mass / energy)
    t_star = min(t_growth, t_energy)
    return CapacityBound(value=t_star * mass, t_star=t_star, mass=mass,
                         growth_constant=growth.constant,
                         curvature_energy=energy)


def pushforward_linear(mu: DiscreteMeasure, mat) -> DiscreteMeasure:
    """Push the cloud through an invertible real-linear map (weights kept)."""
    m = np.asarray(mat, dtype=float)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) <= 1e-14 * np.sum(m * m):
        raise SingularMap(f"matrix {m.tolist()} is numerically singular")
    x, y = mu.points.real, mu.points.imag
    out = (m[0, 0] * x + m[0, 1] * y) + 1j * (m[1, 0] * x + m[1, 1] * y)
    return DiscreteMeasure(out, mu.weights.copy())


# -- point cloud file format ------------------------------------------------

def load_points_csv(path) -> DiscreteMeasure:
    """Read an `x,y,w` CSV (header required, '.' decimals, LF lines)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "x,y,w":
            raise ValueError(f"expected header 'x,y,w', got {header!r}")
        rows = [line.split(",") for line in fh.read().split("\n") if line.strip()]
    arr = np.array([[float(v) for v in row] for row in rows], dtype=float)
    if arr.size == 0:
        return DiscreteMeasure(np.zeros(0, complex), np.zeros(0))
    return DiscreteMeasure(arr[:, 0] + 1j * arr[:, 1], arr[:, 2])


def save_points_csv(path, mu: DiscreteMeasure):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,w\n")
        for p, wt in zip(mu.points, mu.weights):
            fh.write(f"{float(p.real)!r},{float(p.imag)!r},{float(wt)!r}\n")
