"""Rasterized compact sets: occupancy masks, Swiss-cheese generators,
boundary extraction, and PGM round-trip IO.

Masks live on their own frame (origin, spacing); cell (i, j) is occupied
when its center origin + j h + i i h lies in the set.  Morphology uses
8-connectivity for the set and 4-connectivity for its complement, the
standard raster duality.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np
import scipy.ndimage

from .errors import PlacementFailed
from .oscillation import Disc

MAX_PLACE_TRIES = 10_000

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_BOX = np.ones((3, 3), dtype=bool)


@dataclass
class CompactSetMask:
    """Boolean raster of a compact set, with an optional construction
    record (outer disc and removed holes) for generated cheeses."""
    origin: complex
    spacing: float
    mask: np.ndarray
    outer: tuple = None       # (center, radius) when built from a disc
    holes: tuple = ()         # ((center, radius), ...)

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.ndim != 2:
            raise ValueError("mask must be a 2d boolean raster")

    @property
    def ny(self) -> int:
        return self.mask.shape[0]

    @property
    def nx(self) -> int:
        return self.mask.shape[1]

    def points(self) -> np.ndarray:
        xs = self.origin.real + np.arange(self.nx) * self.spacing
        ys = self.origin.imag + np.arange(self.ny) * self.spacing
        return xs[None, :] + 1j * ys[:, None]

    def check_invariants(self):
        """Occupied somewhere, and a clear 2-cell frame margin."""
        if not self.mask.any():
            raise ValueError("mask has no occupied cell")
        if (self.mask[:2, :].any() or self.mask[-2:, :].any()
                or self.mask[:, :2].any() or self.mask[:, -2:].any()):
            raise ValueError("occupied cells reach within 2 cells of the "
                             "stated bbox")
        return self

    def contains(self, z) -> np.ndarray:
        """Membership of arbitrary points by nearest-cell lookup."""
        z = np.asarray(z, dtype=complex)
        j = np.rint((z.real - self.origin.real) / self.spacing).astype(int)
        i = np.rint((z.imag - self.origin.imag) / self.spacing).astype(int)
        ok = (i >= 0) & (i < self.ny) & (j >= 0) & (j < self.nx)
        out = np.zeros(z.shape, dtype=bool)
        out[ok] = self.mask[i[ok], j[ok]]
        return out

    def interior(self) -> "CompactSetMask":
        er = scipy.ndimage.binary_erosion(self.mask, structure=_BOX)
        return CompactSetMask(self.origin, self.spacing, er,
                              self.outer, self.holes)

    def boundary(self) -> "CompactSetMask":
        er = scipy.ndimage.binary_erosion(self.mask, structure=_BOX)
        return CompactSetMask(self.origin, self.spacing, self.mask & ~er,
                              self.outer, self.holes)

    # -- IO ------------------------------------------------------------

    def save_pgm(self, path):
        """P5 raster (255 = occupied, top row = largest x2) plus a JSON
        sidecar <path>.json with the frame."""
        path = str(path)
        data = np.where(self.mask[::-1, :], 255, 0).astype(np.uint8)
        with open(path, "wb") as fh:
            fh.write(f"P5\n{self.nx} {self.ny}\n255\n".encode())
            fh.write(data.tobytes())
        side = {"origin": [self.origin.real, self.origin.imag],
                "spacing": self.spacing}
        with open(path + ".json", "w") as fh:
            fh.write(json.dumps(side, sort_keys=True,
                                separators=(",", ":")) + "\n")

    @staticmethod
    def load_pgm(path) -> "CompactSetMask":
        path = str(path)
        with open(path, "rb") as fh:
            raw = fh.read()
        fields = []
        pos = 0
        while len(fields) < 4:
            while pos < len(raw) and raw[pos:pos + 1].isspace():
                pos += 1
            if raw[pos:pos + 1] == b"#":
                while pos < len(raw) and raw[pos:pos + 1] != b"\n":
                    pos += 1
                continue
            start = pos
            while pos < len(raw) and not raw[pos:pos + 1].isspace():
                pos += 1
            fields.append(raw[start:pos])
        if fields[0] != b"P5":
            raise ValueError("not a P5 PGM file")
        nx, ny, maxval = int(fields[1]), int(fields[2]), int(fields[3])
        if maxval > 255:
            raise ValueError("only single-byte PGM supported")
        pos += 1
        data = np.frombuffer(raw[pos:pos + nx * ny], dtype=np.uint8)
        mask = (data.reshape(ny, nx) > 127)[::-1, :]
        with open(path + ".json") as fh:
            side = json.load(fh)
        return CompactSetMask(side["origin"][0] + 1j * side["origin"][1],
                              float(side["spacing"]), mask)


def disc_mask(outer: Disc, spacing: float, margin_cells: int = 3) -> CompactSetMask:
    """Raster of a closed disc with a clear frame margin."""
    half = int(math.ceil(outer.radius / spacing)) + margin_cells
    n = 2 * half + 1
    origin = (outer.center.real - half * spacing
              + 1j * (outer.center.imag - half * spacing))
    xs = np.arange(n) * spacing
    pts = (origin + xs[None, :] + 1j * xs[:, None])
    mask = np.abs(pts - outer.center) <= outer.radius
    return CompactSetMask(origin, spacing, mask, (outer.center, outer.radius))


def make_swiss_cheese(seed: int, outer: Disc, n_holes: int,
                      hole_scale: float,
                      spacing: float | None = None) -> CompactSetMask:
    """Outer disc minus n_holes disjoint open discs, seeded and
    deterministic.

    Hole radii are uniform in [hole_scale/2, hole_scale] times the outer
    radius; centers are rejection-sampled so each open hole stays inside
    the outer disc and clear of the others by at least one cell.
    """
    if n_holes < 0:
        raise ValueError("n_holes must be nonnegative")
    if not 0 < hole_scale < 1:
        raise ValueError("hole_scale must lie in (0, 1)")
    R = outer.radius
    h = R / 256 if spacing is None else spacing
    rng = np.random.default_rng(seed)
    gap = h
    holes = []
    for _ in range(n_holes):
        for attempt in range(MAX_PLACE_TRIES):
            r = R * rng.uniform(hole_scale / 2, hole_scale)
            u = rng.uniform(-1.0, 1.0, 2)
            c = outer.center + (R - r - gap) * (u[0] + 1j * u[1])
            if abs(c - outer.center) > R - r - gap:
                continue
            if all(abs(c - hc) >= r + hr + gap for hc, hr in holes):
                holes.append((c, r))
                break
        else:
            raise PlacementFailed(
                f"could not place hole {len(holes) + 1} of {n_holes} "
                f"after {MAX_PLACE_TRIES} tries")
    base = disc_mask(outer, h)
    pts = base.points()
    mask = base.mask.copy()
    for c, r in holes:
        mask &= ~(np.abs(pts - c) < r)
    out = CompactSetMask(base.origin, h, mask,
                         (outer.center, outer.radius), tuple(holes))
    return out.check_invariants()


def inner_boundary(x: CompactSetMask) -> CompactSetMask:
    """Boundary cells of X not 8-adjacent to the unbounded complement
    component (flood fill from the raster frame, 4-connected dual)."""
    comp = ~x.mask
    labels, _ = scipy.ndimage.label(comp, structure=_CROSS)
    frame_labels = np.unique(np.concatenate([
        labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]))
    unbounded = np.isin(labels, frame_labels[frame_labels > 0])
    near_comp = scipy.ndimage.binary_dilation(comp, structure=_BOX)
    near_unbounded = scipy.ndimage.binary_dilation(unbounded, structure=_BOX)
    inner = x.mask & near_comp & ~near_unbounded
    return CompactSetMask(x.origin, x.spacing, inner, x.outer, x.holes)
