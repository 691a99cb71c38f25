"""Complex-valued samples on a uniform rectangular grid.

The grid lives in the plane identified with C: the sample at row i,
column j sits at ``origin + j*spacing + 1j*i*spacing``, so columns move
along x1 and rows along x2.  Arrays are stored (ny, nx), row-major.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmall, MissingGradients


@dataclass
class GridFunction:
    origin: complex
    spacing: float
    nx: int
    ny: int
    values: np.ndarray
    grad1: np.ndarray | None = None   # samples of df/dx1
    grad2: np.ndarray | None = None   # samples of df/dx2
    invalid_margin: int = 0           # boundary ring width with unusable values

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.ny, self.nx):
            raise ValueError(
                f"values shape {self.values.shape} != (ny, nx) = {(self.ny, self.nx)}")
        for name in ("grad1", "grad2"):
            g = getattr(self, name)
            if g is not None:
                g = np.asarray(g, dtype=complex)
                if g.shape != (self.ny, self.nx):
                    raise ValueError(f"{name} shape {g.shape} != values shape")
                setattr(self, name, g)
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")

    # -- geometry ---------------------------------------------------------

    def x1(self):
        return self.origin.real + self.spacing * np.arange(self.nx)

    def x2(self):
        return self.origin.imag + self.spacing * np.arange(self.ny)

    def points(self):
        """All sample locations as a complex (ny, nx) array."""
        return self.x1()[None, :] + 1j * self.x2()[:, None]

    @property
    def xmax(self):
        return self.origin.real + self.spacing * (self.nx - 1)

    @property
    def ymax(self):
        return self.origin.imag + self.spacing * (self.ny - 1)

    def contains_disc(self, center: complex, radius: float) -> bool:
        return (self.origin.real <= center.real - radius
                and self.origin.imag <= center.imag - radius
                and center.real + radius <= self.xmax
                and center.imag + radius <= self.ymax)

    # -- evaluation -------------------------------------------------------

    def interp(self, z) -> np.ndarray:
        """Bilinear interpolation of the samples at complex points z."""
        z = np.asarray(z, dtype=complex)
        fx = (z.real - self.origin.real) / self.spacing
        fy = (z.imag - self.origin.imag) / self.spacing
        eps = 1e-9
        if np.any(fx < -eps) or np.any(fx > self.nx - 1 + eps) \
                or np.any(fy < -eps) or np.any(fy > self.ny - 1 + eps):
            raise ValueError("interpolation point outside grid")
        j0 = np.clip(np.floor(fx).astype(int), 0, self.nx - 2)
        i0 = np.clip(np.floor(fy).astype(int), 0, self.ny - 2)
        tx = np.clip(fx - j0, 0.0, 1.0)
        ty = np.clip(fy - i0, 0.0, 1.0)
        v = self.values
        out = ((1 - tx) * (1 - ty) * v[i0, j0]
               + tx * (1 - ty) * v[i0, j0 + 1]
               + (1 - tx) * ty * v[i0 + 1, j0]
               + tx * ty * v[i0 + 1, j0 + 1])
        return out

    def interp_grad(self, z):
        """Bilinear interpolation of (grad1, grad2) at complex points z."""
        if self.grad1 is None or self.grad2 is None:
            raise MissingGradients("grid carries no gradient samples")
        g1 = GridFunction(self.origin, self.spacing, self.nx, self.ny, self.grad1)
        g2 = GridFunction(self.origin, self.spacing, self.nx, self.ny, self.grad2)
        return g1.interp(z), g2.interp(z)

    def integral(self) -> complex:
        """Midpoint quadrature h^2 * sum over all samples."""
        return complex(self.values.sum() * self.spacing ** 2)

    def fill_gradients(self, order: int = 2) -> "GridFunction":
        """Populate grad1/grad2 by central differences (edge ring invalid).

        order=2 uses the 3-point stencil, order=4 the 5-point one (for
        integrands that must be resolved beyond the h^2 floor).
        """
        if order not in (2, 4):
            raise ValueError("order must be 2 or 4")
        m = order // 2
        if self.nx < 2 * m + 1 or self.ny < 2 * m + 1:
            raise GridTooSmall("grid too small for the difference stencil")
        h = self.spacing
        f = self.values
        g1 = np.zeros_like(f)
        g2 = np.zeros_like(f)
        if order == 2:
            g1[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2 * h)
            g2[1:-1, :] = (f[2:, :] - f[:-2, :]) / (2 * h)
        else:
            g1[:, 2:-2] = (-f[:, 4:] + 8 * f[:, 3:-1]
                           - 8 * f[:, 1:-3] + f[:, :-4]) / (12 * h)
            g2[2:-2, :] = (-f[4:, :] + 8 * f[3:-1, :]
                           - 8 * f[1:-3, :] + f[:-4, :]) / (12 * h)
        return GridFunction(self.origin, self.spacing, self.nx, self.ny,
                            self.values, g1, g2,
                            invalid_margin=max(self.invalid_margin, m))

    # -- construction / serialization --------------------------------------

    @staticmethod
    def from_function(fn, origin: complex, spacing: float, nx: int, ny: int,
                      grad_fns=None) -> "GridFunction":
        g = GridFunction(origin, spacing, nx, ny,
                         np.zeros((ny, nx), dtype=complex))
        pts = g.points()
        g.values = np.asarray(fn(pts), dtype=complex) + np.zeros_like(pts)
        if grad_fns is not None:
            f1, f2 = grad_fns
            g.grad1 = np.asarray(f1(pts), dtype=complex) + np.zeros_like(pts)
            g.grad2 = np.asarray(f2(pts), dtype=complex) + np.zeros_like(pts)
        return g

    def to_json_dict(self) -> dict:
        d = {
            "origin": [self.origin.real, self.origin.imag],
            "spacing": self.spacing,
            "nx": self.nx,
            "ny": self.ny,
            "re": self.values.real.ravel().tolist(),
            "im": self.values.imag.ravel().tolist(),
        }
        if self.grad1 is not None and self.grad2 is not None:
            d["g1re"] = self.grad1.real.ravel().tolist()
            d["g1im"] = self.grad1.imag.ravel().tolist()
            d["g2re"] = self.grad2.real.ravel().tolist()
            d["g2im"] = self.grad2.imag.ravel().tolist()
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "GridFunction":
        nx, ny = int(d["nx"]), int(d["ny"])
        vals = (np.asarray(d["re"], dtype=float)
                + 1j * np.asarray(d["im"], dtype=float)).reshape(ny, nx)
        g1 = g2 = None
        if "g1re" in d:
            g1 = (np.asarray(d["g1re"], dtype=float)
                  + 1j * np.asarray(d["g1im"], dtype=float)).reshape(ny, nx)
            g2 = (np.asarray(d["g2re"], dtype=float)
                  + 1j * np.asarray(d["g2im"], dtype=float)).reshape(ny, nx)
        return GridFunction(complex(d["origin"][0], d["origin"][1]),
                            float(d["spacing"]), nx, ny, vals, g1, g2)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)

    @staticmethod
    def load(path) -> "GridFunction":
        with open(path, "r", encoding="utf-8") as fh:
            return GridFunction.from_json_dict(json.load(fh))
