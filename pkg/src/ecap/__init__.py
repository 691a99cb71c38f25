"""Numerical toolkit for planar elliptic operators: fundamental solutions,
disc oscillation functionals, curvature-based capacity estimates,
localization of potentials, and raster-set criterion scans."""

__version__ = "0.1.0"
