"""Disc oscillation functional: quadrature route vs grid route, analytic
anchors, and the modulus of continuity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecap.errors import (DiscOutsideGrid, GridTooSmall,
                         QuadratureUnderresolved)
from ecap.grids import GridFunction
from ecap.operators import coords, new_operator
from ecap.oscillation import (Disc, interp_noise_floor, l_oscillation,
                              modulus_of_continuity, oscillation_via_psi,
                              psi_weight)

from conftest import grid_on_box, op_list, random_smooth


def test_constant_law_all_ops():
    # f = x1^2 has L f = 2 c11 everywhere, so O = 2 c11 r^2 / 8
    for op in op_list():
        g = grid_on_box(lambda z: z.real ** 2, half=1.0, spacing=1/512)
        for r in (0.125, 0.25):
            got = l_oscillation(op, g, Disc(0.1 + 0.05j, r))
            want = 2 * op.c11 * r * r / 8
            assert abs(got - want) <= 1e-4 * abs(want)


def test_analytic_oscillation_vanishes():
    # polynomials in the second canonical coordinate are annihilated by
    # both operator factorizations
    for op in op_list():
        g = grid_on_box(lambda z: coords(op, z).z2 ** 3
                        + 0.5 * coords(op, z).z2 ** 2,
                        half=1.0, spacing=1/256)
        scale = float(np.abs(g.values).max())
        got = l_oscillation(op, g, Disc(0.05 - 0.1j, 0.3))
        assert abs(got) <= 1e-6 * scale


def test_routes_agree_on_random_fields():
    rng = np.random.default_rng(21)
    ops = op_list()
    for case in range(12):
        op = ops[case % 3]
        g = grid_on_box(random_smooth(rng), half=1.0, spacing=1/128)
        r = float(rng.uniform(0.1, 0.4))
        c = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
        o1 = l_oscillation(op, g, Disc(c, r))
        o2 = oscillation_via_psi(op, g, Disc(c, r))
        gmax = float(np.abs(g.grad1).max() + np.abs(g.grad2).max())
        assert abs(o1 - o2) <= 1e-4 * (1 + gmax) * r


def test_psi_weight_shape():
    b = Disc(0.2 + 0.1j, 0.5)
    # peak value r^2/(4 pi r^2) = 1/(4 pi); zero on the rim; radial decrease
    assert psi_weight(b, b.center) == pytest.approx(1 / (4 * math.pi))
    assert psi_weight(b, b.center + 0.5) == pytest.approx(0.0, abs=1e-12)
    inner = psi_weight(b, b.center + 0.1)
    outer = psi_weight(b, b.center + 0.3)
    assert inner > outer > 0


def test_disc_outside_grid():
    g = grid_on_box(lambda z: z.real, half=0.5, spacing=1/64)
    with pytest.raises(DiscOutsideGrid):
        l_oscillation(new_operator(1, 0, 1), g, Disc(0.4, 0.2))


def test_underresolved_quadrature_raises():
    # boundary trace of sin(8 x1) carries high harmonics that a 4-node
    # trapezoid rule aliases badly
    g = grid_on_box(lambda z: np.sin(8 * z.real), half=1.0, spacing=1/128)
    with pytest.raises(QuadratureUnderresolved):
        l_oscillation(new_operator(1, 0, 1), g, Disc(0.3 + 0.2j, 0.45),
                      n_boundary=4, n_radial=3)


def test_noise_floor_scales_with_field():
    op = new_operator(1, 0, 1)
    g1 = grid_on_box(lambda z: z.real ** 2, half=0.5, spacing=1/64)
    g2 = grid_on_box(lambda z: 100 * z.real ** 2, half=0.5, spacing=1/64)
    assert interp_noise_floor(op, g2) == pytest.approx(
        100 * interp_noise_floor(op, g1), rel=1e-6)


def test_modulus_of_continuity_linear_field():
    # affine gradient field: omega(r) = |Hessian| * r exactly; here
    # grad f = (2 x1, 0) so omega(r) = 2 r
    g = grid_on_box(lambda z: z.real ** 2, half=1.0, spacing=1/128)
    for r in (0.1, 0.2, 0.4):
        got = modulus_of_continuity(g, r)
        # grid pairs snap inward by up to one cell, never outward
        assert 2 * (r - g.spacing) <= got <= 2 * r * (1 + 1e-9)


def test_modulus_monotone_in_r():
    rng = np.random.default_rng(31)
    g = grid_on_box(random_smooth(rng), half=1.0, spacing=1/64)
    vals = [modulus_of_continuity(g, r) for r in (0.05, 0.1, 0.2, 0.4)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_modulus_requires_gradients():
    g = GridFunction.from_function(lambda z: z.real, origin=-0.5 - 0.5j,
                                   spacing=1/32, nx=33, ny=33)
    from ecap.errors import MissingGradients
    with pytest.raises(MissingGradients):
        modulus_of_continuity(g, 0.1)
    with pytest.raises(GridTooSmall):
        modulus_of_continuity(g.fill_gradients(), 1e-4)


@settings(deadline=None, max_examples=10)
@given(st.floats(0.1, 0.35), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_oscillation_linear_in_f(r, cx, cy):
    op = new_operator(1, 0, 1)
    g1 = grid_on_box(lambda z: z.real ** 2, half=1.0, spacing=1/64)
    g2 = grid_on_box(lambda z: np.abs(z) ** 2, half=1.0, spacing=1/64)
    gs = grid_on_box(lambda z: z.real ** 2 + np.abs(z) ** 2,
                     half=1.0, spacing=1/64)
    b = Disc(complex(cx, cy), r)
    lhs = l_oscillation(op, gs, b)
    rhs = l_oscillation(op, g1, b) + l_oscillation(op, g2, b)
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))
