"""Roots, kernel constants, closed-form fundamental solutions, and the
discrete operator stencil."""

import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ecap.errors import NotElliptic, SingularPoint
from ecap.grids import GridFunction
from ecap.operators import (apply_L, cartesian_grad_phi, coords,
                            derivation_coeffs, grad_phi, kernels,
                            new_operator, phi, phi_field)

from conftest import op_list


def test_laplace_roots():
    op = new_operator(1, 0, 1)
    assert op.lambda1 == pytest.approx(1j, abs=1e-14)
    assert op.lambda2 == pytest.approx(-1j, abs=1e-14)
    assert not op.repeated
    assert op.nu == 1


def test_bitsadze_roots():
    op = new_operator(0.25, 0.25j, -0.25)
    assert op.lambda1 == pytest.approx(-1j, abs=1e-14)
    assert op.lambda2 == pytest.approx(-1j, abs=1e-14)
    assert op.repeated
    assert op.nu == -1


def test_roots_sorted_descending():
    for op in op_list():
        key1 = (op.lambda1.imag, op.lambda1.real)
        key2 = (op.lambda2.imag, op.lambda2.real)
        assert key1 >= key2


def test_not_elliptic_rejected():
    with pytest.raises(NotElliptic):
        new_operator(1, 0, -1)       # real characteristic directions
    with pytest.raises(NotElliptic):
        new_operator(1, 1, 1)        # discriminant zero with real root


def test_k1_calibration_closed_forms():
    # the two operators with textbook kernels: 1/(4 pi) and 1/pi
    lap = new_operator(1, 0, 1)
    bit = new_operator(0.25, 0.25j, -0.25)
    assert abs(lap.k1 - 1 / (4 * math.pi)) < 1e-6 * abs(lap.k1)
    assert abs(bit.k1 - 1 / math.pi) < 1e-6 * abs(bit.k1)


def test_phi_closed_form_laplace():
    op = new_operator(1, 0, 1)
    rng = np.random.default_rng(11)
    z = rng.normal(scale=2, size=100) + 1j * rng.normal(scale=2, size=100)
    for zz in z:
        want = math.log(abs(zz * np.conj(zz)) / 4) / (4 * math.pi)
        got = phi(op, complex(zz))
        assert abs(got - want) <= 1e-12 * max(abs(want), 1e-3)


def test_phi_closed_form_bitsadze():
    op = new_operator(0.25, 0.25j, -0.25)
    rng = np.random.default_rng(12)
    z = rng.normal(scale=2, size=100) + 1j * rng.normal(scale=2, size=100)
    for zz in z:
        want = np.conj(zz) / zz / math.pi
        got = phi(op, complex(zz))
        assert abs(got - want) <= 1e-12 * abs(want)


def test_phi_singular_at_origin():
    for op in op_list():
        with pytest.raises(SingularPoint):
            phi(op, 0j)


def test_coords_orthogonality():
    # derivations applied to the canonical coordinates give the identity
    rng = np.random.default_rng(3)
    for op in op_list():
        (a1, b1), (a2, b2) = derivation_coeffs(op)
        z = complex(rng.normal(), rng.normal())
        h = 1e-6
        for s, (a, b) in enumerate(((a1, b1), (a2, b2))):
            for t, pick in enumerate((lambda c: c.z1, lambda c: c.z2)):
                dx = (pick(coords(op, z + h)) - pick(coords(op, z - h))) \
                    / (2 * h)
                dy = (pick(coords(op, z + 1j * h))
                      - pick(coords(op, z - 1j * h))) / (2 * h)
                val = a * dx + b * dy
                want = 1.0 if s == t else 0.0
                assert abs(val - want) < 1e-8


def test_grad_phi_matches_finite_differences():
    rng = np.random.default_rng(4)
    for op in op_list():
        for _ in range(20):
            z = complex(rng.normal(scale=1.5), rng.normal(scale=1.5))
            if abs(z) < 0.3:
                continue
            h = 1e-6 * max(1.0, abs(z))
            dx = (phi(op, z + h) - phi(op, z - h)) / (2 * h)
            dy = (phi(op, z + 1j * h) - phi(op, z - 1j * h)) / (2 * h)
            (a1, b1), (a2, b2) = derivation_coeffs(op)
            g1, g2 = grad_phi(op, z)
            assert abs((a1 * dx + b1 * dy) - g1) < 1e-5 * max(1, abs(g1))
            assert abs((a2 * dx + b2 * dy) - g2) < 1e-5 * max(1, abs(g2))


def test_phi_annihilated_away_from_origin():
    # L(Phi) = 0 off the source point: sample a small patch and apply the
    # discrete operator; fourth-order stencil on an analytic field
    for op in op_list():
        g = GridFunction.from_function(
            lambda z: phi_field(op, z), origin=(1.0 + 0.75j), spacing=1/512,
            nx=33, ny=33)
        lg = apply_L(op, g)
        m = lg.invalid_margin
        core = lg.values[m:-m, m:-m]
        assert np.abs(core).max() < 1e-6


def test_apply_L_against_symbolic_oracle():
    # independent oracle: sympy differentiates a random polynomial exactly
    x1, x2 = sympy.symbols("x1 x2", real=True)
    rng = np.random.default_rng(5)
    cs = rng.normal(size=6)
    expr = (cs[0] * x1**4 + cs[1] * x1**3 * x2 + cs[2] * x1**2 * x2**2
            + cs[3] * x2**4 + cs[4] * x1**2 * x2 + cs[5] * x1 * x2)
    for op in op_list():
        sym = (op.c11 * sympy.diff(expr, x1, 2)
               + 2 * op.c12 * sympy.diff(expr, x1, x2)
               + op.c22 * sympy.diff(expr, x2, 2))
        want_fn = sympy.lambdify((x1, x2), sym, "numpy")
        g = GridFunction.from_function(
            lambda z: cs[0] * z.real**4 + cs[1] * z.real**3 * z.imag
            + cs[2] * z.real**2 * z.imag**2 + cs[3] * z.imag**4
            + cs[4] * z.real**2 * z.imag + cs[5] * z.real * z.imag,
            origin=(-1 - 1j), spacing=1/64, nx=129, ny=129)
        lg = apply_L(op, g)
        m = lg.invalid_margin
        pts = g.points()[m:-m, m:-m]
        want = want_fn(pts.real, pts.imag)
        got = lg.values[m:-m, m:-m]
        # degree-4 polynomial: the 4th-order stencil differentiates the
        # quartic terms with an O(h^2) bias only through the cross stencil
        assert np.abs(got - want).max() < 1e-6 * (1 + np.abs(want).max())


@settings(deadline=None, max_examples=25)
@given(st.floats(0.2, 3), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4),
       st.floats(0.5, 2))
def test_random_operators_elliptic_invariants(c11, a, b, c22):
    # perturbed coefficients stay elliptic while |c12|^2 < c11 c22
    c12 = complex(a, b) * math.sqrt(c11 * c22) * 0.6
    op = new_operator(c11, c12, c22)
    assert op.lambda1.imag != 0 and op.lambda2.imag != 0
    assert op.nu in (-1, 1)
    # kernels are homogeneous of degree -1
    z = 0.7 + 0.4j
    k1a, k2a = kernels(op, z)
    k1b, k2b = kernels(op, 3 * z)
    assert complex(k1b) == pytest.approx(complex(k1a) / 3, rel=1e-12)
    assert complex(k2b) == pytest.approx(complex(k2a) / 3, rel=1e-12)
    # cartesian gradient of phi agrees with plain finite differences
    h = 1e-6
    gx, gy = cartesian_grad_phi(op, z)
    dx = (phi(op, z + h) - phi(op, z - h)) / (2 * h)
    dy = (phi(op, z + 1j * h) - phi(op, z - 1j * h)) / (2 * h)
    assert complex(gx) == pytest.approx(dx, rel=1e-5, abs=1e-8)
    assert complex(gy) == pytest.approx(dy, rel=1e-5, abs=1e-8)
