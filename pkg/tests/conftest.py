import numpy as np
import pytest

from ecap.grids import GridFunction
from ecap.operators import new_operator

# the three standing test operators: distinct conjugate roots, repeated
# root, and a generic distinct pair with complex coefficients
OPS = {
    "laplace": (1.0, 0.0, 1.0),
    "bitsadze": (0.25, 0.25j, -0.25),
    "generic": (1.0, 0.25 + 0.15j, 0.9 + 0.3j),
}


@pytest.fixture(scope="session")
def ops():
    return {name: new_operator(*c) for name, c in OPS.items()}


def op_list():
    return [new_operator(*c) for c in OPS.values()]


def bump(center: complex, radius: float, power: int = 4):
    """C^{power-1} compactly supported radial bump."""
    def fn(z):
        rho2 = (np.abs(np.asarray(z, dtype=complex) - center) / radius) ** 2
        return np.where(rho2 < 1.0, (1.0 - rho2) ** power, 0.0)
    return fn


def grid_on_box(fn, half: float, spacing: float, center: complex = 0j,
                order: int = 4) -> GridFunction:
    n = 2 * int(round(half / spacing)) + 1
    origin = center - (n // 2) * spacing * (1 + 1j)
    g = GridFunction.from_function(fn, origin=origin, spacing=spacing,
                                   nx=n, ny=n)
    return g.fill_gradients(order=order)


def random_smooth(rng, scale: float = 1.0):
    """Random low-frequency trigonometric field, C-infinity."""
    k = rng.integers(1, 4, size=(3, 2))
    amp = rng.normal(size=3) + 1j * rng.normal(size=3)
    phase = rng.uniform(0, 2 * np.pi, size=3)

    def fn(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for (k1, k2), a, p in zip(k, amp, phase):
            out += a * np.sin(k1 * z.real + k2 * z.imag + p)
        return scale * out
    return fn
