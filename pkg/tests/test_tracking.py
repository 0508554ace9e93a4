import cmath
import math
import random

import numpy as np
import pytest

from hitchin_kit import tracking

KERNELS = [tracking.py_track_path]
if tracking.c_track_path is not None:
    KERNELS.append(tracking.c_track_path)


def circle(radius, steps, centre=0):
    return [centre + radius * cmath.exp(2j * math.pi * s / steps) for s in range(steps + 1)]


def roots_at(coeffs, z):
    c = [1.0] + [np.polyval(list(reversed(row)), z) for row in coeffs]
    return list(np.roots(c))


def test_backend_name():
    assert tracking.BACKEND in ("cython", "python")
    assert (tracking.BACKEND == "cython") == (tracking.c_track_path is not None)


@pytest.mark.parametrize("kernel", KERNELS)
def test_square_root_swaps_sheets(kernel):
    coeffs = [[0, 0], [0, -1]]  # eta^2 - z
    path = circle(1.0, 64)
    start = roots_at(coeffs, path[0])
    roots, status, gap, steps = kernel(coeffs, path, start)
    assert status == tracking.OK and steps >= 64
    assert abs(roots[0] - start[1]) < 1e-9 and abs(roots[1] - start[0]) < 1e-9
    assert gap == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("kernel", KERNELS)
def test_unbranched_loop_returns_home(kernel):
    coeffs = [[0, 0], [0, -1]]
    path = circle(0.5, 32, centre=2.0)
    start = roots_at(coeffs, path[0])
    roots, status, _, _ = kernel(coeffs, path, start)
    assert status == tracking.OK
    assert max(abs(a - b) for a, b in zip(roots, start)) < 1e-9


@pytest.mark.parametrize("kernel", KERNELS)
def test_collision_reported(kernel):
    coeffs = [[0, 0], [0, -1]]
    path = [1.0, 0.5, 0.0, -0.5]  # straight through the branch point
    roots, status, gap, _ = kernel(coeffs, path, roots_at(coeffs, 1.0))
    assert roots is None and status != tracking.OK
    assert status in tracking.STATUS_NAMES


def test_kernels_agree_on_random_fibres():
    if tracking.c_track_path is None:
        pytest.skip("compiled kernel not built")
    rng = random.Random(4)
    for _ in range(10):
        n = rng.randint(2, 5)
        coeffs = [[complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3)] for _ in range(n)]
        path = circle(2.0, 400)
        start = roots_at(coeffs, path[0])
        a = tracking.py_track_path(coeffs, path, start)
        b = tracking.c_track_path(coeffs, path, start)
        assert a[1] == b[1]
        if a[1] == tracking.OK:
            assert max(abs(x - y) for x, y in zip(a[0], b[0])) < 1e-9
