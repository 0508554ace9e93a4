import math
import random
from fractions import Fraction

import numpy as np
import pytest

from hitchin_kit import wild
from hitchin_kit.errors import DegeneracyError, DomainError, StructureError
from hitchin_kit.exactalg import ExactComplex

from oracles import grid_directions, is_anti_stokes


def angles(dirs):
    return [d.angle.value for d in dirs]


def test_first_order_directions():
    dirs = wild.anti_stokes(wild.single_pole(2, (ExactComplex(1, 0) / 2, ExactComplex(-1, 0) / 2)))
    assert [d.angle.pi_multiple for d in dirs] == [0, 1]
    assert [d.roots for d in dirs] == [("21",), ("12",)]


@pytest.mark.parametrize("k", [1, 2, 3, 5])
@pytest.mark.parametrize("a", [ExactComplex(1), ExactComplex(0, 1), ExactComplex(-2, 2), ExactComplex(3, 1)])
def test_directions_against_grid(a, k):
    p = wild.single_pole(k + 1, (a, ExactComplex(0)))
    dirs = wild.anti_stokes(p)
    assert len(dirs) == 2 * k
    for d in dirs:
        assert is_anti_stokes(complex(a), k, d.angle.value, 1e-9)
        assert wild.membership(a, k, d.angle.value) == d.roots[0]
    grid = grid_directions(complex(a), k, points=2 ** 16)
    # each true direction has a grid sign change within one grid step
    step = 2 * math.pi / 2 ** 16
    for t in angles(dirs):
        assert min(min(abs(t - g), 2 * math.pi - abs(t - g)) for g in grid) <= step


def test_off_direction_rejected():
    rng = random.Random(0)
    a, k = ExactComplex(1), 3
    dirs = angles(wild.anti_stokes(wild.single_pole(4, (a, 0))))
    for _ in range(500):
        t = rng.uniform(0, 2 * math.pi)
        if min(abs(t - d) for d in dirs) < 1e-6:
            continue
        assert wild.membership(a, k, t) is None


def test_numeric_leading_term():
    dirs = wild.anti_stokes(wild.single_pole(3, (complex(0.3, 0.7), 0)))
    assert not any(d.angle.is_exact for d in dirs)
    for d in dirs:
        assert is_anti_stokes(complex(0.3, 0.7), 2, d.angle.value)


def test_half_periods_and_sectors():
    dirs = wild.anti_stokes(wild.single_pole(4, (1, 0)))
    hp = wild.half_periods(dirs)
    assert len(hp) == 6 and all(h.multiplicity == 3 for h in hp)
    assert {r for h in hp for d in h.directions for r in d.roots} == {"12", "21"}
    sec = wild.sectors(dirs)
    assert sec[-1][1] == dirs[0].angle


def test_stokes_factor_shapes():
    dirs = wild.anti_stokes(wild.single_pole(2, (1, -1)))
    for d in dirs:
        s = wild.stokes_factor(d, 2.5)
        kind, _ = wild.stokes_factor_shape(d)
        assert np.allclose(np.diag(s), 1)
        assert (s[0, 1] == 2.5) == (kind == "upper") == (d.roots == ("12",))


def test_formal_monodromy():
    half = ExactComplex(1, 0) / 2
    p = wild.single_pole(2, (1, 0), (half, -half))
    assert np.array_equal(wild.formal_monodromy(p), -np.eye(2))
    for shift in range(-3, 4):
        q = wild.single_pole(2, (1, 0), (half + shift, -half - shift))
        assert np.array_equal(wild.formal_monodromy(q), -np.eye(2))
    q = wild.single_pole(2, (1, 0), (ExactComplex(1, 0) / 4, ExactComplex(0)))
    assert np.array_equal(wild.formal_monodromy(q), np.diag([1j, 1]))


def test_pole_validation():
    with pytest.raises(DegeneracyError):
        wild.single_pole(3, (1, 1))
    with pytest.raises(DomainError):
        wild.leading_difference(wild.single_pole(1, (0, 0)))
    with pytest.raises(StructureError):
        wild.Pole(0, 2, ((1, 0),))
    with pytest.raises(StructureError):
        wild.PolarData((wild.Pole(0, 1, ((1, 0),)), wild.Pole(1, 1, ((1, 0),))), declared_global=True)
    ok = wild.PolarData((wild.Pole(0, 1, ((1, 0),)), wild.Pole(1, 1, ((-1, 0),))), declared_global=True)
    assert ok.declared_global


def test_report_json():
    rep = wild.stokes_report(wild.single_pole(4, (1, 0)))
    js = rep.to_json()
    assert js["k"] == 3 and len(js["directions"]) == 6 and js["exact_angles"]
    assert js["directions"][0]["angle"] == {"num": 0, "den": 1, "pi": True}
    assert str(rep.directions[1].angle) == "pi/3"
