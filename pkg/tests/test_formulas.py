import pytest
from hypothesis import given, strategies as st

from hitchin_kit import formulas as f
from hitchin_kit.errors import DomainError

from oracles import spectral_genus_rh


def riemann_roch_h0(g, i):
    deg = i * (4 * g - 4) // 2
    if i == 0:
        return 1
    if i == 1:
        return g
    return deg - g + 1  # deg > 2g - 2


@pytest.mark.parametrize("g,i,want", [(2, 2, 3), (2, 0, 1), (3, 1, 3)])
def test_h0_examples(g, i, want):
    assert f.h0_canonical_power(g, i) == want


@given(st.integers(2, 30), st.integers(0, 8))
def test_h0_riemann_roch(g, i):
    assert f.h0_canonical_power(g, i) == riemann_roch_h0(g, i)


def test_group_parsing():
    assert f.parse_group("gl(3)") == ("GL", 3)
    assert f.parse_group(("Sp", 4)) == ("Sp", 4)
    for bad in ("U(2)", "Sp(3)", "SO(2)", "GL(0)", "SL2"):
        with pytest.raises(DomainError):
            f.parse_group(bad)


def test_dimension_examples():
    assert f.moduli_dim("GL(2)", 2) == 10
    assert f.hitchin_base_dim("SL(2)", 2) == 3 and f.moduli_dim("SL(2)", 2) == 6
    assert f.hitchin_base_dim("SL(3)", 2) == 8 and f.moduli_dim("SL(3)", 2) == 16


@pytest.mark.parametrize("group", ["SL(4)", "SO(5)", "SO(6)", "SO(7)", "Sp(4)", "Sp(6)"])
def test_base_is_half_moduli(group):
    # semisimple groups: sum of (2d - 1) over exponents equals dim G
    for g in range(2, 6):
        assert 2 * f.hitchin_base_dim(group, g) == f.moduli_dim(group, g)


def test_exponents():
    assert f.exponents("SO(6)") == [2, 4, 3]  # Pfaffian replaces degree 6
    assert f.exponents("SO(4)") == [2, 2]
    assert f.exponents("SO(7)") == [2, 4, 6]
    assert f.exponents("Sp(6)") == [2, 4, 6]


def test_genus_examples():
    assert f.spectral_genus(2, 2) == 5
    assert f.spectral_genus(1, 7) == 7
    assert f.upp_genera(2, 2) == (17, 7)


@given(st.integers(1, 8), st.integers(2, 20))
def test_spectral_genus_riemann_hurwitz(n, g):
    assert f.spectral_genus(n, g) == spectral_genus_rh(n, g)


def test_parabolic_dim_examples():
    assert f.parabolic_moduli_dim(0, 2, 4) == 2
    assert f.parabolic_moduli_dim(2, 1, 0) == 4
    assert f.parabolic_moduli_dim(1, 2, 1) == 4
    with pytest.raises(DomainError):
        f.parabolic_moduli_dim(0, 2, 1)


def test_torsion():
    assert [f.torsion_two_count(d) for d in (0, 1, 3)] == [1, 4, 64]
    assert f.torsion_two_count(f.spectral_genus(2, 2) - 2) == 64


def test_genus_domain():
    with pytest.raises(DomainError):
        f.moduli_dim("GL(2)", 1)
    with pytest.raises(DomainError):
        f.h0_canonical_power(2, -1)
