import random

import numpy as np
import pytest

from hitchin_kit import branes as b
from hitchin_kit.errors import DomainError, StructureError
from hitchin_kit.exactalg import Poly, PolyMatrix, char_poly, eigenvalues_numeric, multiset_close
from hitchin_kit.higgs import GroupTag, HiggsPair, StructureData

from oracles import random_poly_matrix, random_trace_free, to_complex_matrix

Z = Poly.z()

FORMS = [("sl_n_R", {"n": 3}), ("su_star_2m", {"m": 2}), ("su_p_q", {"p": 1, "q": 2}),
         ("so_p_q", {"p": 2, "q": 2}), ("sp_2n_R", {"n": 2}), ("sp_2p_2q", {"p": 1, "q": 1}),
         ("so_star_2m", {"m": 2})]


def spec(form, params):
    return b.RealFormSpec(form, dict(params))


def sl(phi):
    return HiggsPair(phi, GroupTag.SL, structure=StructureData(det_trivial=True))


@pytest.mark.parametrize("form,params", FORMS)
def test_theta_is_involutive_automorphism(form, params):
    s = spec(form, params)
    rng = random.Random(hash(form) % 1000)
    x = random_poly_matrix(rng, s.size, 1)
    y = random_poly_matrix(rng, s.size, 1)
    assert b.apply_theta(s, b.apply_theta(s, x)) == x
    bracket = lambda u, v: u @ v - v @ u
    assert b.apply_theta(s, bracket(x, y)) == bracket(b.apply_theta(s, x), b.apply_theta(s, y))


def test_real_form_validation():
    with pytest.raises(DomainError):
        spec("su_p_q", {"p": 1})
    with pytest.raises(DomainError):
        spec("gl_n_R", {"n": 2})
    with pytest.raises(DomainError):
        b.apply_theta(spec("sl_n_R", {"n": 3}), PolyMatrix.identity(2))
    assert spec("sp_2p_2q", {"p": 1, "q": 2}).size == 6


def test_structural_matrices():
    j = b.structural_matrix("Jn", 2)
    assert j @ j == -PolyMatrix.identity(4)
    assert b.structural_matrix("Ipq", 1, 2) == PolyMatrix.diag([-1, 1, 1])
    assert b.structural_matrix("Kpq", 1, 1) == PolyMatrix.diag([-1, 1, -1, 1])
    with pytest.raises(DomainError):
        b.structural_matrix("Lpq", 1, 1)


def test_fixed_point_split_form():
    phi = PolyMatrix([[0, Z], [1, 0]])
    rep = b.theta_fixed_point_check(spec("sl_n_R", {"n": 2}), sl(phi))
    assert rep.verdict == "Pass" and rep.base_condition
    g = rep.matrix
    assert -b.apply_theta(spec("sl_n_R", {"n": 2}), phi) @ g == g @ phi


def test_fixed_point_base_gate():
    phi = PolyMatrix([[0, Z], [1, 0]])
    phi3 = PolyMatrix([[0, 0, Z], [1, 0, 0], [0, 1, 0]])  # eta^3 - z: odd invariant survives
    rep = b.theta_fixed_point_check(spec("sl_n_R", {"n": 3}), sl(phi3))
    assert rep.verdict == "NotFound" and not rep.base_condition and not rep.tried
    assert b.theta_fixed_point_check(spec("su_p_q", {"p": 1, "q": 1}), sl(phi)).base_condition


def test_fixed_point_user_conjugator():
    phi = PolyMatrix([[Z, 1], [0, -Z]])
    s = spec("su_p_q", {"p": 1, "q": 1})
    rep = b.theta_fixed_point_check(s, sl(phi), [PolyMatrix([[0, 1], [1, 0]])])
    assert rep.tried[0] == "identity"
    if rep.verdict == "Pass":
        assert -b.apply_theta(s, phi) @ rep.matrix == rep.matrix @ phi
    with pytest.raises(DomainError):
        b.theta_fixed_point_check(s, sl(phi), [PolyMatrix([[1, 1], [1, 1]])])


@pytest.mark.parametrize("n_plus,u,want", [
    (0, 0, 2), (1, 0, 2), (2, 0, 8), (0, 2, 1), (1, 2, 4), (2, 2, 16)])
def test_aba_count(n_plus, u, want):
    assert b.aba_component_count(b.RealStructureInvariants(n_plus=n_plus, u=u)) == want


def test_aba_odd_u_rejected():
    for n_plus in range(3):
        with pytest.raises(DomainError):
            b.aba_component_count(b.RealStructureInvariants(n_plus=n_plus, u=1))


def test_prym_count_and_gate():
    assert b.prym_fixed_component_count(b.RealStructureInvariants(n_zero=2, u=2)) == 4
    assert b.prym_fixed_component_count(b.RealStructureInvariants(n_zero=0, u=4)) == 2
    with pytest.raises(DomainError):
        b.prym_fixed_component_count(b.RealStructureInvariants(n_zero=2, u=0))
    with pytest.raises(DomainError):
        b.prym_fixed_component_count(b.RealStructureInvariants(n_zero=2, u=2), branch_point_fixed=False)
    with pytest.raises(DomainError):
        b.RealStructureInvariants(n_plus=3, n_circles=2)


def test_isogeny_spectra():
    rng = random.Random(31)
    for _ in range(10):
        p1, p2 = random_trace_free(rng, 2), random_trace_free(rng, 2)
        z0 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        l1 = np.linalg.eigvals(to_complex_matrix(p1, z0))
        l2 = np.linalg.eigvals(to_complex_matrix(p2, z0))
        img = np.linalg.eigvals(to_complex_matrix(b.isogeny_I2(p1, p2), z0))
        assert multiset_close(img, [a + c for a in l1 for c in l2], 1e-6)
        p = random_trace_free(rng, 4)
        lam = np.linalg.eigvals(to_complex_matrix(p, z0))
        img3 = b.isogeny_I3(p)
        want = [lam[i] + lam[j] for i in range(4) for j in range(i + 1, 4)]
        assert multiset_close(np.linalg.eigvals(to_complex_matrix(img3, z0)), want, 1e-6)
        assert b.is_wedge_skew_adjoint(img3)


def test_isogeny_inputs():
    with pytest.raises(StructureError):
        b.isogeny_I2(PolyMatrix([[1, 0], [0, 0]]), PolyMatrix.diag([1, -1]))
    with pytest.raises(DomainError):
        b.isogeny_I3(PolyMatrix.diag([1, -1]))
    q = b.wedge_form(4)
    assert q.T == q and q @ q == PolyMatrix.identity(6)
