"""Acceptance criteria, each checked against its tolerance and time limit.

Run under pytest (one test per criterion, a pass/fail line per criterion in
the terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import json
import math
import os
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from sympy.combinatorics import Permutation

sys.path.insert(0, os.path.dirname(__file__))

from hitchin_kit import branes, cli, formulas, quiver, spectral, wild
from hitchin_kit.errors import DomainError
from hitchin_kit.exactalg import (ExactComplex, Poly, PolyMatrix, char_poly, coeffs_to_traces,
                                  det, pfaffian, power_traces, traces_to_coeffs)
from hitchin_kit.higgs import GroupTag, HiggsPair, StructureData, check_structure

from oracles import (grid_directions, is_anti_stokes, quiver_bruteforce, random_constant_matrix,
                     random_skew, random_so, random_trace_free, spectral_genus_rh,
                     to_complex_matrix)

RESULTS = {}


# --- criteria ---------------------------------------------------------------------------

def ac1():
    for n in range(1, 7):
        for g in range(2, 11):
            group = f"GL({n})"
            assert formulas.moduli_dim(group, g) == 2 * n * n * (g - 1) + 2
            assert 2 * formulas.hitchin_base_dim(group, g) == formulas.moduli_dim(group, g)


def ac2():
    for n in range(1, 7):
        for g in range(2, 11):
            assert formulas.spectral_genus(n, g) == 1 + n * n * (g - 1) == spectral_genus_rh(n, g)
    assert formulas.upp_genera(2, 2) == (17, 7)


def ac3():
    rng = random.Random(2024)
    for n in range(2, 7):
        for _ in range(100):
            m = random_constant_matrix(rng, n)
            c = list(char_poly(m))
            t = list(coeffs_to_traces(c))
            assert list(traces_to_coeffs(t)) == c
            assert list(power_traces(m)) == t
            assert list(char_poly(PolyMatrix.companion(c))) == c


def ac4():
    rng = random.Random(45)
    for n in (5, 7):
        for _ in range(50):
            phi, q = random_so(rng, n, max_degree=1)
            h = HiggsPair(phi, GroupTag.SO_ODD, structure=StructureData(form=q))
            assert check_structure(h).passed
            c = char_poly(phi)  # det(x - phi) = x^n + c_1 x^(n-1) + ... + c_n
            assert not c[-1]  # exact factor x
            assert all(not c[k - 1] for k in range(1, n + 1, 2))


def ac5():
    rng = random.Random(55)
    for n in (4, 6):
        for _ in range(100):
            m = random_skew(rng, n)
            pf = pfaffian(m)
            assert pf * pf == det(m)


def ac6():
    one = wild.single_pole(2, (ExactComplex(1), ExactComplex(0)))
    d1 = wild.anti_stokes(one)
    assert len(d1) == 2
    assert sorted(d.angle.pi_multiple for d in d1) == [0, 1]
    three = wild.single_pole(4, (ExactComplex(1), ExactComplex(0)))
    d3 = wild.anti_stokes(three)
    assert len(d3) == 6
    rng = random.Random(6)
    for a, k, dirs in ((1, 1, d1), (1, 3, d3)):
        angles = [d.angle.value for d in dirs]
        for t in angles:
            assert is_anti_stokes(a, k, t)
        points = 2 ** 14
        grid = grid_directions(a, k, points=points)
        assert len(grid) == len(angles)
        step = 2 * math.pi / points
        assert all(min(abs(g - t) for t in angles + [2 * math.pi]) <= step for g in grid)
        rejected = 0
        while rejected < 1000:
            t = rng.uniform(0, 2 * math.pi)
            if min(abs(t - s) for s in angles + [2 * math.pi]) < 1e-6:
                continue
            assert not is_anti_stokes(a, k, t)
            rejected += 1


def ac7():
    half = ExactComplex(Fraction(1, 2))
    for shift in range(-5, 6):
        p = wild.single_pole(2, (1, 0), (half + shift, -half - shift))
        m = wild.formal_monodromy(p)
        assert np.array_equal(m, -np.eye(2))
    for k in range(1, 6):
        t = ExactComplex(Fraction(1, 4))
        base = wild.formal_monodromy(wild.single_pole(2, (1, 0), (t, -t)))
        shifted = wild.formal_monodromy(wild.single_pole(2, (1, 0), (t + k, -t - k)))
        assert np.array_equal(base, shifted)


def _balanced_alpha(rng, n, r):
    arms = [Fraction(rng.randint(1, 4)) for _ in range(n)]
    return (-sum(arms) / r,) + tuple(arms)


def ac8():
    rng = random.Random(88)
    for trial in range(500):
        n, r = rng.randint(1, 5), rng.randint(1, 3)
        x = [[rng.choice([0, 1, 1, -1, 2]) for _ in range(r)] for _ in range(n)]
        alpha = _balanced_alpha(rng, n, r)
        got = quiver.star_stability(quiver.QuiverRep(quiver.StarQuiver(n, r), tuple(x)), alpha)
        assert got.verdict == quiver_bruteforce(x, alpha, seed=trial), (x, alpha)


def ac9():
    for seed in range(20):
        n, r = 3 + seed % 4, 1 + (seed // 4) % 2
        alpha = quiver.default_alpha(n, seed)
        rep = quiver.solve_level_set(quiver.StarQuiver(n, r), alpha, seed=seed)
        assert rep.residual <= 1e-9
        higgs, report = quiver.hyperpolygon_to_higgs(rep.point, list(range(n)))
        assert report.passed
        res = [np.outer(np.asarray(xi, dtype=complex), np.asarray(yi, dtype=complex))
               for xi, yi in zip(rep.point.x, rep.point.y)]
        for m in res:
            assert abs(np.trace(m)) <= 1e-9
            assert np.linalg.norm(m @ m, 2) <= 1e-9
            assert np.linalg.matrix_rank(m, tol=1e-9) <= 1
        assert np.linalg.norm(sum(res), 2) <= 1e-9


def ac10():
    assert formulas.parabolic_moduli_dim(0, 2, 4) == 2


def _wedge_form():
    basis = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    q = np.zeros((6, 6), dtype=int)
    for a, s in enumerate(basis):
        for b, t in enumerate(basis):
            if not set(s) & set(t):
                q[a, b] = Permutation(list(s + t)).signature()
    return PolyMatrix(q.tolist())


def ac11():
    rng = random.Random(111)
    q = _wedge_form()
    for _ in range(50):
        p1, p2, p = random_trace_free(rng, 2), random_trace_free(rng, 2), random_trace_free(rng, 4)
        z0 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        l1 = np.linalg.eigvals(to_complex_matrix(p1, z0))
        l2 = np.linalg.eigvals(to_complex_matrix(p2, z0))
        img2 = np.linalg.eigvals(to_complex_matrix(branes.isogeny_I2(p1, p2), z0))
        assert _multiset_match(img2, [a + b for a in l1 for b in l2], 1e-6)
        lam = np.linalg.eigvals(to_complex_matrix(p, z0))
        i3 = branes.isogeny_I3(p)
        img3 = np.linalg.eigvals(to_complex_matrix(i3, z0))
        assert _multiset_match(img3, [lam[i] + lam[j] for i in range(4) for j in range(i + 1, 4)], 1e-6)
        assert (q @ i3 + i3.T @ q).is_zero()


def _multiset_match(a, b, tol):
    b = list(b)
    for x in a:
        j = min(range(len(b)), key=lambda k: abs(b[k] - x))
        if abs(b[j] - x) > tol * (1 + abs(x)):
            return False
        b.pop(j)
    return not b


def ac12():
    cases = 0
    for n_plus in range(3):
        for u in range(3):
            inv = branes.RealStructureInvariants(n_plus=n_plus, u=u)
            if u % 2:
                with pytest.raises(DomainError):
                    branes.aba_component_count(inv)
                continue
            s = 2 * n_plus + u // 2
            d = s - 1 if s > 0 else 1
            assert branes.aba_component_count(inv) == 2 ** d
            cases += 1
    assert cases == 6
    for n0 in range(3):
        for u in (2, 4, 6):
            inv = branes.RealStructureInvariants(n_zero=n0, u=u)
            assert branes.prym_fixed_component_count(inv) == 2 ** (n0 + u // 2 - 1)
            with pytest.raises(DomainError):
                branes.prym_fixed_component_count(inv, branch_point_fixed=False)
        with pytest.raises(DomainError):
            branes.prym_fixed_component_count(branes.RealStructureInvariants(n_zero=n0, u=0))


ETA, Z = sp.symbols("eta z")


def _sym(p):
    return sum((sp.Rational(int(c.re.numerator), int(c.re.denominator)) +
                sp.I * sp.Rational(int(c.im.numerator), int(c.im.denominator))) * Z ** k
               for k, c in enumerate(p.coeffs))


def _curve(coeffs):
    return spectral.SpectralCurve.from_coeffs([Poly.coerce(c) for c in coeffs])


def _check_relation(rep):
    assert rep.product_relation
    n = len(rep.permutations[0])
    total = tuple(range(n))
    for p in rep.permutations:  # lassos in order, each applied after the previous ones
        total = tuple(p[total[i]] for i in range(n))
    assert total == tuple(rep.infinity_permutation)


def ac13():
    zp = Poly.z()
    rep = spectral.monodromy_transitive(_curve([0, -zp]))
    assert rep.label == "Transitive"
    _check_relation(rep)
    rng = random.Random(1313)
    done = 0
    while done < 10:
        coeffs = [Poly([rng.randint(-3, 3) for _ in range(k + 1)]) for k in (1, 2, 3)]
        f = ETA ** 3 + sum(_sym(c) * ETA ** (2 - i) for i, c in enumerate(coeffs))
        factors = sp.factor_list(sp.expand(f), ETA, Z, gaussian=True)[1]
        if any(sp.degree(g, ETA) < 3 for g, _ in factors):
            continue  # not generic
        rep = spectral.monodromy_transitive(_curve(coeffs))
        assert rep.label == "Transitive", rep.reason
        _check_relation(rep)
        done += 1
    done = 0
    while done < 10:
        u = Poly([rng.randint(-3, 3), rng.choice([-2, -1, 1, 2])])
        v = Poly([rng.randint(-3, 3), rng.randint(-3, 3)])
        w = Poly([rng.randint(-3, 3), rng.randint(-3, 3), rng.choice([-1, 1])])
        disc = sp.Poly(sp.expand(_sym(v) ** 2 - 4 * _sym(w)), Z)
        if disc.degree() < 1 or sp.degree(sp.gcd(disc, disc.diff(Z)), Z) > 0:
            continue  # the quadratic factor must be irreducible with simple branch points
        rep = spectral.monodromy_transitive(_curve([u + v, u * v + w, u * w]))
        assert rep.label == "Intransitive", rep.reason
        _check_relation(rep)
        lone = -complex(u.eval_numeric(rep.base_point))
        fixed = min(range(3), key=lambda i: abs(rep.base_roots[i] - lone))
        assert sorted(map(sorted, rep.orbits)) == sorted([[fixed], sorted(set(range(3)) - {fixed})])
        done += 1


def ac14():
    prym_dim = formulas.spectral_genus(2, 2) - 2
    assert prym_dim == 3
    assert formulas.torsion_two_count(prym_dim) == 64 == 2 ** (2 * prym_dim)


def ac15():
    directory = cli.shipped_corpus()
    tasks = cli.corpus_tasks(directory)
    assert len(tasks) >= 25
    table = cli.run_corpus(directory)
    assert table["totals"] == {"pass": len(tasks), "fail": 0, "skip": 0}, cli.format_table(table)
    for path in tasks:
        first = cli.dumps(cli.run_file(path)[1])
        assert cli.dumps(cli.run_file(path)[1]) == first
        expected = json.loads(cli.expected_path(path).read_text(encoding="utf-8"))
        assert first == cli.dumps(expected["report"])


CRITERIA = [
    (1, "dimension formulas", 1, ac1),
    (2, "genus formulas", 1, ac2),
    (3, "Newton and companion round trips", 10, ac3),
    (4, "SO(2n+1) char-poly fingerprint", 10, ac4),
    (5, "Pfaffian squared is det", 10, ac5),
    (6, "anti-Stokes counts", 1, ac6),
    (7, "formal monodromy", 1, ac7),
    (8, "quiver stability vs brute force", 60, ac8),
    (9, "hyperpolygon solver and residues", 120, ac9),
    (10, "parabolic dimension anchor", 1, ac10),
    (11, "isogeny spectra", 30, ac11),
    (12, "component counts", 1, ac12),
    (13, "spectral monodromy", 60, ac13),
    (14, "torsion count", 1, ac14),
    (15, "CLI corpus", 300, ac15),
]


def check(number):
    _, name, limit, fn = CRITERIA[number - 1]
    t0 = time.perf_counter()
    error = None
    try:
        fn()
    except Exception as exc:  # recorded, then re-raised by the caller
        error = exc
    elapsed = time.perf_counter() - t0
    if error is None and elapsed > limit:
        error = AssertionError(f"took {elapsed:.2f}s, limit {limit}s")
    status = "PASS" if error is None else "FAIL"
    line = f"AC{number:<2} {status}  {name:<36} {elapsed:7.2f}s / {limit}s"
    if error is not None:
        line += f"  ({type(error).__name__}: {str(error).splitlines()[0] if str(error) else ''})"
    RESULTS[number] = line
    return line, error


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"AC{c[0]}" for c in CRITERIA])
def test_criterion(number):
    line, error = check(number)
    print(line)
    if error is not None:
        raise error


if __name__ == "__main__":
    failed = 0
    for number, *_ in CRITERIA:
        line, error = check(number)
        print(line, flush=True)
        failed += error is not None
    sys.exit(1 if failed else 0)
