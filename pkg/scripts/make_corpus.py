"""Write the shipped regression corpus (task files plus ``*.expected.json``).

Each task carries an oracle: an independent check (closed forms, sympy,
hand-derived values) applied to the report before it is frozen.  Run with
``--check`` to verify the oracles against the files on disk without writing.
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import sympy as sp

from hitchin_kit.cli import dumps, run, shipped_corpus

Z = sp.Symbol("z")


def S(re, im=0):
    re, im = Fraction(re), Fraction(im)
    return [re.numerator, re.denominator, im.numerator, im.denominator]


def P(*coeffs):
    """Polynomial from integer/Fraction/complex coefficients, constant term first."""
    out = []
    for c in coeffs:
        c = complex(c) if isinstance(c, complex) else c
        out.append(S(c.real, c.imag) if isinstance(c, complex) else S(c))
    while out and out[-1][0] == 0 and out[-1][2] == 0:
        out.pop()
    return out


def M(rows):
    """Matrix whose entries are ints or coefficient tuples."""
    return [[P(*e) if isinstance(e, tuple) else P(e) for e in row] for row in rows]


def task(command, action, options=None, **payload):
    t = {"version": "1", "command": command, "payload": {"action": action, **payload}}
    if options:
        t["options"] = options
    return t


def sym_poly(quads):
    return sum((sp.Rational(q[0], q[1]) + sp.I * sp.Rational(q[2], q[3])) * Z ** k
               for k, q in enumerate(quads))


def sym_matrix(m):
    return sp.Matrix([[sym_poly(e) for e in row] for row in m])


def _eq(a, b):
    return sp.expand(a - b) == 0


# --- oracles -----------------------------------------------------------------------------

def dims_oracle(n_family, g):
    fam, n = n_family

    def check(rep):
        r = rep["result"]
        if fam == "GL":
            assert r["moduli_dim"] == 2 * n * n * (g - 1) + 2
            assert r["base_dim"] == r["moduli_dim"] // 2
        else:
            # semisimple: dim M = 2 dim G (g-1), base = sum (2d-1)(g-1)
            assert r["moduli_dim"] == 2 * r["group_dim"] * (g - 1)
            assert r["base_dim"] == sum((2 * d - 1) * (g - 1) for d in r["exponents"])
            assert 2 * r["base_dim"] == r["moduli_dim"]
    return check


def charpoly_oracle(m):
    def check(rep):
        r = rep["result"]
        x = sp.Symbol("x")
        cp = sp.Poly((x * sp.eye(len(m)) - sym_matrix(m)).det(), x).all_coeffs()[1:]
        assert all(_eq(a, sym_poly(b)) for a, b in zip(cp, r["coeffs"]))
        assert _eq(sym_matrix(m).det(), sym_poly(r["det"]))
        assert r["newton_round_trip"] and r["traces_match"]
    return check


def pfaffian_oracle(m):
    def check(rep):
        r = rep["result"]
        assert _eq(sym_poly(r["pfaffian"]) ** 2, sym_matrix(m).det())
        assert r["square_matches"]
    return check


def monodromy_oracle(label, orbits=None):
    def check(rep):
        r = rep["result"]
        mono = r.get("monodromy", r)
        assert mono["status"] == label, mono["status"]
        assert mono["product_relation"] is True
        if orbits is not None:
            assert mono["orbits"] == orbits
    return check


def field(path, value):
    def check(rep):
        node = rep
        for key in path.split("/"):
            node = node[int(key)] if isinstance(node, list) else node[key]
        assert node == value, (path, node, value)
    return check


def both(*checks):
    def check(rep):
        for c in checks:
            c(rep)
    return check


def ensure(pred, message):
    def check(rep):
        assert pred(rep["result"]), message
    return check


def exit_code(code):
    def check(rep):
        assert rep["status"] == ("ok" if code == 0 else "error")
        if code:
            assert rep["exit_code"] == code
    return check


def isogeny_oracle(kind, mats):
    def check(rep):
        r = rep["result"]
        x = sp.Symbol("x")
        if kind == "I2":
            a, b = (sym_matrix(m).subs(Z, 0) for m in mats)
            ev = [u + v for u in sp.roots(a.charpoly(x).as_expr(), x, multiple=True)
                  for v in sp.roots(b.charpoly(x).as_expr(), x, multiple=True)]
        else:
            a = sym_matrix(mats[0]).subs(Z, 0)
            lam = sp.roots(a.charpoly(x).as_expr(), x, multiple=True)
            ev = [lam[i] + lam[j] for i in range(4) for j in range(i + 1, 4)]
            assert r["wedge_skew_adjoint"]
        target = sp.expand(sp.prod([x - e for e in ev]))
        image = sym_matrix(r["image"]).subs(Z, 0)
        assert _eq(image.charpoly(x).as_expr(), target)
        assert r["spectrum_matches_at_0"]
    return check


# --- the corpus --------------------------------------------------------------------------

def tasks():
    out = []

    def add(name, t, oracle):
        out.append((name, t, oracle))

    add("formulas_dims_gl2_g2", task("formulas", "dims", group="GL(2)", g=2),
        both(field("result/moduli_dim", 10), field("result/base_dim", 5)))
    add("formulas_dims_sl3_g3", task("formulas", "dims", group="SL(3)", g=3), dims_oracle(("SL", 3), 3))
    add("formulas_dims_so5_g2", task("formulas", "dims", group="SO(5)", g=2), dims_oracle(("SO", 5), 2))
    add("formulas_dims_sp4_g4", task("formulas", "dims", group="Sp(4)", g=4), dims_oracle(("Sp", 4), 4))
    add("formulas_spectral_genus", task("formulas", "spectral_genus", n=3, g=4),
        field("result/spectral_genus", 1 + 9 * 3))
    add("formulas_upp_genera", task("formulas", "upp_genera", p=2, g=2),
        both(field("result/g_S", 17), field("result/g_Sbar", 7)))
    add("formulas_parabolic_dim", task("formulas", "parabolic_dim", g=0, r=2, n=4), field("result/dim", 2))
    add("formulas_torsion_two", task("formulas", "torsion_two", prym_dim=3), field("result/count", 64))
    add("formulas_h0_k3", task("formulas", "h0", g=3, i=3), field("result/h0", 10))

    so5_q = [[1 if i + j == 4 else 0 for j in range(5)] for i in range(5)]
    # skew-adjoint for the anti-diagonal form: phi[i][j] = -phi[4-j][4-i]
    so5 = [[0] * 5 for _ in range(5)]
    for (i, j), v in {(0, 1): (1,), (1, 2): (0, 1), (2, 3): (2,), (0, 2): (3,), (3, 0): (1, 0, 1),
                      (1, 0): (0, 2)}.items():
        so5[i][j] = v
        if (4 - j, 4 - i) != (i, j):
            so5[4 - j][4 - i] = tuple(-c for c in v)
    so5_pair = {"group": "SO_odd", "twist_degree": 2, "entries": M(so5), "structure": {"Q": M(so5_q)}}
    add("higgs_structure_so5", task("higgs", "structure", higgs=so5_pair), field("result/passed", True))
    add("higgs_map_so5", task("higgs", "hitchin_map", higgs=so5_pair),
        lambda rep: charpoly_oracle(M(so5))({"result": {
            "coeffs": [[], rep["result"]["invariants"][0], [], rep["result"]["invariants"][1], []],
            "det": [], "newton_round_trip": True, "traces_match": True}}))
    add("higgs_structure_sl2_trace", task("higgs", "structure", higgs={
        "group": "SL", "entries": M([[1, 0], [0, 0]]), "structure": {"det_trivial": True}}),
        both(field("result/passed", False), field("result/conditions/0/name", "trace_zero")))
    add("higgs_section_n3", task("higgs", "section", n=3, a=[P(0, 0, 1), P(1, 2)]),
        field("result/round_trip", True))
    m3 = [[(1, 2), (0, 1), 3], [(Fraction(1, 2),), (0, 0, 1), complex(1, 1)], [2, (1,), (0, -1)]]
    add("higgs_char_poly_3x3", task("higgs", "char_poly", matrix=M(m3)), charpoly_oracle(M(m3)))
    skew = [[0, (1, 1), 2, (0, 3)], [(-1, -1), 0, (5,), 1], [-2, (-5,), 0, (0, 0, 1)],
            [(0, -3), -1, (0, 0, -1), 0]]
    add("higgs_pfaffian_4x4", task("higgs", "pfaffian", matrix=M(skew)), pfaffian_oracle(M(skew)))
    add("higgs_eigenvalues", task("higgs", "eigenvalues", matrix=M([[0, 1], [(0, 1), 0]]), z0=S(4)),
        ensure(lambda r: sorted(round(e[0], 12) for e in r["eigenvalues"]) == [-2.0, 2.0],
               "eigenvalues of [[0,1],[4,0]] are +-2"))
    add("higgs_stability_eta2_minus_z", task("higgs", "stability", higgs={
        "group": "SL", "entries": M([[0, 1], [(0, 1), 0]]), "structure": {"det_trivial": True}}),
        both(field("result/verdict", "stable"), field("result/monodromy/status", "Transitive")))
    add("higgs_exterior_square", task("higgs", "exterior_power", matrix=M([[1, 0, 0], [0, 2, 0], [0, 0, 4]]), k=2),
        field("result/matrix", M([[3, 0, 0], [0, 5, 0], [0, 0, 6]])))
    add("higgs_involution", task("higgs", "involution", coeffs=[P(1), P(0, 1), P(2)]),
        both(field("result/image", [P(-1), P(0, 1), P(-2)]), field("result/fixed", False)))

    add("spectral_analyze_eta2_minus_z", task("spectral", "analyze", curve={"coeffs": [P(), P(0, -1)]}),
        both(monodromy_oracle("Transitive"), field("result/monodromy/permutations", ["(0 1)"])))
    add("spectral_monodromy_split", task("spectral", "monodromy", curve={"coeffs": [P(), P(0, 0, -1)]}),
        monodromy_oracle("Intransitive", [[0], [1]]))
    add("spectral_monodromy_cubic", task("spectral", "monodromy", curve={"coeffs": [P(), P(0, -1), P(0, 0, -1)]}),
        monodromy_oracle("Transitive", [[0, 1, 2]]))
    # (eta + 1)(eta^2 - z): one fixed sheet plus a swapped pair
    add("spectral_monodromy_product", task("spectral", "monodromy",
                                          curve={"coeffs": [P(1), P(0, -1), P(0, -1)]}),
        both(monodromy_oracle("Intransitive"),
             ensure(lambda r: sorted(len(o) for o in r["orbits"]) == [1, 2], "orbit sizes 1 and 2")))
    add("spectral_classify_square", task("spectral", "classify",
                                         curve={"coeffs": [P(0, 2), P(0, 0, 1)], "twist_degree": 1}),
        field("result/diagnosis/kind", "ReducibleByShape"))
    add("spectral_quotient_upp", task("spectral", "quotient",
                                      curve={"coeffs": [P(), P(0, 1), P(), P(1, 0, 0, 1)], "twist_degree": 1}),
        both(field("result/quotient/n", 2), field("result/round_trip", True)))

    one_point = {"rank": 2, "degree": 0, "points": [
        {"point": S(0), "multiplicities": [1, 1], "weights": [[2, 3], [1, 3]]}]}
    add("parabolic_degree", task("parabolic", "degree", bundle=one_point),
        both(field("result/parabolic_degree", [1, 1]), field("result/slope", [1, 2])))
    add("parabolic_degree_two_points", task("parabolic", "degree", bundle={"rank": 2, "degree": -1, "points": [
        {"point": S(0), "multiplicities": [2], "weights": [[1, 4]]},
        {"point": S(1), "multiplicities": [2], "weights": [[1, 4]]}]}),
        field("result/parabolic_degree", [0, 1]))
    add("parabolic_semistable_unstable", task("parabolic", "semistable", bundle={
        "rank": 2, "degree": 0, "points": [
            {"point": S(0), "multiplicities": [1, 1], "weights": [[1, 3], [1, 4]]}]}, bounds=[0]),
        both(field("result/verdict", "unstable"), field("result/slope", [7, 24]),
             field("result/worst/slope", [1, 3])))
    add("parabolic_sub", task("parabolic", "sub", bundle=one_point, sub_rank=1, sub_degree=0, selection=[[0]]),
        field("result/slope", [2, 3]))
    add("parabolic_residues_nilpotent", task("parabolic", "residues", bundle={
        "rank": 3, "degree": 0, "points": [{"point": S(0), "multiplicities": [3], "weights": [0]}]},
        residues=[M([[1, -1, 0], [1, -1, 0], [2, -2, 0]])]),
        field("result/passed", True))
    add("parabolic_residues_semisimple", task("parabolic", "residues", bundle={
        "rank": 2, "degree": 0, "points": [{"point": S(0), "multiplicities": [2], "weights": [0]}]},
        residues=[M([[1, 0], [0, -1]])]),
        both(field("result/passed", False), field("result/first_failure", "res0.square_zero")))

    def pole(order, lead, res=(0, 0)):
        mats = [[S(lead[0]), S(lead[1])]] + [[S(0), S(0)]] * (order - 2) + [[S(res[0]), S(res[1])]]
        return {"poles": [{"location": S(0), "order": order, "polar_matrices": mats}]}

    add("wild_directions_k1", task("wild", "directions", **pole(2, (1, 0))),
        both(field("result/count", 2), field("result/labels", ["0", "pi"])))
    add("wild_stokes_k3", task("wild", "stokes", **pole(4, (1, 0))),
        ensure(lambda r: len(r["directions"]) == 6 and r["k"] == 3, "six directions for k = 3"))
    add("wild_monodromy_half", task("wild", "monodromy", **pole(2, (1, 0), (Fraction(1, 2), Fraction(-1, 2)))),
        field("result/formal_monodromy", [[[-1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]))

    add("quiver_slope", task("quiver", "slope", dims=[2, 1, 1, 1], alpha=[0, 1, 1, 1]),
        field("result/slope", [3, 5]))
    add("quiver_stability_generic", task("quiver", "stability", r=1, x=[[1], [1], [1]], alpha=[-1, 1, 1, 1]),
        field("result/verdict", "stable"))
    add("quiver_stability_unstable", task("quiver", "stability", r=2, x=[[1, 0], [1, 0], [0, 0]],
                                          alpha=[0, 1, 1, 1]),
        field("result/verdict", "unstable"))
    add("quiver_polygon_semistable", task("quiver", "polygon", points=[S(0), S(0), S(1), "inf"],
                                          weights=[1, 1, 1, 1]),
        field("result/verdict", "semistable"))
    add("quiver_moments_exact", task("quiver", "moments", x=[[1, 0], [0, 1]], y=[[0, 1], [1, 0]]),
        field("result/exact", True))
    add("quiver_solve_n4_r2", task("quiver", "solve", options={"seed": 3}, n=4, r=2),
        ensure(lambda r: r["converged"] and r["residual"] <= 1e-9, "solver residual"))
    add("quiver_tohiggs_solved", task("quiver", "tohiggs", options={"seed": 1}, n=3, r=2,
                                      marked_points=[S(0), S(1), S(-1)]),
        field("result/report/passed", True))
    add("quiver_tohiggs_exact", task("quiver", "tohiggs", x=[[1, 0]], y=[[0, 1]], marked_points=[S(0)]),
        both(field("result/report/conditions/0/passed", True),
             field("result/residues", [[[S(0), S(1)], [S(0), S(0)]]])))

    add("branes_fixed_sl2r", task("branes", "fixed", form={"form": "sl_n_R", "n": 2}, higgs={
        "group": "SL", "entries": M([[0, 1], [(0, 0, 1), 0]]), "structure": {"det_trivial": True}}),
        both(field("result/verdict", "Pass"), field("result/conjugator", "exchange")))
    add("branes_fixed_trace", task("branes", "fixed", form={"form": "su_p_q", "p": 1, "q": 1}, higgs={
        "entries": M([[1, 0], [0, 0]])}),
        field("result/verdict", "NotFound"))
    add("branes_theta_sp4", task("branes", "theta", form={"form": "sp_2n_R", "n": 2},
                                 matrix=M([[1, 2, 0, 0], [0, 3, 0, 1], [1, 0, 0, 0], [0, 0, 0, 1]])),
        field("result/involutive", True))
    add("branes_structural_kpq", task("branes", "structural", kind="Kpq", params=[1, 1]),
        field("result/matrix", M([[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]])))
    add("branes_aba", task("branes", "aba", invariants={"n_plus": 1, "u": 2}),
        field("result/components", 2 ** (2 * 1 + 1 - 1)))
    add("branes_prym", task("branes", "prym", invariants={"n_zero": 1, "u": 2}),
        field("result/components", 2 ** (1 + 1 - 1)))
    add("branes_prym_gate", task("branes", "prym", invariants={"n_zero": 1, "u": 0}), exit_code(2))

    i2 = [M([[1, 2], [3, -1]]), M([[0, 1], [1, 0]])]
    add("isogeny_i2", task("isogeny", "I2", phi1=i2[0], phi2=i2[1]), isogeny_oracle("I2", i2))
    i3 = [M([[1, 1, 0, 0], [0, 2, 1, 0], [0, 0, -1, 1], [1, 0, 0, -2]])]
    add("isogeny_i3", task("isogeny", "I3", phi=i3[0]), isogeny_oracle("I3", i3))

    add("error_schema", task("formulas", "dims", group="GL(2)", g="two"),
        both(exit_code(2), field("error/pointer", "/payload/g")))
    add("error_domain", task("formulas", "dims", group="GL(2)", g=1), exit_code(2))
    add("error_nonconvergence", task("quiver", "solve", n=5, r=2, max_iter=1), exit_code(3))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(shipped_corpus()))
    ap.add_argument("--check", action="store_true", help="verify oracles against existing files")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name, t, oracle in tasks():
        if args.check:
            expected = json.loads((out / f"{name}.expected.json").read_text())
            code, report = expected["exit_code"], expected["report"]
        else:
            code, report = run(t)
            report = json.loads(dumps(report))
        try:
            oracle(report)
        except AssertionError as exc:
            failures += 1
            print(f"oracle failed for {name}: {exc}", file=sys.stderr)
            continue
        if not args.check:
            (out / f"{name}.json").write_text(dumps(t))
            (out / f"{name}.expected.json").write_text(dumps({"exit_code": code, "report": report}))
    print(f"{len(tasks())} tasks, {failures} oracle failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
