import json
import shutil
import subprocess
import sys

import pytest

from hitchin_kit import cli

# every public operation of the toolkit, as module.function
OPERATIONS = {
    "exactalg.char_poly", "exactalg.traces_to_coeffs", "exactalg.exterior_power",
    "exactalg.pfaffian", "exactalg.eigenvalues_numeric",
    "formulas.h0_canonical_power", "formulas.moduli_dim", "formulas.hitchin_base_dim",
    "formulas.spectral_genus", "formulas.upp_genera", "formulas.parabolic_moduli_dim",
    "formulas.torsion_two_count",
    "higgs.check_structure", "higgs.hitchin_map", "higgs.hitchin_section",
    "higgs.stability_certificate", "higgs.base_involution_action",
    "spectral.from_higgs", "spectral.classify", "spectral.quotient_curve_upp",
    "spectral.monodromy_transitive",
    "parabolic.parabolic_degree", "parabolic.parabolic_slope", "parabolic.induced_sub_structure",
    "parabolic.parabolic_semistable", "parabolic.check_minimal_residues",
    "wild.leading_difference", "wild.anti_stokes", "wild.half_periods",
    "wild.stokes_factor_shape", "wild.formal_monodromy",
    "quiver.alpha_slope", "quiver.star_stability", "quiver.polygon_semistable_points",
    "quiver.moment_maps", "quiver.solve_level_set", "quiver.hyperpolygon_to_higgs",
    "branes.structural_matrix", "branes.apply_theta", "branes.theta_fixed_point_check",
    "branes.aba_component_count", "branes.prym_fixed_component_count",
    "branes.isogeny_I2", "branes.isogeny_I3",
}


def task(command, action, options=None, **payload):
    t = {"version": "1", "command": command, "payload": {"action": action, **payload}}
    if options is not None:
        t["options"] = options
    return t


def patch(monkeypatch, func):
    key = ("formulas", "torsion_two")
    old = cli.HANDLERS[key]
    monkeypatch.setitem(cli.HANDLERS, key, cli.Handler(old.command, old.action, func, old.ops))


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


def test_every_operation_reachable():
    assert OPERATIONS <= set(cli.reachable_ops())


def test_float_serialization():
    assert cli._float_text(1.0) == "1.0"
    assert cli._float_text(0.1) == "0.10000000000000001"
    assert cli._float_text(1e300) == "1.0000000000000001e+300"
    text = cli.dumps({"a": [1.5, 2], "b": {"c": "x"}})
    assert json.loads(text) == {"a": [1.5, 2], "b": {"c": "x"}}
    assert '"a": [1.5, 2]' in text


def test_run_ok():
    code, report = cli.run(task("formulas", "dims", group="SL(2)", g=2))
    assert code == 0 and report["status"] == "ok"
    assert report["result"]["moduli_dim"] == 6 and report["result"]["base_dim"] == 3


@pytest.mark.parametrize("bad,pointer", [
    ({"version": "2", "command": "formulas", "payload": {"action": "dims", "group": "GL(2)", "g": 2}}, "/version"),
    (task("formulas", "dims", group="GL(2)", g="two"), "/payload/g"),
    (task("formulas", "nope"), "/payload/action"),
    (task("formulas", "dims", group="GL(2)", g=2, extra=1), "/payload"),
    (task("formulas", "dims", group="U(2)", g=2), "/payload"),
])
def test_input_errors_exit_two(bad, pointer):
    code, report = cli.run(bad)
    assert code == 2 and report["status"] == "error"
    assert report["error"]["pointer"].startswith(pointer)


def test_numeric_error_exit_three():
    code, report = cli.run(task("quiver", "solve", n=5, r=2, max_iter=1))
    assert code == 3
    assert report["error"]["type"] == "SolverError" and report["error"]["residual"] > 0
    assert report["error"]["iterations"] == 1


def test_unexpected_exception_exit_four(monkeypatch):
    def boom(p, ctx):
        raise ZeroDivisionError("defect")
    patch(monkeypatch, boom)
    code, report = cli.run(task("formulas", "torsion_two", prym_dim=3))
    assert code == 4 and report["error"]["type"] == "ZeroDivisionError"


def test_tolerance_precedence(monkeypatch):
    seen = []

    def spy(p, ctx):
        seen.append(ctx.tol)
        return {}
    patch(monkeypatch, spy)
    t = task("formulas", "torsion_two", prym_dim=3)
    cli.run(t)
    monkeypatch.setenv(cli.TOL_ENV, "1e-6")
    cli.run(t)
    cli.run(task("formulas", "torsion_two", {"tol": 1e-7}, prym_dim=3))
    cli.run(task("formulas", "torsion_two", {"tol": 1e-7}, prym_dim=3), tol=1e-5)
    assert seen == [1e-9, 1e-6, 1e-7, 1e-5]
    monkeypatch.setenv(cli.TOL_ENV, "soon")
    assert cli.run(t)[0] == 2


def test_seed_changes_solver_start():
    a = cli.run(task("quiver", "solve", n=4, r=2, options={"seed": 1}))[1]
    b = cli.run(task("quiver", "solve", n=4, r=2), seed=1)[1]
    c = cli.run(task("quiver", "solve", n=4, r=2), seed=2)[1]
    assert a == b and a != c


def test_main_stdout_and_output(tmp_path, capsys):
    path = write(tmp_path, "t.json", task("formulas", "torsion_two", prym_dim=3))
    assert cli.main(["formulas", "--input", str(path), "--quiet"]) == 0
    out = capsys.readouterr()
    assert json.loads(out.out)["result"]["count"] == 64 and out.err == ""
    dest = tmp_path / "r.json"
    assert cli.main(["run", "--input", str(path), "--output", str(dest)]) == 0
    assert json.loads(dest.read_text())["result"]["count"] == 64
    assert "formulas/torsion_two" in capsys.readouterr().err
    via_options = task("formulas", "torsion_two", {"output": str(tmp_path / "o.json")}, prym_dim=3)
    assert cli.main(["run", "--input", str(write(tmp_path, "u.json", via_options)), "--quiet"]) == 0
    assert (tmp_path / "o.json").exists()


def test_main_command_mismatch_and_bad_json(tmp_path, capsys):
    path = write(tmp_path, "t.json", task("formulas", "torsion_two", prym_dim=3))
    assert cli.main(["wild", "--input", str(path), "--quiet"]) == 2
    assert json.loads(capsys.readouterr().out)["error"]["pointer"] == "/command"
    broken = tmp_path / "b.json"
    broken.write_text("{not json")
    assert cli.main(["run", "--input", str(broken), "--quiet"]) == 2
    assert cli.main(["run", "--input", str(tmp_path / "missing.json"), "--quiet"]) == 2


def test_shipped_corpus_passes():
    table = cli.run_corpus(cli.shipped_corpus(), jobs=4)
    assert len(table["rows"]) >= 25
    assert table["totals"]["fail"] == 0 and table["totals"]["skip"] == 0
    assert [r["task"] for r in table["rows"]] == sorted(r["task"] for r in table["rows"])


def test_corpus_mismatch_skip_and_corrupt(tmp_path, capsys):
    src = cli.shipped_corpus()
    for name in ("formulas_torsion_two", "formulas_upp_genera", "formulas_h0_k3"):
        shutil.copy(src / f"{name}.json", tmp_path)
        shutil.copy(src / f"{name}.expected.json", tmp_path)
    exp = json.loads((tmp_path / "formulas_torsion_two.expected.json").read_text())
    exp["report"]["result"]["count"] = 65
    (tmp_path / "formulas_torsion_two.expected.json").write_text(json.dumps(exp))
    (tmp_path / "formulas_upp_genera.expected.json").write_text("[oops")
    (tmp_path / "formulas_h0_k3.expected.json").unlink()
    table = cli.run_corpus(tmp_path)
    rows = {r["task"]: r for r in table["rows"]}
    assert rows["formulas_torsion_two.json"]["status"] == "fail"
    assert "/report" not in rows["formulas_torsion_two.json"]["detail"]
    assert "count" in rows["formulas_torsion_two.json"]["detail"]
    assert rows["formulas_upp_genera.json"]["status"] == "fail"
    assert "formulas_upp_genera.expected.json" in rows["formulas_upp_genera.json"]["detail"]
    assert rows["formulas_h0_k3.json"]["status"] == "skip"
    assert cli.main(["corpus", str(tmp_path)]) == 1
    capsys.readouterr()


def test_corpus_empty_and_missing(tmp_path, capsys):
    assert cli.main(["corpus", str(tmp_path)]) == 0
    assert cli.main(["corpus", str(tmp_path / "nowhere")]) == 2
    capsys.readouterr()


def test_approx_expectations():
    assert cli._diff(1.0 + 1e-12, {"$approx": 1.0, "tol": 1e-9}) is None
    assert cli._diff([1.0, 2.0], {"$approx": [1.0, 2.5], "tol": 1e-3})[0] == "/1"
    assert cli._diff(1, 1.0) is not None  # types are compared strictly


def test_reruns_byte_identical(tmp_path):
    path = cli.shipped_corpus() / "spectral_monodromy_sqrt.json"
    if not path.exists():
        path = sorted(cli.shipped_corpus().glob("spectral_*.json"))[0]
    outs = []
    for i in range(2):
        dest = tmp_path / f"{i}.json"
        subprocess.run([sys.executable, "-m", "hitchin_kit.cli", "run", "--input", str(path),
                        "--output", str(dest), "--quiet"], check=False)
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1] and outs[0]
