"""Command-line front end: JSON task files in, JSON reports out.

Task files look like ``{"version": "1", "command": ..., "payload": {"action":
..., ...}, "options": {"tol": ..., "seed": ..., "output": ...}}`` and are
validated against the versioned schemas in ``hitchin_kit/schemas``.

Exit codes: 0 for any computed verdict (including "unstable" or "NotFound"),
2 for schema or domain errors, 3 for numeric non-convergence, 4 for internal
invariant breaches.  ``corpus`` exits 1 when an expectation does not match.
"""

import argparse
import json
import math
import numbers
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match
from referencing import Registry, Resource

from . import branes, exactalg, formulas, higgs, parabolic, quiver, spectral, wild
from .errors import HitchinKitError, InvariantError, NumericError

VERSION = "1"
COMMANDS = ("formulas", "higgs", "spectral", "parabolic", "wild", "quiver", "branes", "isogeny")
DEFAULT_TOL = 1e-9
TOL_ENV = "HITCHIN_KIT_TOL"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_INVARIANT = 4


class TaskError(HitchinKitError, ValueError):
    """Schema or payload problem located at a JSON pointer."""

    def __init__(self, message, pointer=""):
        super().__init__(message)
        self.pointer = pointer


# --- serialization ---------------------------------------------------------------

def _float_text(x):
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    text = format(x, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def to_plain(obj):
    """Convert toolkit values to JSON-compatible Python data."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (Fraction, numbers.Rational)) or type(obj).__name__ == "mpq":
        return exactalg.rational_to_json(obj)
    if isinstance(obj, numbers.Real):
        return float(obj)
    if isinstance(obj, numbers.Complex):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with floats at 17 significant digits, so reruns are byte-identical."""
    def enc(v, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(v, bool) or v is None:
            return json.dumps(v)
        if isinstance(v, float):
            return _float_text(v)
        if isinstance(v, (int, str)):
            return json.dumps(v, ensure_ascii=False)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {enc(x, level + 1)}" for k, x in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if not v:
            return "[]"
        if all(isinstance(x, (int, float, bool, str)) or x is None for x in v):
            return "[" + ", ".join(enc(x, level + 1) for x in v) + "]"
        return "[\n" + ",\n".join(pad + enc(x, level + 1) for x in v) + "\n" + end + "]"
    return enc(to_plain(obj), 0) + "\n"


# --- schemas -----------------------------------------------------------------------

def _load_schemas():
    schemas = {}
    for entry in resources.files("hitchin_kit").joinpath("schemas").iterdir():
        if entry.name.endswith(".json"):
            schemas[entry.name[:-len(".json")]] = json.loads(entry.read_text(encoding="utf-8"))
    registry = Registry().with_resources(
        (doc["$id"], Resource.from_contents(doc)) for doc in schemas.values())
    return schemas, registry


_SCHEMAS, _REGISTRY = _load_schemas()


def _pointer(path):
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def validate_task(task):
    """Raise :class:`TaskError` pointing at the first offending JSON location."""
    checks = [(_SCHEMAS["task.v1"], task, ())]
    if isinstance(task, dict) and task.get("command") in COMMANDS and isinstance(task.get("payload"), dict):
        checks.append((_SCHEMAS[f"{task['command']}.v1"], task["payload"], ("payload",)))
    for schema, doc, prefix in checks:
        validator = Draft202012Validator(schema, registry=_REGISTRY)
        err = best_match(validator.iter_errors(doc))
        if err is not None:
            raise TaskError(f"schema violation: {err.message}", _pointer(prefix + tuple(err.absolute_path)))


@contextmanager
def at(pointer):
    """Attach a JSON pointer to input errors raised while reading a payload field."""
    try:
        yield
    except TaskError:
        raise
    except (HitchinKitError, ValueError, KeyError, TypeError, IndexError) as exc:
        if isinstance(exc, (NumericError, InvariantError)):
            raise
        raise TaskError(f"{type(exc).__name__}: {exc}", pointer) from exc


# --- dispatch registry ------------------------------------------------------------

@dataclass(frozen=True)
class Handler:
    command: str
    action: str
    func: object
    ops: tuple


HANDLERS = {}


def handler(command, action, ops):
    """Register ``func(payload, ctx)`` for ``command``/``action``; ``ops`` lists the
    library operations it reaches (checked by the coverage test)."""
    def deco(func):
        HANDLERS[(command, action)] = Handler(command, action, func, tuple(ops))
        return func
    return deco


def reachable_ops():
    return sorted({op for h in HANDLERS.values() for op in h.ops})


@dataclass(frozen=True)
class Context:
    tol: float = DEFAULT_TOL
    seed: int = 0


# --- payload readers ---------------------------------------------------------------

def _higgs(payload, key="higgs"):
    with at(f"/payload/{key}"):
        return higgs.HiggsPair.from_json(payload[key])


def _matrix(payload, key):
    with at(f"/payload/{key}"):
        return exactalg.PolyMatrix.from_json(payload[key])


def _polys(payload, key):
    with at(f"/payload/{key}"):
        return [exactalg.Poly.from_json(p) for p in payload[key]]


def _curve(payload):
    if "higgs" in payload:
        return spectral.from_higgs(_higgs(payload))
    if "curve" not in payload:
        raise TaskError("spectral tasks need either 'higgs' or 'curve'", "/payload")
    data = payload["curve"]
    with at("/payload/curve"):
        coeffs = [exactalg.Poly.from_json(p) for p in data["coeffs"]]
        return spectral.SpectralCurve.from_coeffs(coeffs, data.get("twist_degree"))


def _polys_json(ps):
    return [p.to_json() for p in ps]


# --- formulas ----------------------------------------------------------------------

@handler("formulas", "dims", ["formulas.parse_group", "formulas.exponents", "formulas.group_dimension",
                              "formulas.moduli_dim", "formulas.hitchin_base_dim"])
def _formulas_dims(p, ctx):
    with at("/payload/group"):
        family, size = formulas.parse_group(p["group"])
    tag = f"{family}({size})"
    return {"group": tag, "g": p["g"], "moduli_dim": formulas.moduli_dim(tag, p["g"]),
            "base_dim": formulas.hitchin_base_dim(tag, p["g"]),
            "exponents": formulas.exponents(tag), "group_dim": formulas.group_dimension(tag)}


@handler("formulas", "h0", ["formulas.h0_canonical_power"])
def _formulas_h0(p, ctx):
    return {"g": p["g"], "i": p["i"], "h0": formulas.h0_canonical_power(p["g"], p["i"])}


@handler("formulas", "spectral_genus", ["formulas.spectral_genus"])
def _formulas_genus(p, ctx):
    return {"n": p["n"], "g": p["g"], "spectral_genus": formulas.spectral_genus(p["n"], p["g"])}


@handler("formulas", "upp_genera", ["formulas.upp_genera"])
def _formulas_upp(p, ctx):
    gs, gq = formulas.upp_genera(p["p"], p["g"])
    return {"p": p["p"], "g": p["g"], "g_S": gs, "g_Sbar": gq}


@handler("formulas", "parabolic_dim", ["formulas.parabolic_moduli_dim"])
def _formulas_par(p, ctx):
    return {"g": p["g"], "r": p["r"], "n": p["n"],
            "dim": formulas.parabolic_moduli_dim(p["g"], p["r"], p["n"])}


@handler("formulas", "torsion_two", ["formulas.torsion_two_count"])
def _formulas_torsion(p, ctx):
    return {"prym_dim": p["prym_dim"], "count": formulas.torsion_two_count(p["prym_dim"])}


# --- higgs and exact algebra -------------------------------------------------------

@handler("higgs", "structure", ["higgs.check_structure"])
def _higgs_structure(p, ctx):
    return higgs.check_structure(_higgs(p)).to_json()


@handler("higgs", "hitchin_map", ["higgs.hitchin_map"])
def _higgs_map(p, ctx):
    h = _higgs(p)
    return {"group": h.group.value, "invariants": _polys_json(higgs.hitchin_map(h))}


@handler("higgs", "section", ["higgs.hitchin_section", "exactalg.char_poly"])
def _higgs_section(p, ctx):
    a = _polys(p, "a")
    with at("/payload"):
        h = higgs.hitchin_section(p["n"], a, p.get("twist_degree", 1))
    coeffs = exactalg.char_poly(h.phi)
    return {"higgs": h.to_json(), "char_poly": _polys_json(coeffs),
            "round_trip": list(coeffs) == [exactalg.POLY_ZERO] + a}


@handler("higgs", "stability", ["higgs.stability_certificate"])
def _higgs_stability(p, ctx):
    return higgs.stability_certificate(_higgs(p)).to_json()


@handler("higgs", "involution", ["higgs.base_involution_action"])
def _higgs_involution(p, ctx):
    coeffs = _polys(p, "coeffs")
    first = p.get("first_degree", 1)
    return {"image": _polys_json(higgs.base_involution_action(coeffs, first)),
            "fixed": higgs.is_base_fixed(coeffs, first)}


@handler("higgs", "char_poly", ["exactalg.char_poly", "exactalg.coeffs_to_traces",
                                "exactalg.traces_to_coeffs", "exactalg.power_traces", "exactalg.det"])
def _higgs_char_poly(p, ctx):
    m = _matrix(p, "matrix")
    with at("/payload/matrix"):
        coeffs = exactalg.char_poly(m)
        traces = exactalg.coeffs_to_traces(coeffs)
        return {"coeffs": _polys_json(coeffs), "traces": _polys_json(traces),
                "det": exactalg.det(m).to_json(),
                "newton_round_trip": list(exactalg.traces_to_coeffs(traces)) == list(coeffs),
                "traces_match": list(exactalg.power_traces(m)) == list(traces)}


@handler("higgs", "exterior_power", ["exactalg.exterior_power"])
def _higgs_exterior(p, ctx):
    m = _matrix(p, "matrix")
    with at("/payload/k"):
        out = exactalg.exterior_power(m, p["k"])
    return {"size": out.n, "matrix": out.to_json()}


@handler("higgs", "pfaffian", ["exactalg.pfaffian", "exactalg.det"])
def _higgs_pfaffian(p, ctx):
    m = _matrix(p, "matrix")
    with at("/payload/matrix"):
        pf = exactalg.pfaffian(m)
        d = exactalg.det(m)
    return {"pfaffian": pf.to_json(), "det": d.to_json(), "square_matches": pf * pf == d}


@handler("higgs", "eigenvalues", ["exactalg.eigenvalues_numeric"])
def _higgs_eigen(p, ctx):
    m = _matrix(p, "matrix")
    with at("/payload/z0"):
        z0 = exactalg.ExactComplex.from_json(p["z0"])
    return {"eigenvalues": [complex(x) for x in exactalg.eigenvalues_numeric(m, z0)]}


# --- spectral ----------------------------------------------------------------------

@handler("spectral", "curve", ["spectral.from_higgs"])
def _spectral_curve(p, ctx):
    return {"curve": _curve(p).to_json()}


@handler("spectral", "classify", ["spectral.classify"])
def _spectral_classify(p, ctx):
    c = _curve(p)
    return {"curve": c.to_json(), "diagnosis": spectral.classify(c).to_json()}


@handler("spectral", "quotient", ["spectral.quotient_curve_upp"])
def _spectral_quotient(p, ctx):
    c = _curve(p)
    with at("/payload"):
        q = spectral.quotient_curve_upp(c)
    return {"curve": c.to_json(), "quotient": q.to_json(),
            "round_trip": spectral.resubstitute(q).coeffs == c.coeffs}


@handler("spectral", "monodromy", ["spectral.monodromy_transitive"])
def _spectral_monodromy(p, ctx):
    return spectral.monodromy_transitive(_curve(p)).to_json()


@handler("spectral", "analyze", ["spectral.from_higgs", "spectral.classify",
                                 "spectral.monodromy_transitive"])
def _spectral_analyze(p, ctx):
    c = _curve(p)
    return {"curve": c.to_json(), "diagnosis": spectral.classify(c).to_json(),
            "monodromy": spectral.monodromy_transitive(c).to_json()}


# --- parabolic ---------------------------------------------------------------------

def _bundle(p):
    with at("/payload/bundle"):
        return parabolic.ParabolicBundle.from_json(p["bundle"])


@handler("parabolic", "degree", ["parabolic.parabolic_degree", "parabolic.parabolic_slope"])
def _par_degree(p, ctx):
    b = _bundle(p)
    return {"parabolic_degree": parabolic.parabolic_degree(b), "slope": parabolic.parabolic_slope(b)}


@handler("parabolic", "sub", ["parabolic.induced_sub_structure"])
def _par_sub(p, ctx):
    b = _bundle(p)
    with at("/payload/selection"):
        sub = parabolic.induced_sub_structure(b, p["sub_rank"], p["sub_degree"], p["selection"])
    return {"sub": sub.to_json(), "parabolic_degree": parabolic.parabolic_degree(sub),
            "slope": parabolic.parabolic_slope(sub)}


@handler("parabolic", "semistable", ["parabolic.parabolic_semistable"])
def _par_semistable(p, ctx):
    b = _bundle(p)
    bounds = p["bounds"]
    if isinstance(bounds, dict):
        bounds = {int(k): v for k, v in bounds.items()}
    with at("/payload/bounds"):
        return parabolic.parabolic_semistable(b, bounds).to_json()


@handler("parabolic", "residues", ["parabolic.check_minimal_residues"])
def _par_residues(p, ctx):
    with at("/payload"):
        h = parabolic.ParabolicHiggs.from_json(p)
    return parabolic.check_minimal_residues(h, tol=ctx.tol,
                                            require_sum_zero=p.get("require_sum_zero", False)).to_json()


# --- wild --------------------------------------------------------------------------

def _polar(p):
    with at("/payload/poles"):
        return wild.PolarData.from_json(p)


@handler("wild", "stokes", ["wild.leading_difference", "wild.anti_stokes", "wild.half_periods",
                            "wild.stokes_factor_shape", "wild.formal_monodromy"])
def _wild_stokes(p, ctx):
    data = _polar(p)
    with at("/payload/pole"):
        return wild.stokes_report(data, p.get("pole", 0)).to_json()


@handler("wild", "directions", ["wild.leading_difference", "wild.anti_stokes"])
def _wild_directions(p, ctx):
    data = _polar(p)
    with at("/payload/pole"):
        a, k = wild.leading_difference(data, p.get("pole", 0))
        dirs = wild.anti_stokes(data, p.get("pole", 0))
    return {"a": exactalg.scalar_to_json(a), "k": k, "count": len(dirs),
            "directions": [d.to_json() for d in dirs], "labels": [str(d.angle) for d in dirs]}


@handler("wild", "monodromy", ["wild.formal_monodromy"])
def _wild_monodromy(p, ctx):
    data = _polar(p)
    with at("/payload/pole"):
        m = wild.formal_monodromy(data, p.get("pole", 0))
    return {"formal_monodromy": [[[z.real, z.imag] for z in row] for row in m.tolist()]}


# --- quiver ------------------------------------------------------------------------

def _vectors(p, key):
    with at(f"/payload/{key}"):
        return [[exactalg.scalar_from_json(c) for c in v] for v in p[key]]


def _alpha_or_default(p, n, ctx):
    if "alpha" in p:
        with at("/payload/alpha"):
            return tuple(exactalg.rational_from_json(a) for a in p["alpha"])
    return quiver.default_alpha(n, ctx.seed)


@handler("quiver", "slope", ["quiver.alpha_slope"])
def _quiver_slope(p, ctx):
    with at("/payload"):
        return {"slope": quiver.alpha_slope(p["dims"], p["alpha"])}


@handler("quiver", "stability", ["quiver.star_stability"])
def _quiver_stability(p, ctx):
    with at("/payload"):
        rep = quiver.QuiverRep.from_json(p)
        return quiver.star_stability(rep, p["alpha"]).to_json()


@handler("quiver", "polygon", ["quiver.polygon_semistable_points"])
def _quiver_polygon(p, ctx):
    with at("/payload"):
        return quiver.polygon_semistable_points(p["points"], p["weights"])


def _point(p):
    with at("/payload"):
        return quiver.HyperpolygonPoint.from_json({"x": p["x"], "y": p["y"], "alpha": p.get("alpha")})


@handler("quiver", "moments", ["quiver.moment_maps"])
def _quiver_moments(p, ctx):
    pt = _point(p)
    (rm, rs), (cm, cs) = quiver.moment_maps(pt)
    enc = exactalg.scalar_to_json
    return {"exact": pt.is_exact,
            "mu_r": {"central": [[enc(e) for e in row] for row in rm], "arms": [enc(e) for e in rs]},
            "mu_c": {"central": [[enc(e) for e in row] for row in cm], "arms": [enc(e) for e in cs]}}


def _solve(p, ctx):
    with at("/payload"):
        q = quiver.StarQuiver(p["n"], p["r"])
        alpha = _alpha_or_default(p, q.n, ctx)
        return quiver.solve_level_set(q, alpha, seed=ctx.seed, tol=ctx.tol,
                                      max_iter=p.get("max_iter", 10_000))


@handler("quiver", "solve", ["quiver.solve_level_set"])
def _quiver_solve(p, ctx):
    return _solve(p, ctx).to_json()


@handler("quiver", "tohiggs", ["quiver.hyperpolygon_to_higgs", "quiver.solve_level_set"])
def _quiver_tohiggs(p, ctx):
    out = {}
    if "x" in p:
        pt = _point(p)
    elif "n" in p and "r" in p:
        solved = _solve(p, ctx)
        pt = solved.point
        out["solve"] = solved.to_json()
    else:
        raise TaskError("tohiggs needs a point (x, y) or a quiver (n, r) to solve", "/payload")
    with at("/payload/marked_points"):
        h, report = quiver.hyperpolygon_to_higgs(pt, p["marked_points"], p.get("weights"), tol=ctx.tol)
    out["bundle"] = h.bundle.to_json()
    out["residues"] = [np.asarray(r, dtype=complex) if isinstance(r, np.ndarray)
                       else [[exactalg.scalar_to_json(e) for e in row] for row in r] for r in h.residues]
    out["report"] = report.to_json()
    return out


# --- branes and isogenies ------------------------------------------------------------

def _form(p):
    with at("/payload/form"):
        return branes.RealFormSpec.from_json(p["form"])


@handler("branes", "theta", ["branes.apply_theta"])
def _branes_theta(p, ctx):
    spec = _form(p)
    m = _matrix(p, "matrix")
    with at("/payload/matrix"):
        out = branes.apply_theta(spec, m)
    return {"form": spec.to_json(), "theta": out.to_json(),
            "involutive": branes.apply_theta(spec, out) == m}


@handler("branes", "fixed", ["branes.theta_fixed_point_check"])
def _branes_fixed(p, ctx):
    spec = _form(p)
    h = _higgs(p)
    with at("/payload/conjugators"):
        extra = [exactalg.PolyMatrix.from_json(g) for g in p.get("conjugators", [])]
    with at("/payload"):
        return branes.theta_fixed_point_check(spec, h, extra).to_json()


@handler("branes", "structural", ["branes.structural_matrix"])
def _branes_structural(p, ctx):
    with at("/payload/params"):
        m = branes.structural_matrix(p["kind"], *p["params"])
    return {"kind": p["kind"], "params": p["params"], "matrix": m.to_json()}


def _invariants(p):
    with at("/payload/invariants"):
        return branes.RealStructureInvariants.from_json(p["invariants"])


@handler("branes", "aba", ["branes.aba_component_count"])
def _branes_aba(p, ctx):
    inv = _invariants(p)
    with at("/payload/invariants/u"):
        return {"exponent": branes.aba_component_exponent(inv),
                "components": branes.aba_component_count(inv),
                "asserted": ["simple zeros", "f-compatible differential"]}


@handler("branes", "prym", ["branes.prym_fixed_component_count"])
def _branes_prym(p, ctx):
    inv = _invariants(p)
    flag = p.get("branch_point_fixed", True)
    with at("/payload/invariants"):
        return {"components": branes.prym_fixed_component_count(inv, flag),
                "branch_point_fixed": flag}


def _spectrum_check(image, expected, z0, tol):
    got = exactalg.eigenvalues_numeric(image, z0)
    return exactalg.multiset_close(got, expected, max(tol, 1e-6))


@handler("isogeny", "I2", ["branes.isogeny_I2"])
def _isogeny_i2(p, ctx):
    a, b = _matrix(p, "phi1"), _matrix(p, "phi2")
    with at("/payload"):
        image = branes.isogeny_I2(a, b)
    z0 = exactalg.ZERO
    la = exactalg.eigenvalues_numeric(a, z0)
    mu = exactalg.eigenvalues_numeric(b, z0)
    expected = [x + y for x in la for y in mu]
    return {"image": image.to_json(), "char_poly": _polys_json(exactalg.char_poly(image)),
            "spectrum_matches_at_0": _spectrum_check(image, expected, z0, ctx.tol)}


@handler("isogeny", "I3", ["branes.isogeny_I3"])
def _isogeny_i3(p, ctx):
    phi = _matrix(p, "phi")
    with at("/payload/phi"):
        image = branes.isogeny_I3(phi)
    z0 = exactalg.ZERO
    lam = exactalg.eigenvalues_numeric(phi, z0)
    expected = [lam[i] + lam[j] for i in range(4) for j in range(i + 1, 4)]
    return {"image": image.to_json(), "char_poly": _polys_json(exactalg.char_poly(image)),
            "spectrum_matches_at_0": _spectrum_check(image, expected, z0, ctx.tol),
            "wedge_skew_adjoint": branes.is_wedge_skew_adjoint(image)}


# --- running tasks -------------------------------------------------------------------

def _default_tol():
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise TaskError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not value > 0:
        raise TaskError(f"{TOL_ENV} must be positive")
    return value


def _error_report(task, code, exc):
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, TaskError):
        err["pointer"] = exc.pointer
    if isinstance(exc, NumericError):
        err["residual"] = exc.residual
        if getattr(exc, "iterations", None) is not None:
            err["iterations"] = exc.iterations
    command = task.get("command") if isinstance(task, dict) else None
    return {"version": VERSION, "command": command, "status": "error", "exit_code": code, "error": err}


def run(task, tol=None, seed=None):
    """Validate and execute a task.  Returns ``(exit_code, report)``."""
    try:
        validate_task(task)
        options = task.get("options", {})
        ctx = Context(tol=tol if tol is not None else options.get("tol", _default_tol()),
                      seed=seed if seed is not None else options.get("seed", 0))
        payload = task["payload"]
        entry = HANDLERS.get((task["command"], payload["action"]))
        if entry is None:
            raise TaskError(f"unknown action {payload['action']!r}", "/payload/action")
        result = entry.func(payload, ctx)
        report = {"version": VERSION, "command": task["command"], "action": payload["action"],
                  "status": "ok", "result": result}
        return EXIT_OK, to_plain(report)
    except InvariantError as exc:
        return EXIT_INVARIANT, _error_report(task, EXIT_INVARIANT, exc)
    except NumericError as exc:
        return EXIT_NUMERIC, _error_report(task, EXIT_NUMERIC, exc)
    except TaskError as exc:
        return EXIT_INPUT, _error_report(task, EXIT_INPUT, exc)
    except HitchinKitError as exc:
        return EXIT_INPUT, _error_report(task, EXIT_INPUT, TaskError(f"{type(exc).__name__}: {exc}", "/payload"))
    except Exception as exc:  # a defect, not bad input
        return EXIT_INVARIANT, _error_report(task, EXIT_INVARIANT, exc)


def load_task(path):
    """Read a task file; unreadable JSON becomes a :class:`TaskError` at the root."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise TaskError(f"invalid JSON: {exc}", "") from exc


def summary(code, report):
    """One human-readable line per report."""
    if code:
        err = report["error"]
        where = f" at {err['pointer'] or '/'}" if "pointer" in err else ""
        return f"error [{code}] {err['type']}{where}: {err['message']}"
    result = report["result"]
    keys = ("verdict", "status", "passed", "components", "count", "slope")
    shown = [f"{k}={result[k]}" for k in keys if isinstance(result, dict) and k in result]
    if not shown and isinstance(result, dict):
        shown = [f"{k}={v}" for k, v in result.items() if isinstance(v, (int, str, bool))][:4]
    return f"{report['command']}/{report['action']}: " + " ".join(shown)


# --- corpus runner ------------------------------------------------------------------

def _diff(actual, expected, path=""):
    """First mismatch as ``(pointer, message)`` or ``None``."""
    if isinstance(expected, dict) and "$approx" in expected:
        target, tol = expected["$approx"], expected.get("tol", DEFAULT_TOL)
        if isinstance(target, list):
            if not isinstance(actual, list) or len(actual) != len(target):
                return path, f"expected a list of {len(target)} approximate values"
            for i, (a, t) in enumerate(zip(actual, target)):
                bad = _diff(a, {"$approx": t, "tol": tol}, f"{path}/{i}")
                if bad:
                    return bad
            return None
        if isinstance(actual, bool) or not isinstance(actual, (int, float)):
            return path, f"expected a number near {target}, got {actual!r}"
        if not abs(actual - target) <= tol:
            return path, f"{actual!r} differs from {target!r} by more than {tol}"
        return None
    if type(actual) is not type(expected):
        return path, f"type {type(actual).__name__} != {type(expected).__name__}"
    if isinstance(expected, dict):
        for key in sorted(set(actual) | set(expected)):
            if key not in actual:
                return f"{path}/{key}", "missing in report"
            if key not in expected:
                return f"{path}/{key}", "unexpected in report"
            bad = _diff(actual[key], expected[key], f"{path}/{key}")
            if bad:
                return bad
        return None
    if isinstance(expected, list):
        if len(actual) != len(expected):
            return path, f"length {len(actual)} != {len(expected)}"
        for i, (a, e) in enumerate(zip(actual, expected)):
            bad = _diff(a, e, f"{path}/{i}")
            if bad:
                return bad
        return None
    if actual != expected:
        return path, f"{actual!r} != {expected!r}"
    return None


def expected_path(task_path):
    task_path = Path(task_path)
    return task_path.with_name(task_path.name[:-len(".json")] + ".expected.json")


def run_file(path):
    """Run one task file as the corpus does: ``(exit_code, report)`` after a
    serialization round trip."""
    try:
        task = load_task(path)
    except TaskError as exc:
        return EXIT_INPUT, json.loads(dumps(_error_report(None, EXIT_INPUT, exc)))
    code, report = run(task)
    return code, json.loads(dumps(report))


def _corpus_entry(path):
    name = path.name
    exp_path = expected_path(path)
    if not exp_path.exists():
        return {"task": name, "status": "skip", "detail": "no expectation file"}
    try:
        expected = json.loads(exp_path.read_text(encoding="utf-8"))
        if not isinstance(expected, dict) or "exit_code" not in expected or "report" not in expected:
            raise ValueError("needs 'exit_code' and 'report'")
    except ValueError as exc:
        return {"task": name, "status": "fail", "detail": f"{exp_path.name}: unreadable expectation ({exc})"}
    code, report = run_file(path)
    if code != expected["exit_code"]:
        return {"task": name, "status": "fail", "detail": f"exit code {code} != {expected['exit_code']}"}
    bad = _diff(report, expected["report"])
    if bad:
        pointer, message = bad
        return {"task": name, "status": "fail", "detail": f"{pointer or '/'}: {message}"}
    return {"task": name, "status": "pass", "detail": ""}


def corpus_tasks(directory):
    directory = Path(directory)
    return sorted(p for p in directory.glob("*.json") if not p.name.endswith(".expected.json"))


def run_corpus(directory, jobs=1):
    """Run every task in ``directory`` against its expectation; rows ordered by filename."""
    directory = Path(directory)
    if not directory.is_dir():
        raise TaskError(f"{directory} is not a directory")
    tasks = corpus_tasks(directory)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_corpus_entry, tasks))
    else:
        rows = [_corpus_entry(p) for p in tasks]
    totals = {s: sum(r["status"] == s for r in rows) for s in ("pass", "fail", "skip")}
    return {"directory": str(directory), "rows": rows, "totals": totals}


def format_table(table):
    rows = table["rows"]
    width = max([len(r["task"]) for r in rows] + [4])
    lines = [f"{'task':<{width}}  status  detail"]
    lines += [f"{r['task']:<{width}}  {r['status']:<6}  {r['detail']}" for r in rows]
    t = table["totals"]
    lines.append(f"{t['pass']} passed, {t['fail']} failed, {t['skip']} skipped")
    return "\n".join(lines)


def shipped_corpus():
    return Path(str(resources.files("hitchin_kit").joinpath("corpus")))


# --- entry point ---------------------------------------------------------------------

def _parser():
    ap = argparse.ArgumentParser(prog="hitchin-kit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS + ("run",):
        sp = sub.add_parser(name, help="run a task file" if name == "run" else f"run a {name} task")
        sp.add_argument("--input", required=True, help="task JSON file")
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--quiet", action="store_true", help="no summary line on stderr")
    cp = sub.add_parser("corpus", help="regression run over a directory of task files")
    cp.add_argument("directory", nargs="?", help="defaults to the shipped corpus")
    cp.add_argument("--jobs", type=int, default=1)
    cp.add_argument("--json", action="store_true", help="print the table as JSON")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "corpus":
        try:
            table = run_corpus(args.directory or shipped_corpus(), max(1, args.jobs))
        except TaskError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        print(dumps(table) if args.json else format_table(table), end="" if args.json else "\n")
        return EXIT_MISMATCH if table["totals"]["fail"] else EXIT_OK

    task = None
    try:
        task = load_task(args.input)
        if args.command != "run" and isinstance(task, dict) and task.get("command") != args.command:
            raise TaskError(f"task command {task.get('command')!r} does not match {args.command!r}",
                            "/command")
        code, report = run(task, tol=args.tol, seed=args.seed)
    except TaskError as exc:
        code, report = EXIT_INPUT, _error_report(task, EXIT_INPUT, exc)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = dumps(report)
    out = args.output
    if out is None and isinstance(task, dict) and isinstance(task.get("options"), dict):
        out = task["options"].get("output")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not args.quiet:
        print(summary(code, report), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
