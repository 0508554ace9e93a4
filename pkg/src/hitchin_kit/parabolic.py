"""Parabolic bundles on a chart: weights, parabolic degree and slope,
semistability against supplied subbundle degree bounds, and the residue
conditions of minimal parabolic Higgs fields.

Weights at a point are stored in decreasing order ``1 > a_1 > ... > a_s >= 0``
with step multiplicities ``m_1..m_s`` summing to the rank.
"""

from dataclasses import dataclass, field
from itertools import product
from math import prod

import numpy as np

from .errors import ConfigurationError, DomainError, InvariantError, StructureError
from .exactalg import (ExactComplex, PolyMatrix, constant_entries, rank_exact, rational,
                       rational_from_json, rational_to_json)


def _weight(w):
    if isinstance(w, (list, tuple, str, int)):
        return rational_from_json(w)
    return rational(w.numerator, w.denominator)


@dataclass(frozen=True)
class ParabolicPoint:
    point: ExactComplex
    multiplicities: tuple
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "point", ExactComplex.coerce(self.point))
        mult = tuple(self.multiplicities)
        weights = tuple(_weight(w) for w in self.weights)
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "weights", weights)
        if not mult or len(mult) != len(weights):
            raise DomainError("need one multiplicity per weight")
        if any(not isinstance(m, int) or isinstance(m, bool) or m < 1 for m in mult):
            raise DomainError(f"multiplicities must be positive integers, got {mult}")
        if not weights[0] < 1:
            raise DomainError("largest weight must be below the sentinel 1")
        if weights[-1] < 0:
            raise DomainError("weights must be non-negative")
        if any(not a > b for a, b in zip(weights, weights[1:])):
            raise DomainError("weights must be strictly decreasing")

    @property
    def rank(self):
        return sum(self.multiplicities)

    def weighted_sum(self):
        return sum((m * a for m, a in zip(self.multiplicities, self.weights)), rational(0))

    @classmethod
    def from_json(cls, data):
        return cls(ExactComplex.from_json(data.get("point", 0)), tuple(data["multiplicities"]),
                   tuple(rational_from_json(w) for w in data["weights"]))

    def to_json(self):
        return {"point": self.point.to_json(), "multiplicities": list(self.multiplicities),
                "weights": [rational_to_json(w) for w in self.weights]}


@dataclass(frozen=True)
class ParabolicBundle:
    rank: int
    degree: int
    points: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not isinstance(self.rank, int) or self.rank < 1:
            raise DomainError("rank must be a positive integer")
        if not isinstance(self.degree, int):
            raise DomainError("degree must be an integer")
        seen = set()
        for p in self.points:
            if p.rank != self.rank:
                raise DomainError(f"multiplicities at {p.point} sum to {p.rank}, rank is {self.rank}")
            if p.point in seen:
                raise DomainError(f"marked point {p.point} repeated")
            seen.add(p.point)

    @classmethod
    def from_json(cls, data):
        return cls(int(data["rank"]), int(data["degree"]),
                   tuple(ParabolicPoint.from_json(p) for p in data.get("points", [])))

    def to_json(self):
        return {"rank": self.rank, "degree": self.degree,
                "points": [p.to_json() for p in self.points]}


def parabolic_degree(b):
    """``deg E + sum over points of sum_i m_i a_i`` (the sentinel weight 1 is not counted)."""
    total = rational(b.degree)
    for p in b.points:
        total += p.weighted_sum()
    return total


def parabolic_slope(b):
    return parabolic_degree(b) / b.rank


def induced_sub_structure(b, sub_rank, sub_degree, selection):
    """Candidate parabolic subbundle of rank ``sub_rank`` and degree ``sub_degree``.

    ``selection[j]`` lists ``sub_rank`` weight indices at point ``j``; index ``i``
    may appear at most ``multiplicities[i]`` times.
    """
    if not isinstance(sub_rank, int) or not 1 <= sub_rank < b.rank:
        raise DomainError(f"sub-rank must lie in [1, {b.rank - 1}]")
    if len(selection) != len(b.points):
        raise DomainError(f"selection covers {len(selection)} points, bundle has {len(b.points)}")
    points = []
    for p, chosen in zip(b.points, selection):
        chosen = list(chosen)
        if len(chosen) != sub_rank:
            raise DomainError(f"selection at {p.point} has {len(chosen)} weights, need {sub_rank}")
        counts = [0] * len(p.weights)
        for i in chosen:
            if not isinstance(i, int) or not 0 <= i < len(p.weights):
                raise DomainError(f"weight index {i!r} out of range at {p.point}")
            counts[i] += 1
            if counts[i] > p.multiplicities[i]:
                raise DomainError(f"weight {i} used more than its multiplicity at {p.point}")
        mult = tuple(c for c in counts if c)
        weights = tuple(w for c, w in zip(counts, p.weights) if c)
        points.append(ParabolicPoint(p.point, mult, weights))
    return ParabolicBundle(sub_rank, int(sub_degree), tuple(points))


def _count_vectors(mult, total):
    """All ``(c_1..c_s)`` with ``0 <= c_i <= m_i`` summing to ``total``."""
    ranges = [range(min(m, total) + 1) for m in mult]
    return [c for c in product(*ranges) if sum(c) == total]


def _selection_from_counts(counts):
    return tuple(i for i, c in enumerate(counts) for _ in range(c))


@dataclass
class Candidate:
    sub_rank: int
    sub_degree: int
    selection: tuple
    slope: object

    def to_json(self):
        return {"sub_rank": self.sub_rank, "sub_degree": self.sub_degree,
                "selection": [list(s) for s in self.selection],
                "slope": rational_to_json(self.slope)}


@dataclass
class SemistabilityVerdict:
    verdict: str  # "stable", "semistable" or "unstable"
    slope: object
    worst: Candidate = None
    candidates_checked: int = 0

    def to_json(self):
        return {"verdict": self.verdict, "slope": rational_to_json(self.slope),
                "worst": self.worst.to_json() if self.worst is not None else None,
                "candidates_checked": self.candidates_checked}


def _bound_for(bounds, k):
    if isinstance(bounds, dict):
        value = bounds.get(k, bounds.get(str(k)))
    else:
        value = bounds[k - 1] if k - 1 < len(bounds) else None
    if value is None:
        raise ConfigurationError(f"no subbundle degree bound supplied for sub-rank {k}")
    return int(value)


def parabolic_semistable(b, bounds):
    """Compare the bundle's parabolic slope with every candidate subbundle.

    ``bounds`` gives, per sub-rank ``k = 1..r-1`` (list or dict), the maximal
    degree of a rank-k subbundle.  Only the top degree is checked per rank,
    since lower degrees give strictly smaller slopes; every weight selection
    is enumerated.  The verdict is exact relative to the supplied bounds.
    """
    if bounds is None:
        raise ConfigurationError("subbundle degree bounds are required")
    mu = parabolic_slope(b)
    worst = None
    checked = 0
    for k in range(1, b.rank):
        d = _bound_for(bounds, k)
        options = [_count_vectors(p.multiplicities, k) for p in b.points]
        best_sel = []
        best_sum = rational(d)
        checked += prod(len(opts) for opts in options)
        # the slope is a sum over points, so the best selection is the per-point best
        for p, opts in zip(b.points, options):
            scored = [(sum((c * w for c, w in zip(cv, p.weights)), rational(0)),
                       _selection_from_counts(cv)) for cv in opts]
            top = max(s for s, _ in scored)
            best_sel.append(min(sel for s, sel in scored if s == top))
            best_sum += top
        cand = Candidate(k, d, tuple(best_sel), best_sum / k)
        key = (cand.slope, [-k] + [-i for s in cand.selection for i in s])
        if worst is None or key > worst[0]:
            worst = (key, cand)
    if worst is None:
        return SemistabilityVerdict("stable", mu, None, 0)
    cand = worst[1]
    if cand.slope < mu:
        verdict = "stable"
    elif cand.slope == mu:
        verdict = "semistable"
    else:
        verdict = "unstable"
    return SemistabilityVerdict(verdict, mu, cand, checked)


# --- minimal parabolic Higgs fields -------------------------------------------

def _as_residue(m):
    if isinstance(m, PolyMatrix):
        return constant_entries(m)
    if isinstance(m, (list, tuple)) and m and isinstance(m[0][0], ExactComplex):
        return [list(r) for r in m]
    return np.asarray(m, dtype=complex)


@dataclass
class ParabolicHiggs:
    """Residues ``Res_i`` at the marked points plus an optional polynomial part.

    Residues are exact (PolyMatrix with constant entries) or numeric arrays.
    ``lines`` optionally gives, per point, a spanning vector of the line ``L_i``
    of a minimal flag.
    """

    bundle: ParabolicBundle
    residues: list
    poly_part: PolyMatrix = None
    lines: list = None

    def __post_init__(self):
        self.residues = [_as_residue(r) for r in self.residues]
        if len(self.residues) != len(self.bundle.points):
            raise StructureError("one residue per marked point required")
        for r in self.residues:
            if len(r) != self.bundle.rank or any(len(row) != self.bundle.rank for row in r):
                raise StructureError("residue size does not match the rank")

    @classmethod
    def from_json(cls, data):
        bundle = ParabolicBundle.from_json(data["bundle"])
        residues = [constant_entries(PolyMatrix.from_json(r)) for r in data["residues"]]
        poly = PolyMatrix.from_json(data["poly_part"]) if data.get("poly_part") else None
        lines = None
        if data.get("lines") is not None:
            lines = [[ExactComplex.from_json(x) for x in v] for v in data["lines"]]
        return cls(bundle, residues, poly, lines)


@dataclass
class ResidueReport:
    passed: bool = True
    conditions: list = field(default_factory=list)
    first_failure: str = None

    def add(self, name, ok, detail=""):
        self.conditions.append({"name": name, "passed": bool(ok), "detail": detail})
        if not ok and self.passed:
            self.passed = False
            self.first_failure = name

    def to_json(self):
        return {"passed": self.passed, "first_failure": self.first_failure,
                "conditions": self.conditions}


def _exact_mul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), ExactComplex(0)) for j in range(n)]
            for i in range(n)]


def _check_exact(res, i, report, line):
    n = len(res)
    tr = sum((res[k][k] for k in range(n)), ExactComplex(0))
    report.add(f"res{i}.trace_zero", not tr, "" if not tr else f"trace = {tr}")
    sq = _exact_mul(res, res)
    report.add(f"res{i}.square_zero", all(not e for row in sq for e in row))
    rk = rank_exact(res)
    report.add(f"res{i}.rank_at_most_one", rk <= 1, f"rank = {rk}")
    if line is not None:
        image = [[res[r][k] for r in range(n)] for k in range(n)]  # columns
        report.add(f"res{i}.image_in_line", all(rank_exact([line, col]) <= 1 for col in image))
        kills = [sum((res[r][k] * line[k] for k in range(n)), ExactComplex(0)) for r in range(n)]
        report.add(f"res{i}.kills_line", all(not e for e in kills))
    if report.passed and any(e for row in _exact_mul(sq, res) for e in row):
        raise InvariantError("residue passed yet its cube is non-zero")


def _check_numeric(res, i, report, tol, line):
    scale = 1.0 + float(np.linalg.norm(res, 2))
    tr = complex(np.trace(res))
    report.add(f"res{i}.trace_zero", abs(tr) <= tol * scale, f"|trace| = {abs(tr):.3e}")
    sq = float(np.linalg.norm(res @ res, 2))
    report.add(f"res{i}.square_zero", sq <= tol * scale * scale, f"|Res^2| = {sq:.3e}")
    sv = np.linalg.svd(res, compute_uv=False)
    second = float(sv[1]) if len(sv) > 1 else 0.0
    report.add(f"res{i}.rank_at_most_one", second <= tol * scale, f"sigma_2 = {second:.3e}")
    if line is not None:
        v = np.asarray([complex(x) for x in line])
        v = v / np.linalg.norm(v)
        proj = res - np.outer(v, v.conj()) @ res
        report.add(f"res{i}.image_in_line", np.linalg.norm(proj, 2) <= tol * scale)
        report.add(f"res{i}.kills_line", np.linalg.norm(res @ v) <= tol * scale)


def check_minimal_residues(h, tol=1e-9, require_sum_zero=False):
    """Trace zero, square zero and rank at most one for every residue.

    Exact residues are checked exactly; numeric ones within ``tol`` relative to
    ``1 + ||Res||``.  With ``require_sum_zero`` the residue theorem on the
    projective line (no polynomial part) is checked as well.
    """
    report = ResidueReport()
    numeric = any(isinstance(r, np.ndarray) for r in h.residues)
    for i, res in enumerate(h.residues):
        line = h.lines[i] if h.lines is not None else None
        if numeric:
            _check_numeric(np.asarray([[complex(x) for x in row] for row in res], dtype=complex),
                           i, report, tol, line)
        else:
            _check_exact(res, i, report, line)
    if require_sum_zero:
        n = h.bundle.rank
        if numeric:
            total = sum(np.asarray([[complex(x) for x in row] for row in r]) for r in h.residues)
            scale = 1.0 + max(float(np.linalg.norm(np.asarray(r, dtype=complex), 2)) for r in h.residues)
            report.add("residue_sum_zero", float(np.linalg.norm(total, 2)) <= tol * scale)
        else:
            total = [[sum((r[a][b] for r in h.residues), ExactComplex(0)) for b in range(n)]
                     for a in range(n)]
            report.add("residue_sum_zero", all(not e for row in total for e in row))
    return report
