"""Star-shaped quivers and hyperpolygons.

A star quiver has a central vertex of dimension ``r`` and ``n`` arms of
dimension one with arrows ``x_i: C -> C^r``; the doubled quiver adds
``y_i: C^r -> C``.  This module covers alpha-slope stability of
representations, GIT semistability of weighted points on the projective line,
the real and complex moment maps, a damped Gauss-Newton solver for the
level set ``mu_r = (0, alpha_1..alpha_n)``, ``mu_c = 0``, and the passage to a
parabolic Higgs field ``sum_i x_i y_i dz / (z - z_i)``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import DomainError, SolverError
from .exactalg import (ExactComplex, rank_exact, rational, rational_from_json, rational_to_json,
                       scalar_from_json, scalar_to_json)
from .parabolic import ParabolicBundle, ParabolicHiggs, ParabolicPoint, check_minimal_residues


@dataclass(frozen=True)
class StarQuiver:
    n: int
    r: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.r, int) or self.n < 1 or self.r < 1:
            raise DomainError("a star quiver needs n >= 1 arms and central dimension r >= 1")

    @property
    def dimension_vector(self):
        return (self.r,) + (1,) * self.n


def _alpha(alpha, size):
    alpha = tuple(a if not isinstance(a, (list, str, int)) else rational_from_json(a) for a in alpha)
    if len(alpha) != size:
        raise DomainError(f"need {size} stability parameters (alpha_0..alpha_n), got {len(alpha)}")
    return alpha


@dataclass(frozen=True)
class QuiverRep:
    quiver: StarQuiver
    x: tuple  # n column vectors of length r

    def __post_init__(self):
        x = tuple(tuple(scalar_from_json(c) for c in col) for col in self.x)
        object.__setattr__(self, "x", x)
        if len(x) != self.quiver.n or any(len(col) != self.quiver.r for col in x):
            raise DomainError("arm vectors do not match the quiver")

    @classmethod
    def from_json(cls, data):
        x = data["x"]
        return cls(StarQuiver(len(x), int(data.get("r", len(x[0]) if x else 1))), tuple(x))

    def to_json(self):
        return {"r": self.quiver.r, "x": [[scalar_to_json(c) for c in col] for col in self.x]}


def alpha_slope(dims, alpha):
    """``sum_v alpha_v dim W_v / sum_v dim W_v``."""
    dims = list(dims)
    alpha = _alpha(alpha, len(dims))
    total = sum(dims)
    if total == 0:
        raise DomainError("zero-dimensional representation has no slope")
    return sum((a * d for a, d in zip(alpha, dims)), rational(0)) / total


@dataclass
class StabilityVerdict:
    verdict: str  # "stable", "semistable" or "unstable"
    slope: object
    witness: tuple = None  # (dim W_0, arms S)
    witness_slope: object = None

    def to_json(self):
        out = {"verdict": self.verdict, "slope": rational_to_json(self.slope)}
        if self.witness is not None:
            out["witness"] = {"central_dim": self.witness[0], "arms": list(self.witness[1]),
                              "slope": rational_to_json(self.witness_slope)}
        return out


def _span_dim(vectors):
    vectors = [v for v in vectors if any(c for c in v)]
    return rank_exact(vectors) if vectors else 0


def star_stability(rep, alpha):
    """Exact alpha-stability of a star-quiver representation.

    A subrepresentation is an arm set ``S`` with a central subspace ``W_0``
    containing ``x_i`` for ``i`` in ``S``.  For fixed ``S`` the slope is monotone
    in ``dim W_0``, so ``W_0 = span(x_S)`` and ``W_0 = C^r`` are the only
    candidates needed.  The witness is the maximal-slope proper candidate
    (ties: smaller central dimension, then lexicographically smaller ``S``).
    """
    q = rep.quiver
    alpha = _alpha(alpha, q.n + 1)
    mu = alpha_slope(q.dimension_vector, alpha)
    best = None
    for size in range(q.n + 1):
        for s in combinations(range(q.n), size):
            span = _span_dim([rep.x[i] for i in s])
            for d0 in sorted({span, q.r}):
                if (d0 == 0 and not s) or (d0 == q.r and size == q.n):
                    continue
                slope = (alpha[0] * d0 + sum((alpha[i + 1] for i in s), rational(0))) / (d0 + size)
                key = (slope, -d0, [-i for i in s])
                if best is None or key > best[0]:
                    best = (key, (d0, s), slope)
    if best is None:
        return StabilityVerdict("stable", mu)
    _, witness, slope = best
    if slope < mu:
        return StabilityVerdict("stable", mu, witness, slope)
    verdict = "semistable" if slope == mu else "unstable"
    return StabilityVerdict(verdict, mu, witness, slope)


def polygon_semistable_points(points, weights):
    """Weighted points on P^1 (``"inf"`` for infinity): at every coincidence
    cluster the clustered weight must not exceed the remaining weight."""
    if len(points) != len(weights) or not points:
        raise DomainError("need one positive weight per point")
    if any(not isinstance(w, int) or isinstance(w, bool) or w < 1 for w in weights):
        raise DomainError("weights must be positive integers")
    clusters = {}
    for p, w in zip(points, weights):
        key = "inf" if isinstance(p, str) and p.lower() in ("inf", "infinity") else scalar_from_json(p)
        if isinstance(key, complex):
            key = ExactComplex.coerce(key)
        clusters[key] = clusters.get(key, 0) + w
    total = sum(weights)
    verdict = "stable"
    worst = None
    for key, w in clusters.items():
        rest = total - w
        if w > rest:
            verdict, worst = "unstable", key
            break
        if w == rest and verdict == "stable":
            verdict, worst = "semistable", key
    return {"verdict": verdict,
            "cluster": None if worst is None else ("inf" if worst == "inf" else scalar_to_json(worst)),
            "cluster_weights": sorted(clusters.values(), reverse=True)}


# --- moment maps ----------------------------------------------------------------

def _zero_like(v):
    return ExactComplex(0) if isinstance(v, ExactComplex) else 0j


def _conj(v):
    return v.conjugate()


@dataclass
class HyperpolygonPoint:
    x: list  # n column vectors in C^r
    y: list  # n row vectors (maps C^r -> C)
    alpha: tuple = None

    def __post_init__(self):
        if len(self.x) != len(self.y) or not self.x:
            raise DomainError("x and y need one entry per arm")
        r = len(self.x[0])
        if any(len(v) != r for v in self.x) or any(len(v) != r for v in self.y):
            raise DomainError("inconsistent central dimension")
        if self.alpha is not None:
            self.alpha = _alpha(self.alpha, len(self.x) + 1)

    @property
    def n(self):
        return len(self.x)

    @property
    def r(self):
        return len(self.x[0])

    @property
    def is_exact(self):
        return all(isinstance(c, ExactComplex) for v in self.x + self.y for c in v)

    @classmethod
    def from_json(cls, data):
        x = [[scalar_from_json(c) for c in v] for v in data["x"]]
        y = [[scalar_from_json(c) for c in v] for v in data["y"]]
        if not all(isinstance(c, ExactComplex) for v in x + y for c in v):
            x = [[complex(c) for c in v] for v in x]
            y = [[complex(c) for c in v] for v in y]
        alpha = [rational_from_json(a) for a in data["alpha"]] if data.get("alpha") else None
        return cls(x, y, alpha)

    def to_json(self):
        out = {"x": [[scalar_to_json(c) for c in v] for v in self.x],
               "y": [[scalar_to_json(c) for c in v] for v in self.y]}
        if self.alpha is not None:
            out["alpha"] = [rational_to_json(a) for a in self.alpha]
        return out


def _trace_free(m):
    r = len(m)
    tr = m[0][0]
    for i in range(1, r):
        tr = tr + m[i][i]
    shift = tr * (ExactComplex(rational(1, r)) if isinstance(tr, ExactComplex) else 1.0 / r)
    return [[m[i][j] - shift if i == j else m[i][j] for j in range(r)] for i in range(r)]


def moment_maps(p):
    """``(mu_r, mu_c)`` as ``(matrix, scalars)`` pairs.

    ``mu_r = ((x x* - y* y)_0, |x_i|^2 - |y_i|^2)`` and
    ``mu_c = ((x y)_0, y_i x_i)`` with ``x`` the ``r x n`` matrix of columns
    and ``y`` the ``n x r`` matrix of rows.  Exact on exact input.
    """
    r, n = p.r, p.n
    z = _zero_like(p.x[0][0])
    real_m = [[z for _ in range(r)] for _ in range(r)]
    cplx_m = [[z for _ in range(r)] for _ in range(r)]
    real_s, cplx_s = [], []
    for xi, yi in zip(p.x, p.y):
        for a in range(r):
            for b in range(r):
                real_m[a][b] = real_m[a][b] + xi[a] * _conj(xi[b]) - _conj(yi[a]) * yi[b]
                cplx_m[a][b] = cplx_m[a][b] + xi[a] * yi[b]
        nx = z
        ny = z
        yx = z
        for a in range(r):
            nx = nx + xi[a] * _conj(xi[a])
            ny = ny + yi[a] * _conj(yi[a])
            yx = yx + yi[a] * xi[a]
        real_s.append(nx - ny)
        cplx_s.append(yx)
    return (_trace_free(real_m), real_s), (_trace_free(cplx_m), cplx_s)


# --- level-set solver -------------------------------------------------------------

def _unpack(v, r, n):
    # v holds Re x, Im x (r x n, column i = x_i) then Re y, Im y (n x r, row i = y_i)
    k = r * n
    x = (v[..., :k] + 1j * v[..., k:2 * k]).reshape(v.shape[:-1] + (r, n))
    y = (v[..., 2 * k:3 * k] + 1j * v[..., 3 * k:]).reshape(v.shape[:-1] + (n, r))
    return x, y


def _quadratic(v, r, n):
    """Real vector of all moment-map components (without the level), batched."""
    x, y = _unpack(v, r, n)
    xh = np.conj(np.swapaxes(x, -1, -2))
    yh = np.conj(np.swapaxes(y, -1, -2))
    eye = np.eye(r)
    real_m = x @ xh - yh @ y
    real_m = real_m - (np.trace(real_m, axis1=-2, axis2=-1)[..., None, None] / r) * eye
    cplx_m = x @ y
    cplx_m = cplx_m - (np.trace(cplx_m, axis1=-2, axis2=-1)[..., None, None] / r) * eye
    real_s = np.sum(np.abs(x) ** 2, axis=-2) - np.sum(np.abs(y) ** 2, axis=-1)
    cplx_s = np.einsum("...ia,...ai->...i", y, x)
    iu = np.triu_indices(r, 1)
    parts = [np.real(np.diagonal(real_m, axis1=-2, axis2=-1))[..., :-1],
             np.real(real_m[..., iu[0], iu[1]]), np.imag(real_m[..., iu[0], iu[1]]),
             real_s,
             np.real(cplx_m).reshape(cplx_m.shape[:-2] + (r * r,))[..., :-1],
             np.imag(cplx_m).reshape(cplx_m.shape[:-2] + (r * r,))[..., :-1],
             np.real(cplx_s), np.imag(cplx_s)]
    return np.concatenate(parts, axis=-1)


@dataclass
class SolveReport:
    point: HyperpolygonPoint
    converged: bool
    iterations: int
    residual: float
    exact_residual: float = None
    history: list = field(default_factory=list)

    def to_json(self):
        return {"point": self.point.to_json(), "converged": self.converged,
                "iterations": self.iterations, "residual": self.residual,
                "exact_residual": self.exact_residual}


def default_alpha(n, seed=0):
    """Seeded positive weights satisfying the strict polygon inequalities, with alpha_0 = 0."""
    rng = np.random.default_rng(seed)
    while True:
        a = [Fraction(int(k), 4) for k in rng.integers(4, 9, size=n)]
        if n == 1 or 2 * max(a) < sum(a):
            return (Fraction(0),) + tuple(a)


def solve_level_set(quiver, alpha, seed=0, tol=1e-9, max_iter=10_000, record=False):
    """Levenberg-Marquardt on ``||mu - level||^2`` from a seeded random start.

    Level: trace-free blocks zero, ``|x_i|^2 - |y_i|^2 = alpha_i``, ``y_i x_i = 0``.
    Steps are the damped minimum-norm ``-J^T (J J^T + lam I)^{-1} F``; ``lam``
    is divided by 3 on success and doubled on failure.  Raises
    :class:`SolverError` (carrying the best residual) without convergence.
    """
    r, n = quiver.r, quiver.n
    alpha = _alpha(alpha, n + 1)
    target = np.zeros_like(_quadratic(np.zeros(4 * r * n), r, n))
    scal = (r - 1) + 2 * (r * (r - 1) // 2)
    target[scal:scal + n] = [float(a) for a in alpha[1:]]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(4 * r * n)
    basis = np.eye(v.size)
    q_basis = _quadratic(basis, r, n)

    def residual_vec(w):
        return _quadratic(w, r, n) - target

    f = residual_vec(v)
    norm = float(np.linalg.norm(f))
    lam = 1e-3
    history = [norm] if record else []
    it = 0
    while it < max_iter and norm > tol * 1e-3:
        it += 1
        # exact Jacobian of the quadratic map by polarisation
        qv = _quadratic(v, r, n)
        jac = (_quadratic(v + basis, r, n) - qv - q_basis).T
        jjt = jac @ jac.T
        rhs = np.linalg.solve(jjt + lam * np.eye(jjt.shape[0]), f)
        step = -jac.T @ rhs
        trial = v + step
        f_trial = residual_vec(trial)
        n_trial = float(np.linalg.norm(f_trial))
        if n_trial < norm:
            v, f, norm = trial, f_trial, n_trial
            lam = max(lam / 3.0, 1e-15)
        else:
            lam = min(lam * 2.0, 1e12)
            if lam >= 1e12:
                break
        if record:
            history.append(norm)
    x, y = _unpack(v, r, n)
    point = HyperpolygonPoint([list(map(complex, x[:, i])) for i in range(n)],
                              [list(map(complex, y[i, :])) for i in range(n)], alpha)
    report = SolveReport(point, norm <= tol, it, norm, history=history)
    if all(isinstance(a, Fraction) or type(a).__name__ == "mpq" for a in alpha):
        report.exact_residual = _exact_residual(point, alpha)
    if not report.converged:
        raise SolverError(f"level set not reached: residual {norm:.3e} after {it} iterations",
                          norm, it)
    return report


def _exact_residual(point, alpha):
    """Max-norm distance to the level, evaluated exactly on the float iterate."""
    ex = HyperpolygonPoint([[ExactComplex.coerce(c) for c in v] for v in point.x],
                           [[ExactComplex.coerce(c) for c in v] for v in point.y])
    (rm, rs), (cm, cs) = moment_maps(ex)
    worst = Fraction(0)
    for e in [e for row in rm for e in row] + [e for row in cm for e in row] + list(cs):
        worst = max(worst, abs(Fraction(e.re)), abs(Fraction(e.im)))
    for s, a in zip(rs, alpha[1:]):
        worst = max(worst, abs(Fraction(s.re) - Fraction(a)), abs(Fraction(s.im)))
    return float(worst)


# --- parabolic Higgs field -----------------------------------------------------------

def hyperpolygon_to_higgs(p, marked_points, weights=None, tol=1e-9):
    """``phi = sum_i Res_i dz / (z - z_i)`` with ``Res_i = x_i y_i`` on the trivial
    rank-r bundle.

    Requires ``y_i x_i = 0`` for every arm (exactly, or within ``tol``).  The
    closure ``sum_i Res_i = 0``, equivalent to the trace-free part of ``x y``
    vanishing, is reported rather than required.  Default flag weights at
    ``z_i`` are ``(1/2, 0)`` with multiplicities ``(1, r-1)`` when ``x_i != 0``.
    Returns ``(ParabolicHiggs, ResidueReport)``.
    """
    if len(marked_points) != p.n:
        raise DomainError("one marked point per arm required")
    locs = [scalar_from_json(z) for z in marked_points]
    if len({complex(z) for z in locs}) != len(locs):
        raise DomainError("marked points must be distinct")
    exact = p.is_exact
    r = p.r
    _, (_, cs) = moment_maps(p)
    for i, s in enumerate(cs):
        bad = bool(s) if exact else abs(complex(s)) > tol * (1 + _arm_norm(p, i))
        if bad:
            raise DomainError(f"arm {i}: y_i x_i = {s} is not zero")
    if exact:
        residues = [[[xi[a] * yi[b] for b in range(r)] for a in range(r)] for xi, yi in zip(p.x, p.y)]
    else:
        residues = [np.outer(np.asarray(xi, dtype=complex), np.asarray(yi, dtype=complex))
                    for xi, yi in zip(p.x, p.y)]
    points = []
    for i, (z, xi) in enumerate(zip(locs, p.x)):
        if weights is not None:
            w = weights[i]
            points.append(ParabolicPoint(ExactComplex.coerce(z), tuple(w["multiplicities"]),
                                         tuple(w["weights"])))
        elif r > 1 and any(abs(complex(c)) > 0 for c in xi):
            points.append(ParabolicPoint(ExactComplex.coerce(z), (1, r - 1),
                                         (rational(1, 2), rational(0))))
        else:
            points.append(ParabolicPoint(ExactComplex.coerce(z), (r,), (rational(0),)))
    higgs = ParabolicHiggs(ParabolicBundle(r, 0, tuple(points)), residues)
    return higgs, check_minimal_residues(higgs, tol=tol, require_sum_zero=True)


def _arm_norm(p, i):
    return float(np.linalg.norm(np.asarray(p.x[i], dtype=complex)) *
                 np.linalg.norm(np.asarray(p.y[i], dtype=complex)))
