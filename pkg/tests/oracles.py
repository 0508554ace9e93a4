"""Independent reference computations used by the tests.

Nothing here calls the routine it checks: genus counts come from
Riemann-Hurwitz, quiver verdicts from random subspaces, anti-Stokes
directions from sampling the sign of the exponent, and so on.
"""

import cmath
import math
from fractions import Fraction
from itertools import combinations

import numpy as np

from hitchin_kit.exactalg import ExactComplex, Poly, PolyMatrix


# --- random exact data ---------------------------------------------------------------

def gaussian_rational(rng, size=5, den=4):
    return ExactComplex(Fraction(rng.randint(-size, size), rng.randint(1, den)),
                        Fraction(rng.randint(-size, size), rng.randint(1, den)))


def random_poly(rng, max_degree=2, size=3):
    return Poly([ExactComplex(rng.randint(-size, size), rng.randint(-size, size))
                 for _ in range(rng.randint(0, max_degree) + 1)])


def random_constant_matrix(rng, n):
    return PolyMatrix([[gaussian_rational(rng) for _ in range(n)] for _ in range(n)])


def random_poly_matrix(rng, n, max_degree=2):
    return PolyMatrix([[random_poly(rng, max_degree) for _ in range(n)] for _ in range(n)])


def random_skew(rng, n, max_degree=2):
    rows = [[Poly(()) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            p = random_poly(rng, max_degree)
            rows[i][j] = p
            rows[j][i] = -p
    return PolyMatrix(rows)


def random_trace_free(rng, n, max_degree=1):
    m = random_poly_matrix(rng, n, max_degree)
    tr = m.trace()
    rows = [list(r) for r in m.rows]
    rows[n - 1][n - 1] = rows[n - 1][n - 1] - tr
    return PolyMatrix(rows)


def to_complex_matrix(m, z0=0):
    return np.array([[e.eval_numeric(z0) for e in row] for row in m.rows], dtype=complex)


# --- genus by Riemann-Hurwitz ------------------------------------------------------------

def spectral_genus_rh(n, g):
    """n-sheeted cover of a genus-g curve branched at the zeros of the discriminant,
    a section of K^(n(n-1)), each a simple branch point: 2 g_S - 2 = n(2g - 2) + B."""
    branch = n * (n - 1) * (2 * g - 2)
    return (n * (2 * g - 2) + branch + 2) // 2


# --- quiver stability by random subspaces -----------------------------------------------

def _projector(a, tol):
    u, s, _ = np.linalg.svd(a, full_matrices=True)
    keep = (s > tol).astype(float)
    width = min(a.shape[-2], a.shape[-1])
    uk = u[..., :, :width] * keep[..., None, :]
    return uk @ np.conj(np.swapaxes(uk, -1, -2)), keep.sum(axis=-1).astype(int)


def quiver_bruteforce(x, alpha, samples=1000, seed=0):
    """Verdict for a star-quiver representation from sampled subrepresentations.

    For each central dimension ``d0`` random subspaces ``W0`` are built as the
    span of a random arm subset plus random directions; the arms lying in
    ``W0`` give the largest admissible arm set, and all its subsets are scored.
    Slopes are exact fractions.
    """
    rng = np.random.default_rng(seed)
    n, r = len(x), len(x[0])
    xm = np.array(x, dtype=complex).T  # r x n
    alpha = [Fraction(a) for a in alpha]
    total = Fraction(alpha[0] * r + sum(alpha[1:]), r + n)
    norms = np.linalg.norm(xm, axis=0)
    masks = set()
    for d0 in range(r + 1):
        if d0 == 0:
            masks.add((0, sum(1 << i for i in range(n) if norms[i] == 0)))
            continue
        if d0 == r:
            masks.add((r, (1 << n) - 1))
            continue
        pick = rng.integers(0, 2, size=(samples, n)).astype(float)
        gens = xm[None, :, :] * pick[:, None, :]
        p_t, k = _projector(gens, 1e-9)
        raw = rng.standard_normal((samples, r, d0)) + 1j * rng.standard_normal((samples, r, d0))
        resid = raw - p_t @ raw
        cols = np.arange(d0)[None, :] < (d0 - k)[:, None]
        resid = resid * cols[:, None, :]
        p_w = p_t + resid @ np.linalg.pinv(resid, rcond=1e-9)
        ok = k <= d0
        diff = np.linalg.norm(xm[None] - p_w @ xm[None], axis=1)
        inside = diff <= 1e-8 * (1 + norms[None, :])
        for row in np.nonzero(ok)[0]:
            masks.add((d0, sum(1 << i for i in range(n) if inside[row, i])))
    best = None
    for d0, mask in masks:
        arms = [i for i in range(n) if mask >> i & 1]
        for size in range(len(arms) + 1):
            for s in combinations(arms, size):
                if (d0 == 0 and not s) or (d0 == r and size == n):
                    continue
                slope = Fraction(alpha[0] * d0 + sum(alpha[i + 1] for i in s), d0 + size)
                best = slope if best is None else max(best, slope)
    if best is None or best < total:
        return "stable"
    return "semistable" if best == total else "unstable"


# --- anti-Stokes directions by sampling ------------------------------------------------

def exponent_sign(a, k, theta):
    """Value of ``q_12 = a / z^k`` on the unit ray at angle ``theta``."""
    return complex(a) * cmath.exp(-1j * k * theta)


def is_anti_stokes(a, k, theta, tol=1e-9):
    """Ray on which ``q_12`` or ``q_21 = -q_12`` is real and negative."""
    w = exponent_sign(a, k, theta)
    return abs(w.imag) <= tol * abs(w) and abs(w.real) > 0


def grid_directions(a, k, points=720720):
    """Anti-Stokes angles located by sign changes of ``Im q_12`` on a fine grid."""
    thetas = np.linspace(0, 2 * math.pi, points, endpoint=False)
    im = np.imag(complex(a) * np.exp(-1j * k * thetas))
    change = (im == 0) | (im * np.roll(im, -1) < 0)
    return [float(t) for t in thetas[change]]


def antidiagonal(n):
    return PolyMatrix([[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)])


def random_so(rng, n, max_degree=2):
    """``A - Q A^t Q`` for the anti-diagonal form ``Q`` (``Q^{-1} = Q``): skew-adjoint."""
    a = random_poly_matrix(rng, n, max_degree)
    q = antidiagonal(n)
    return a - q @ a.T @ q, q
