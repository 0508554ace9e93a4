"""Spectral curves ``eta^n + a_1(z) eta^(n-1) + ... + a_n(z) = 0`` on a chart.

Covers extraction from a Higgs pair, exact shape fingerprints (involution,
eta-power factor, perfect square), the quotient by ``eta -> -eta`` and a
numeric monodromy test: the sheets are continued around small circles about
every discriminant zero and the orbits of the resulting permutation group
are reported.  A transitive group certifies that the curve is irreducible.
"""

from dataclasses import dataclass, field
import cmath
import math

import numpy as np

from . import tracking
from .errors import GeometryError, StructureError
from .exactalg import POLY_ZERO, ExactComplex, Poly, PolyMatrix, char_poly, det, poly_gcd

LOOP_STEPS = 64


@dataclass(frozen=True)
class ShapeFlags:
    has_involution: bool
    eta_power_factor: int
    is_perfect_square: bool

    def to_json(self):
        return {"has_involution": self.has_involution,
                "eta_power_factor": self.eta_power_factor,
                "is_perfect_square": self.is_perfect_square}


@dataclass(frozen=True)
class SpectralCurve:
    n: int
    coeffs: tuple
    twist_degrees: tuple
    shape: ShapeFlags = None

    def __post_init__(self):
        coeffs = tuple(Poly.coerce(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "twist_degrees", tuple(int(t) for t in self.twist_degrees))
        if len(coeffs) != self.n or len(self.twist_degrees) != self.n:
            raise StructureError("a spectral curve needs n coefficients and n twist degrees")
        for i, (c, t) in enumerate(zip(coeffs, self.twist_degrees), start=1):
            if c.degree > t:
                raise GeometryError(f"a_{i} has degree {c.degree} above its declared bound {t}")
        if self.shape is None:
            object.__setattr__(self, "shape", shape_flags(coeffs))

    @classmethod
    def from_coeffs(cls, coeffs, twist_degree=None):
        """Curve with ``twist_degrees[i-1] = i * twist_degree``; without a twist the
        actual coefficient degrees are used as bounds."""
        coeffs = [Poly.coerce(c) for c in coeffs]
        if twist_degree is None:
            bounds = [max(c.degree, 0) for c in coeffs]
        else:
            bounds = [i * twist_degree for i in range(1, len(coeffs) + 1)]
        return cls(len(coeffs), tuple(coeffs), tuple(bounds))

    def fibre_poly(self, z):
        """Numeric fibre coefficients (descending powers of eta) at ``z``."""
        return np.array([1.0] + [c.eval_numeric(z) for c in self.coeffs], dtype=complex)

    def to_json(self):
        return {"n": self.n, "coeffs": [c.to_json() for c in self.coeffs],
                "twist_degrees": list(self.twist_degrees), "shape": self.shape.to_json()}

    def __str__(self):
        terms = [f"eta^{self.n}"]
        for i, c in enumerate(self.coeffs, start=1):
            if c:
                power = self.n - i
                mono = "" if power == 0 else ("*eta" if power == 1 else f"*eta^{power}")
                terms.append(f"({c}){mono}")
        return " + ".join(terms)


def monic_square_root(coeffs):
    """Coefficients ``b_1..b_m`` with ``(eta^m + sum b_j eta^(m-j))^2`` equal to
    ``eta^(2m) + sum a_i eta^(2m-i)``, or ``None`` when no such root exists."""
    n = len(coeffs)
    if n % 2:
        return None
    m = n // 2
    a = [Poly.coerce(c) for c in coeffs]
    half = ExactComplex(1, 0) / 2
    b = []
    for j in range(1, m + 1):
        acc = a[j - 1]
        for i in range(1, j):
            acc = acc - b[i - 1] * b[j - i - 1]
        b.append(acc * half)
    full = [POLY_ZERO] * n
    ext = [Poly.const(1)] + b
    for i in range(m + 1):
        for j in range(m + 1):
            if i + j:
                full[i + j - 1] = full[i + j - 1] + ext[i] * ext[j]
    return b if full == a else None


def shape_flags(coeffs):
    n = len(coeffs)
    involution = all(not coeffs[i - 1] for i in range(1, n + 1, 2))
    q = 0
    while q < n - 1 and not coeffs[n - 1 - q]:
        q += 1
    square = monic_square_root(coeffs) is not None
    return ShapeFlags(involution, q, square)


def from_higgs(h):
    """Spectral curve of a Higgs pair: coefficients of ``det(eta - phi)``."""
    from .higgs import _ensure_valid

    _ensure_valid(h)
    coeffs = char_poly(h.phi)
    bounds = tuple(i * h.twist_degree for i in range(1, h.n + 1))
    return SpectralCurve(h.n, coeffs, bounds)


@dataclass(frozen=True)
class Diagnosis:
    kind: str  # "generic" or "reducible"
    reason: str = ""
    involution: bool = False

    @property
    def label(self):
        return "Generic" if self.kind == "generic" else "ReducibleByShape"

    def to_json(self):
        return {"kind": self.label, "reason": self.reason, "involution": self.involution}


def classify(curve):
    """ReducibleByShape on exact evidence (eta factor, perfect square), else Generic."""
    s = curve.shape
    if all(not c for c in curve.coeffs):
        return Diagnosis("reducible", f"nilpotent: eta^{curve.n}", s.has_involution)
    reasons = []
    if s.eta_power_factor >= 1:
        reasons.append(f"eta factor: eta^{s.eta_power_factor}")
    if s.is_perfect_square:
        reasons.append("perfect square")
    if reasons:
        return Diagnosis("reducible", "; ".join(reasons), s.has_involution)
    return Diagnosis("generic", "", s.has_involution)


def quotient_curve_upp(curve):
    """Quotient by ``eta -> -eta``: the p-sheeted curve in ``xi = eta^2``."""
    if curve.n % 2 or not curve.shape.has_involution:
        raise StructureError("quotient needs an even sheet count and the eta -> -eta involution")
    p = curve.n // 2
    coeffs = tuple(curve.coeffs[2 * j - 1] for j in range(1, p + 1))
    bounds = tuple(curve.twist_degrees[2 * j - 1] for j in range(1, p + 1))
    return SpectralCurve(p, coeffs, bounds)


def resubstitute(quotient):
    """Inverse of :func:`quotient_curve_upp`: substitute ``xi = eta^2``."""
    coeffs = []
    bounds = []
    for j, (c, t) in enumerate(zip(quotient.coeffs, quotient.twist_degrees), start=1):
        # slot 2j carries bound t; the empty odd slot gets the bound (2j-1)/(2j) * t
        coeffs += [POLY_ZERO, c]
        bounds += [(2 * j - 1) * t // (2 * j), t]
    return SpectralCurve(2 * quotient.n, tuple(coeffs), tuple(bounds))


# --- discriminant and monodromy ---------------------------------------------

def discriminant(curve):
    """Resultant of the fibre polynomial and its eta-derivative (a polynomial in z).

    Computed as the determinant of the Sylvester matrix; the sign convention is
    irrelevant for locating zeros.
    """
    n = curve.n
    if n == 1:
        return Poly.const(1)
    p = [Poly.const(1)] + list(curve.coeffs)
    dp = [Poly.const(n - i) * p[i] for i in range(n)]
    size = 2 * n - 1
    rows = []
    for r in range(n - 1):
        rows.append([POLY_ZERO] * r + p + [POLY_ZERO] * (size - r - n - 1))
    for r in range(n):
        rows.append([POLY_ZERO] * r + dp + [POLY_ZERO] * (size - r - n))
    return det(PolyMatrix(rows))


def squarefree_part(p):
    g = poly_gcd(p, p.derivative())
    return p.exact_div(g) if g.degree > 0 else p


def _numeric_roots(p):
    coeffs = p.complex_coeffs()[::-1]
    if len(coeffs) <= 1:
        return []
    roots = np.roots(coeffs)
    dcoeffs = np.polyder(coeffs)
    polished = []
    for r in roots:
        for _ in range(20):
            d = np.polyval(dcoeffs, r)
            if d == 0:
                break
            step = np.polyval(coeffs, r) / d
            r = r - step
            if abs(step) <= 1e-16 * (1 + abs(r)):
                break
        polished.append(complex(r))
    return polished


def cycle_notation(perm):
    seen = set()
    parts = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        parts.append("(" + " ".join(str(c) for c in cycle) + ")")
    return "".join(parts)


def compose(*perms):
    """Permutation of following ``perms[0]`` first, then ``perms[1]``, ..."""
    n = len(perms[0])
    out = list(range(n))
    for p in perms:
        out = [p[i] for i in out]
    return tuple(out)


def orbits(perms, n):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for i, j in enumerate(p):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


@dataclass
class MonodromyReport:
    status: str  # "transitive", "intransitive" or "inconclusive"
    permutations: list = field(default_factory=list)
    infinity_permutation: tuple = None
    orbits: list = field(default_factory=list)
    zeros: list = field(default_factory=list)
    radii: list = field(default_factory=list)
    base_point: float = None
    base_roots: list = field(default_factory=list)
    product_relation: bool = None
    reason: str = ""
    backend: str = tracking.BACKEND

    @property
    def label(self):
        return {"transitive": "Transitive", "intransitive": "Intransitive",
                "inconclusive": "Inconclusive"}[self.status]

    def to_json(self):
        return {
            "status": self.label,
            "reason": self.reason,
            "permutations": [cycle_notation(p) for p in self.permutations],
            "infinity_permutation": (cycle_notation(self.infinity_permutation)
                                     if self.infinity_permutation is not None else None),
            "orbits": self.orbits,
            "zeros": [[z.real, z.imag] for z in self.zeros],
            "radii": list(self.radii),
            "base_point": self.base_point,
            "base_roots": [[r.real, r.imag] for r in self.base_roots],
            "loop_steps": LOOP_STEPS,
            "product_relation": self.product_relation,
        }


def _segment(u, v, zeros):
    """Points from ``u`` to ``v`` spaced at a quarter of the distance to the
    nearest discriminant zero."""
    length = abs(v - u)
    if length == 0.0:
        return []
    if len(zeros) == 0:
        return [u + (v - u) * (k / 4) for k in range(1, 5)]
    direction = (v - u) / length
    pts = []
    t = 0.0
    while True:
        step = 0.25 * float(np.min(np.abs(zeros - (u + t * direction))))
        t += step
        if t >= length:
            pts.append(v)
            return pts
        pts.append(u + t * direction)


def _arc(center, radius, start, end, clockwise):
    a = cmath.phase(start - center)
    delta = (cmath.phase(end - center) - a) % (2 * math.pi)
    if clockwise:
        delta -= 2 * math.pi
    steps = max(2, int(math.ceil(abs(delta) / (2 * math.pi) * LOOP_STEPS)))
    return [center + radius * cmath.exp(1j * (a + delta * k / steps)) for k in range(1, steps + 1)]


def _outbound_path(b, target, zeros, radii, k):
    """Polyline from ``b`` to ``target`` that skirts the discs around the other
    zeros along their boundary.  Zeros earlier in the angular order lie to the
    right of the ray, later ones to the left; passing them on that side keeps
    the lasso homotopic to the straight ray even when zeros are collinear
    with ``b``."""
    u, v = b, target
    dv = v - u
    length2 = abs(dv) ** 2
    hits = []
    for j, (zj, rj) in enumerate(zip(zeros, radii)):
        if j == k:
            continue
        t = ((zj - u) * dv.conjugate()).real / length2
        d = abs(u + t * dv - zj)
        if 0.0 < t < 1.0 and d < rj:
            half = math.sqrt(rj * rj - d * d) / math.sqrt(length2)
            hits.append((t - half, t + half, zj, rj, j < k))
    hits.sort()
    zarr = np.array(zeros, dtype=complex)
    path = [u]
    cur = u
    for t_in, t_out, zj, rj, right in hits:
        p_in = u + max(t_in, 0.0) * dv
        p_out = u + min(t_out, 1.0) * dv
        path += _segment(cur, p_in, zarr)
        path += _arc(zj, rj, p_in, p_out, clockwise=right)
        cur = path[-1]
    path += _segment(cur, v, zarr)
    return path


def _match_to_base(final, base):
    perm = []
    for r in final:
        d = sorted((abs(r - s), j) for j, s in enumerate(base))
        if len(d) > 1 and not d[1][0] >= 2.0 * d[0][0]:
            return None
        perm.append(d[0][1])
    if len(set(perm)) != len(perm):
        return None
    return tuple(perm)


def monodromy_transitive(curve, max_depth=12):
    """Numeric monodromy of the sheets around every discriminant zero.

    Zeros are ordered by the angle of ``z - b`` seen from the base point ``b``
    (ties by distance); with that ordering the composite of the lasso
    permutations equals the permutation of the counter-clockwise circle
    through ``b``, which is checked and reported as ``product_relation``.
    """
    n = curve.n
    report = MonodromyReport(status="inconclusive")
    if n == 1:
        report.status = "transitive"
        report.orbits = [[0]]
        report.product_relation = True
        report.infinity_permutation = (0,)
        return report
    disc = discriminant(curve)
    if not disc:
        report.reason = "discriminant vanishes identically (repeated factor)"
        return report
    zeros = _numeric_roots(squarefree_part(disc)) if disc.degree > 0 else []
    scale = 1.0 + max((abs(z) for z in zeros), default=0.0)
    for i in range(len(zeros)):
        for j in range(i + 1, len(zeros)):
            if abs(zeros[i] - zeros[j]) < 1e-7 * scale:
                report.reason = "discriminant zeros closer than the step resolution"
                report.zeros = zeros
                return report
    radius_out = max((abs(z) for z in zeros), default=0.0)
    b = 2.0 * radius_out + 1.0
    zeros.sort(key=lambda z: (round(cmath.phase(z - b) % (2 * math.pi), 12), abs(z - b)))
    radii = []
    for i, z in enumerate(zeros):
        near = min((abs(z - w) for j, w in enumerate(zeros) if j != i), default=math.inf)
        radii.append(0.25 * min(near, abs(b - z)))
    report.zeros = zeros
    report.radii = radii
    report.base_point = b

    coeff_table = _coeff_table(curve)
    base_roots = np.roots(curve.fibre_poly(b))
    base_roots = sorted((complex(r) for r in base_roots), key=lambda c: (round(c.real, 9), round(c.imag, 9)))
    report.base_roots = base_roots
    root_scale = 1.0 + max(abs(r) for r in base_roots)
    gap_tol = 1e-9 * root_scale
    if min(abs(base_roots[i] - base_roots[j]) for i in range(n) for j in range(i + 1, n)) < gap_tol:
        report.reason = "sheets collide at the base point"
        return report

    perms = []
    for k, (z, r) in enumerate(zip(zeros, radii)):
        entry = z + r * (b - z) / abs(b - z)
        out = _outbound_path(b, entry, zeros, radii, k)
        phase = cmath.phase(entry - z)
        circle = [z + r * cmath.exp(1j * (phase + 2 * math.pi * s / LOOP_STEPS))
                  for s in range(1, LOOP_STEPS + 1)]
        lasso = out + circle + out[-2::-1]
        final, status, _gap, _steps = tracking.track_path(coeff_table, lasso, base_roots,
                                                          gap_tol, max_depth)
        if status != tracking.OK:
            report.reason = f"loop {k}: {tracking.STATUS_NAMES[status]}"
            return report
        perm = _match_to_base(final, base_roots)
        if perm is None:
            report.reason = f"loop {k}: end point does not match the base fibre"
            return report
        perms.append(perm)

    big_steps = max(LOOP_STEPS, int(math.ceil(2 * math.pi * b / (0.25 * (b - radius_out)))))
    big = [b * cmath.exp(2j * math.pi * s / big_steps) for s in range(big_steps + 1)]
    final, status, _gap, _steps = tracking.track_path(coeff_table, big, base_roots, gap_tol, max_depth)
    if status != tracking.OK:
        report.reason = f"loop at infinity: {tracking.STATUS_NAMES[status]}"
        report.permutations = perms
        return report
    inf_perm = _match_to_base(final, base_roots)
    if inf_perm is None:
        report.reason = "loop at infinity does not close up on the base fibre"
        report.permutations = perms
        return report

    report.permutations = perms
    report.infinity_permutation = inf_perm
    identity = tuple(range(n))
    report.product_relation = (compose(*perms) if perms else identity) == inf_perm
    report.orbits = orbits(perms, n)
    report.status = "transitive" if len(report.orbits) == 1 else "intransitive"
    return report


def _coeff_table(curve):
    width = max(max(len(c.coeffs) for c in curve.coeffs), 1)
    table = np.zeros((curve.n, width), dtype=complex)
    for i, c in enumerate(curve.coeffs):
        for j, x in enumerate(c.coeffs):
            table[i, j] = complex(x)
    return table
