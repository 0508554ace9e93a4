"""Stokes data of rank-2 irregular connections ``d + T_n dz/z^n + ... + T_1 dz/z``.

For a pole of order ``n >= 2`` the leading difference ``q_12 = a / z^k`` has
``k = n - 1``.  Anti-Stokes directions are the rays on which ``q_12`` or
``q_21 = -q_12`` is a negative real; there are ``2k`` of them, alternating
between the roots ``(12)`` and ``(21)``.

Angles are kept as exact rational multiples of pi whenever ``arg(a)`` is one
(for Gaussian-rational ``a`` this happens on the axes and the diagonals);
otherwise they are floats.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import cmath
import math

import numpy as np

from .errors import DegeneracyError, DomainError, StructureError
from .exactalg import ExactComplex, scalar_from_json as _scalar, scalar_to_json as _scalar_json


def _is_zero(x):
    return not x if isinstance(x, ExactComplex) else x == 0


@dataclass(frozen=True)
class Pole:
    location: object
    order: int
    polar_matrices: tuple  # diagonal pairs (t1, t2), leading T_order first, T_1 last

    def __post_init__(self):
        object.__setattr__(self, "location", _scalar(self.location))
        mats = tuple(self._diag(m) for m in self.polar_matrices)
        object.__setattr__(self, "polar_matrices", mats)
        if not isinstance(self.order, int) or self.order < 1:
            raise DomainError("pole order must be a positive integer")
        if len(mats) != self.order:
            raise StructureError(f"pole of order {self.order} needs {self.order} polar matrices")

    @staticmethod
    def _diag(m):
        if isinstance(m, np.ndarray):
            if m.shape != (2, 2):
                raise StructureError("polar matrices are 2x2")
            if m[0, 1] != 0 or m[1, 0] != 0:
                raise StructureError("polar matrices must be diagonal")
            return (complex(m[0, 0]), complex(m[1, 1]))
        m = list(m)
        if len(m) != 2:
            raise StructureError("a rank-2 polar matrix is given by its two diagonal entries")
        return (_scalar(m[0]), _scalar(m[1]))

    @property
    def residue(self):
        return self.polar_matrices[-1]

    def to_json(self):
        return {"location": _scalar_json(self.location), "order": self.order,
                "polar_matrices": [[_scalar_json(t) for t in m] for m in self.polar_matrices]}


@dataclass(frozen=True)
class PolarData:
    poles: tuple
    declared_global: bool = False

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(self.poles))
        locs = [complex(p.location) for p in self.poles]
        if len(set(locs)) != len(locs):
            raise StructureError("pole locations must be distinct")
        for i, p in enumerate(self.poles):
            if p.order >= 2:
                t1, t2 = p.polar_matrices[0]
                if _is_zero(t1 - t2):
                    raise DegeneracyError(f"pole {i}: leading polar matrix has equal diagonal entries")
        if self.declared_global:
            for j in range(2):
                entries = [p.residue[j] for p in self.poles]
                if all(isinstance(t, ExactComplex) for t in entries):
                    ok = not sum(entries, ExactComplex(0))
                else:
                    ok = abs(sum(complex(t) for t in entries)) <= 1e-12
                if not ok:
                    raise StructureError("residues of a global connection on P^1 must sum to zero")

    @classmethod
    def from_json(cls, data):
        poles = tuple(Pole(p.get("location", 0), int(p["order"]), tuple(p["polar_matrices"]))
                      for p in data["poles"])
        return cls(poles, bool(data.get("global", False)))

    def to_json(self):
        return {"poles": [p.to_json() for p in self.poles], "global": self.declared_global}


def _pole(p, index):
    if not 0 <= index < len(p.poles):
        raise DomainError(f"pole index {index} out of range")
    return p.poles[index]


def leading_difference(p, pole_index=0):
    """``(a, k)`` with ``q_12 = a / z^k``: ``a`` is the leading diagonal difference and
    ``k = order - 1``."""
    pole = _pole(p, pole_index)
    if pole.order < 2:
        raise DomainError("a simple pole carries no Stokes data (order >= 2 required)")
    t1, t2 = pole.polar_matrices[0]
    a = t1 - t2
    if _is_zero(a):
        raise DegeneracyError("leading polar matrix has equal diagonal entries")
    return a, pole.order - 1


# --- angles -------------------------------------------------------------------

@dataclass(frozen=True)
class Angle:
    """Direction in ``[0, 2 pi)``; ``pi_multiple`` is set when the angle is exact."""

    value: float
    pi_multiple: Fraction = None

    @classmethod
    def exact(cls, frac):
        frac = Fraction(frac) % 2
        return cls(float(frac) * math.pi, frac)

    @classmethod
    def numeric(cls, value):
        value = value % (2 * math.pi)
        if value >= 2 * math.pi:
            value = 0.0
        return cls(value, None)

    @property
    def is_exact(self):
        return self.pi_multiple is not None

    def to_json(self):
        if self.is_exact:
            return {"num": self.pi_multiple.numerator, "den": self.pi_multiple.denominator, "pi": True}
        return self.value

    def __str__(self):
        if not self.is_exact:
            return f"{self.value:.12g}"
        f = self.pi_multiple
        if f == 0:
            return "0"
        num = "" if f.numerator == 1 else str(f.numerator)
        return f"{num}pi" + ("" if f.denominator == 1 else f"/{f.denominator}")


def principal_arg(a):
    """``arg(a)`` in ``[0, 2 pi)``, as an exact multiple of pi when possible.

    Returns ``(Fraction or None, float)``.
    """
    if isinstance(a, ExactComplex):
        re, im = Fraction(a.re), Fraction(a.im)
    else:
        re, im = Fraction(a.real), Fraction(a.imag)
    exact = None
    if im == 0:
        exact = Fraction(0) if re > 0 else Fraction(1)
    elif re == 0:
        exact = Fraction(1, 2) if im > 0 else Fraction(3, 2)
    elif abs(re) == abs(im):
        exact = {(1, 1): Fraction(1, 4), (-1, 1): Fraction(3, 4),
                 (-1, -1): Fraction(5, 4), (1, -1): Fraction(7, 4)}[(1 if re > 0 else -1, 1 if im > 0 else -1)]
    if exact is not None:
        return exact, float(exact) * math.pi
    return None, cmath.phase(complex(a)) % (2 * math.pi)


@dataclass(frozen=True)
class Direction:
    angle: Angle
    roots: tuple  # e.g. ("12",)

    @property
    def multiplicity(self):
        return len(self.roots)

    def to_json(self):
        return {"angle": self.angle.to_json(), "roots": list(self.roots)}


def anti_stokes(p, pole_index=0):
    """Anti-Stokes directions sorted in ``[0, 2 pi)`` with their roots.

    Root ``(12)`` where ``arg(a) - k theta = pi`` and root ``(21)`` where
    ``arg(a) - k theta = 0`` (mod ``2 pi``).
    """
    a, k = leading_difference(p, pole_index)
    exact, phase = principal_arg(a)
    dirs = []
    for j in range(k):
        if exact is not None:
            d12 = Angle.exact((exact - 1 - 2 * j) / Fraction(k))
            d21 = Angle.exact((exact - 2 * j) / Fraction(k))
        else:
            d12 = Angle.numeric((phase - math.pi - 2 * math.pi * j) / k)
            d21 = Angle.numeric((phase - 2 * math.pi * j) / k)
        dirs.append(Direction(d12, ("12",)))
        dirs.append(Direction(d21, ("21",)))
    dirs.sort(key=lambda d: d.angle.value)
    return dirs


def membership(a, k, theta, rel_tol=1e-10):
    """Roots supported by the ray at ``theta``, decided numerically from the sign of
    ``a e^{-ik theta}``: ``"12"`` if it is a negative real, ``"21"`` if positive."""
    w = complex(a) * cmath.exp(-1j * k * theta)
    if abs(w.imag) > rel_tol * abs(w):
        return None
    return "12" if w.real < 0 else "21"


@dataclass(frozen=True)
class HalfPeriod:
    directions: tuple

    @property
    def multiplicity(self):
        return sum(d.multiplicity for d in self.directions)

    def to_json(self):
        return {"directions": [d.angle.to_json() for d in self.directions],
                "roots": [list(d.roots) for d in self.directions],
                "multiplicity": self.multiplicity}


def half_periods(directions):
    """Every run of ``l = #A / 2`` cyclically consecutive directions."""
    count = len(directions)
    if count % 2:
        raise StructureError("odd number of anti-Stokes directions")
    l = count // 2
    return [HalfPeriod(tuple(directions[(s + i) % count] for i in range(l))) for s in range(count)]


def sectors(directions):
    """Stokes sectors ``(d_i, d_{i+1})``, the last one wrapping through ``2 pi``."""
    count = len(directions)
    return [(directions[i].angle, directions[(i + 1) % count].angle) for i in range(count)]


def stokes_factor_shape(direction):
    """Pattern of the unipotent Stokes group of a direction; ``"*"`` marks the free entry."""
    if direction.multiplicity != 1:
        raise StructureError("rank-2 directions carry exactly one root")
    root = direction.roots[0]
    if root == "12":
        return ("upper", [[1, "*"], [0, 1]])
    if root == "21":
        return ("lower", [[1, 0], ["*", 1]])
    raise DomainError(f"unknown root {root!r}")


def stokes_factor(direction, value):
    """Element of the Stokes group with free entry ``value``."""
    kind, _ = stokes_factor_shape(direction)
    m = np.eye(2, dtype=complex)
    if kind == "upper":
        m[0, 1] = value
    else:
        m[1, 0] = value
    return m


def _exp2pii(t):
    """``exp(2 pi i t)``; exact when ``t`` is real with ``4t`` an integer."""
    if isinstance(t, ExactComplex) and not t.im:
        frac = Fraction(t.re) % 1
        if (4 * frac).denominator == 1:
            return {Fraction(0): 1 + 0j, Fraction(1, 4): 1j,
                    Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}[frac]
        return cmath.exp(2j * math.pi * float(frac))
    if isinstance(t, ExactComplex):
        re = float(Fraction(t.re) % 1)
        return math.exp(-2 * math.pi * float(t.im)) * cmath.exp(2j * math.pi * re)
    t = complex(t)
    return math.exp(-2 * math.pi * t.imag) * cmath.exp(2j * math.pi * (t.real % 1.0))


def formal_monodromy(p, pole_index=0):
    """``exp(2 pi i T_1)`` for the residue ``T_1`` of the pole."""
    t1, t2 = _pole(p, pole_index).residue
    return np.diag([_exp2pii(t1), _exp2pii(t2)]).astype(complex)


@dataclass
class StokesReport:
    pole_index: int
    a: object
    k: int
    directions: list
    half_periods: list
    sectors: list
    shapes: list
    formal_monodromy: np.ndarray
    exact_angles: bool = field(default=True)

    def to_json(self):
        return {
            "pole": self.pole_index,
            "a": _scalar_json(self.a),
            "k": self.k,
            "exact_angles": self.exact_angles,
            "directions": [d.to_json() for d in self.directions],
            "half_periods": [h.to_json() for h in self.half_periods],
            "sectors": [[s.to_json(), e.to_json()] for s, e in self.sectors],
            "stokes_factor_shapes": [s[0] for s in self.shapes],
            "formal_monodromy": [[[z.real, z.imag] for z in row] for row in self.formal_monodromy.tolist()],
        }


def stokes_report(p, pole_index=0):
    a, k = leading_difference(p, pole_index)
    dirs = anti_stokes(p, pole_index)
    if len(dirs) != 2 * k:
        raise StructureError(f"expected {2 * k} anti-Stokes directions, found {len(dirs)}")
    return StokesReport(pole_index, a, k, dirs, half_periods(dirs), sectors(dirs),
                        [stokes_factor_shape(d) for d in dirs], formal_monodromy(p, pole_index),
                        all(d.angle.is_exact for d in dirs))


def single_pole(order, leading, residue=(0, 0), location=0):
    """Convenience constructor: one pole with the given leading and residue diagonals
    and zero intermediate polar matrices."""
    mats = [tuple(leading)] + [(0, 0)] * (order - 2) + [tuple(residue)] if order >= 2 else [tuple(residue)]
    return PolarData((Pole(location, order, tuple(mats)),))
