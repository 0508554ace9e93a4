"""Exact arithmetic over the Gaussian rationals.

Scalars are :class:`ExactComplex` (pairs of rationals), polynomials in the
chart coordinate ``z`` are :class:`Poly` and square matrices with polynomial
entries are :class:`PolyMatrix`.  Everything here is immutable and exact; the
only floating point routine is :func:`eigenvalues_numeric`, used as an oracle.

JSON encoding: a scalar is ``[re_num, re_den, im_num, im_den]``, a polynomial
is the list of its coefficient quadruples by increasing power of ``z`` and a
matrix is a list of rows of polynomials.
"""

from fractions import Fraction
from itertools import combinations
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericError, StructureError

try:  # gmpy2 rationals are roughly an order of magnitude faster
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpq = None

NEG_INF = float("-inf")


def _rat(x):
    """Coerce ints, Fractions, decimal strings and floats (exactly) to the rational type."""
    if _mpq is not None:
        if isinstance(x, float):
            return _mpq(Fraction(x))
        if isinstance(x, str):
            return _mpq(Fraction(x))
        return _mpq(x)
    return Fraction(x)


def rational(num, den=1):
    if den == 0:
        raise DomainError("zero denominator")
    if _mpq is not None:
        return _mpq(num, den)
    return Fraction(num, den)


RATIONAL_BACKEND = "gmpy2" if _mpq is not None else "fractions"


def rational_from_json(value):
    """``[num, den]``, an integer or a ``"p/q"`` string."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise DomainError(f"rational must be an integer pair, got {value!r}")
        return rational(value[0], value[1])
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise DomainError(f"cannot read {value!r} as an exact rational")
    try:
        return _rat(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot read {value!r} as an exact rational") from exc


def rational_to_json(q):
    q = _rat(q)
    return [int(q.numerator), int(q.denominator)]


class ExactComplex:
    """A Gaussian rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _rat(re)
        self.im = _rat(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, value):
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls(value, 0)

    @classmethod
    def from_json(cls, quad):
        if not (isinstance(quad, (list, tuple)) and len(quad) == 4):
            raise DomainError(f"expected [re_num, re_den, im_num, im_den], got {quad!r}")
        a, b, c, d = quad
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in quad):
            raise DomainError(f"scalar quadruple must hold integers, got {quad!r}")
        return cls._raw(rational(a, b), rational(c, d))

    def to_json(self):
        return [int(self.re.numerator), int(self.re.denominator),
                int(self.im.numerator), int(self.im.denominator)]

    def __add__(self, other):
        if not isinstance(other, ExactComplex):
            other = ExactComplex.coerce(other)
        return ExactComplex._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ExactComplex):
            other = ExactComplex.coerce(other)
        return ExactComplex._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ExactComplex.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, ExactComplex):
            other = ExactComplex.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return ExactComplex._raw(a * c, b)
        return ExactComplex._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ExactComplex):
            other = ExactComplex.coerce(other)
        c, d = other.re, other.im
        norm = c * c + d * d
        if not norm:
            raise ZeroDivisionError("division by exact zero")
        a, b = self.re, self.im
        return ExactComplex._raw((a * c + b * d) / norm, (b * c - a * d) / norm)

    def __rtruediv__(self, other):
        return ExactComplex.coerce(other) / self

    def __neg__(self):
        return ExactComplex._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return ExactComplex._raw(self.re, -self.im)

    def abs2(self):
        """Squared modulus as an exact rational."""
        return self.re * self.re + self.im * self.im

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise DomainError("only non-negative integer powers are exact")
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self):
        return not self

    def __eq__(self, other):
        if isinstance(other, ExactComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or (_mpq is not None and isinstance(other, type(_mpq(0)))):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return self == ExactComplex.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((Fraction(int(self.re.numerator), int(self.re.denominator)),
                     Fraction(int(self.im.numerator), int(self.im.denominator))))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"ExactComplex({self.re})"
        return f"ExactComplex({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


ZERO = ExactComplex(0)
ONE = ExactComplex(1)
I_UNIT = ExactComplex(0, 1)


def scalar_from_json(value):
    """Exact quadruple, ``[re, im]`` pair (exact when both are integers), a number
    or an ExactComplex.  Float pairs stay ``complex``."""
    if isinstance(value, ExactComplex):
        return value
    if isinstance(value, (list, tuple)):
        if len(value) == 4:
            return ExactComplex.from_json(list(value))
        if len(value) == 2:
            re, im = value
            if all(isinstance(v, int) and not isinstance(v, bool) for v in (re, im)):
                return ExactComplex(re, im)
            return complex(float(re), float(im))
        raise DomainError(f"cannot read scalar {value!r}")
    if isinstance(value, bool):
        raise DomainError(f"cannot read scalar {value!r}")
    if isinstance(value, (int, Fraction)) or type(value).__name__ == "mpq":
        return ExactComplex(value)
    if isinstance(value, (float, complex)):
        return complex(value)
    raise DomainError(f"cannot read scalar {value!r}")


def scalar_to_json(x):
    if isinstance(x, ExactComplex):
        return x.to_json()
    x = complex(x)
    return [x.real, x.imag]


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


class Poly:
    """Univariate polynomial in the chart coordinate ``z``.

    ``coeffs[k]`` is the coefficient of ``z**k``; trailing zeros are removed,
    so the zero polynomial has an empty coefficient tuple and degree ``-inf``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _trim(ExactComplex.coerce(c) for c in coeffs)

    @classmethod
    def _raw(cls, coeffs):
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        return obj

    @classmethod
    def const(cls, c):
        return cls((c,))

    @classmethod
    def z(cls, power=1, coeff=1):
        return cls([0] * power + [coeff])

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, (list, tuple)):
            raise DomainError(f"polynomial must be a list of coefficient quadruples, got {data!r}")
        return cls._raw(_trim(ExactComplex.from_json(q) for q in data))

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def is_constant(self):
        return len(self.coeffs) <= 1

    def constant_term(self):
        return self.coeffs[0] if self.coeffs else ZERO

    def leading(self):
        return self.coeffs[-1] if self.coeffs else ZERO

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    @staticmethod
    def coerce(value):
        if isinstance(value, Poly):
            return value
        return Poly.const(value)

    def __add__(self, other):
        other = Poly.coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return Poly._raw(_trim(out))

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-Poly.coerce(other))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = ExactComplex.coerce(other)
            if not c:
                return POLY_ZERO
            return Poly._raw(tuple(x * c for x in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return POLY_ZERO
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Poly._raw(_trim(out))

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise DomainError("polynomial powers must be non-negative integers")
        out = POLY_ONE
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c):
        return self * ExactComplex.coerce(c)

    def divmod(self, other):
        """Euclidean division over the Gaussian rationals."""
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(other.coeffs) - 1
        lead = other.coeffs[-1]
        quot = [ZERO] * max(len(rem) - dq, 0)
        for k in range(len(rem) - dq - 1, -1, -1):
            c = rem[k + dq] / lead
            quot[k] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * oc
        return Poly._raw(_trim(quot)), Poly._raw(_trim(rem[:dq]))

    def __floordiv__(self, other):
        return self.divmod(Poly.coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(Poly.coerce(other))[1]

    def exact_div(self, other):
        q, r = self.divmod(Poly.coerce(other))
        if r:
            raise DomainError("polynomial division is not exact")
        return q

    def monic(self):
        if not self:
            return self
        return self * (ONE / self.coeffs[-1])

    def derivative(self):
        return Poly._raw(_trim(c * k for k, c in enumerate(self.coeffs) if k))

    def __call__(self, z):
        """Evaluate exactly at an :class:`ExactComplex` (Horner)."""
        z = ExactComplex.coerce(z)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def eval_numeric(self, z):
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def compose_power(self, k):
        """Return p(z**k)."""
        out = [ZERO] * (k * (len(self.coeffs) - 1) + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[k * i] = c
        return Poly._raw(_trim(out))

    def complex_coeffs(self):
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, ExactComplex)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{k}")
        return " + ".join(terms)


POLY_ZERO = Poly._raw(())
POLY_ONE = Poly._raw((ONE,))


def poly_gcd(a, b):
    """Monic gcd of two polynomials (zero if both vanish)."""
    while b:
        a, b = b, a % b
    return a.monic()


class PolyMatrix:
    """Square matrix with :class:`Poly` entries."""

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        rows = tuple(tuple(Poly.coerce(e) for e in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise StructureError("PolyMatrix must be a non-empty square array")
        self.n = n
        self.rows = rows

    @classmethod
    def _raw(cls, rows):
        obj = object.__new__(cls)
        obj.n = len(rows)
        obj.rows = rows
        return obj

    @classmethod
    def zero(cls, n):
        return cls._raw(tuple((POLY_ZERO,) * n for _ in range(n)))

    @classmethod
    def identity(cls, n):
        return cls._raw(tuple(tuple(POLY_ONE if i == j else POLY_ZERO for j in range(n))
                              for i in range(n)))

    @classmethod
    def diag(cls, entries):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def companion(cls, coeffs):
        """Companion matrix of ``x^n + c1 x^(n-1) + ... + cn``.

        Ones on the subdiagonal, ``-c_{n-i}`` in row ``i`` of the last column.
        """
        n = len(coeffs)
        if n < 1:
            raise DomainError("companion matrix needs at least one coefficient")
        rows = [[POLY_ZERO] * n for _ in range(n)]
        for i in range(1, n):
            rows[i][i - 1] = POLY_ONE
        for i in range(n):
            rows[i][n - 1] = -Poly.coerce(coeffs[n - 1 - i])
        return cls(rows)

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, (list, tuple)) or not data:
            raise DomainError("matrix must be a non-empty list of rows")
        return cls([[Poly.from_json(e) for e in row] for row in data])

    def to_json(self):
        return [[e.to_json() for e in row] for row in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other):
        return PolyMatrix._raw(tuple(tuple(a + b for a, b in zip(r, s))
                                     for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other):
        return PolyMatrix._raw(tuple(tuple(a - b for a, b in zip(r, s))
                                     for r, s in zip(self.rows, other.rows)))

    def __neg__(self):
        return PolyMatrix._raw(tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c):
        return PolyMatrix._raw(tuple(tuple(a * c for a in r) for r in self.rows))

    def __matmul__(self, other):
        n = self.n
        if other.n != n:
            raise StructureError("matrix size mismatch")
        cols = list(zip(*other.rows))
        out = []
        for row in self.rows:
            new_row = []
            for col in cols:
                acc = POLY_ZERO
                for a, b in zip(row, col):
                    if a.coeffs and b.coeffs:
                        acc = acc + a * b
                new_row.append(acc)
            out.append(tuple(new_row))
        return PolyMatrix._raw(tuple(out))

    def transpose(self):
        return PolyMatrix._raw(tuple(zip(*self.rows)))

    @property
    def T(self):
        return self.transpose()

    def trace(self):
        acc = POLY_ZERO
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def is_zero(self):
        return all(not e for row in self.rows for e in row)

    def is_constant(self):
        return all(e.is_constant() for row in self.rows for e in row)

    def max_degree(self):
        return max(e.degree for row in self.rows for e in row)

    def evaluate(self, z):
        """Exact evaluation, returned as a constant PolyMatrix."""
        z = ExactComplex.coerce(z)
        return PolyMatrix._raw(tuple(tuple(Poly._raw(_trim((e(z),))) for e in row)
                                     for row in self.rows))

    def to_numpy(self, z=0):
        return np.array([[e.eval_numeric(complex(z)) for e in row] for row in self.rows],
                        dtype=complex)

    def submatrix(self, rows, cols):
        return PolyMatrix._raw(tuple(tuple(self.rows[i][j] for j in cols) for i in rows))

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "PolyMatrix([" + ", ".join("[" + ", ".join(str(e) for e in r) + "]"
                                          for r in self.rows) + "])"


def kron(a, b):
    """Kronecker product in the lexicographic basis e_i (x) f_j -> index i*m + j."""
    n, m = a.n, b.n
    rows = []
    for i in range(n):
        for k in range(m):
            rows.append(tuple(a.rows[i][j] * b.rows[k][l] for j in range(n) for l in range(m)))
    return PolyMatrix._raw(tuple(rows))


def block_diag(*blocks):
    n = sum(b.n for b in blocks)
    rows = [[POLY_ZERO] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.n):
            for j in range(b.n):
                rows[off + i][off + j] = b.rows[i][j]
        off += b.n
    return PolyMatrix._raw(tuple(tuple(r) for r in rows))


# --- characteristic data -----------------------------------------------------

def char_poly(m):
    """Coefficients ``(c1, ..., cn)`` of ``det(xI - M) = x^n + c1 x^(n-1) + ... + cn``.

    Faddeev-LeVerrier recursion: ``M_k = A M_{k-1} + c_{k-1} I`` and
    ``c_k = -tr(A M_k) / k``.  Only integer divisions occur.
    """
    n = m.n
    coeffs = []
    mk = PolyMatrix.zero(n)
    c_prev = POLY_ONE
    for k in range(1, n + 1):
        if k == 1:
            mk = PolyMatrix.identity(n)
        else:
            mk = m @ mk
            mk = PolyMatrix._raw(tuple(tuple((e + c_prev) if i == j else e
                                             for j, e in enumerate(row))
                                       for i, row in enumerate(mk.rows)))
        c_k = (m @ mk).trace() * ExactComplex(rational(-1, k))
        coeffs.append(c_k)
        c_prev = c_k
    return tuple(coeffs)


def det(m):
    """Determinant by fraction-free (Bareiss) elimination; every division is exact."""
    n = m.n
    a = [list(row) for row in m.rows]
    sign = 1
    prev = POLY_ONE
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return POLY_ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        piv = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * piv - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev) if k else num
            a[i][k] = POLY_ZERO
        prev = piv
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def power_traces(m):
    """``(tr M, tr M^2, ..., tr M^n)`` by repeated multiplication."""
    out = []
    p = m
    for k in range(m.n):
        if k:
            p = p @ m
        out.append(p.trace())
    return tuple(out)


def traces_to_coeffs(traces):
    """Newton's identities: power sums ``p_k`` to coefficients ``c_k``.

    ``k c_k = -(p_k + c_1 p_{k-1} + ... + c_{k-1} p_1)``.
    """
    traces = [Poly.coerce(p) for p in traces]
    if not traces:
        raise DomainError("need at least one trace")
    coeffs = []
    for k in range(1, len(traces) + 1):
        acc = traces[k - 1]
        for i in range(1, k):
            acc = acc + coeffs[i - 1] * traces[k - 1 - i]
        coeffs.append(acc * ExactComplex(rational(-1, k)))
    return tuple(coeffs)


def coeffs_to_traces(coeffs):
    """Inverse of :func:`traces_to_coeffs`."""
    coeffs = [Poly.coerce(c) for c in coeffs]
    if not coeffs:
        raise DomainError("need at least one coefficient")
    traces = []
    for k in range(1, len(coeffs) + 1):
        acc = coeffs[k - 1] * (-k)
        for i in range(1, k):
            acc = acc - coeffs[i - 1] * traces[k - 1 - i]
        traces.append(acc)
    return tuple(traces)


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def exterior_basis(n, k):
    return list(combinations(range(n), k))


def exterior_power(m, k):
    """Derivation action of ``M`` on the k-th exterior power.

    ``M(e_I) = sum_p e_{i_1} ^ ... ^ M e_{i_p} ^ ... ^ e_{i_k}``, in the basis of
    sorted k-subsets in lexicographic order.  Eigenvalues are the sums of k
    distinct eigenvalues of ``M``.
    """
    n = m.n
    if not isinstance(k, int) or not 1 <= k <= n:
        raise DomainError(f"exterior power degree must lie in [1, {n}], got {k}")
    basis = exterior_basis(n, k)
    index = {s: i for i, s in enumerate(basis)}
    size = len(basis)
    rows = [[POLY_ZERO] * size for _ in range(size)]
    for col, subset in enumerate(basis):
        members = set(subset)
        for pos, i in enumerate(subset):
            for r in range(n):
                entry = m.rows[r][i]
                if not entry:
                    continue
                if r == i:
                    rows[col][col] = rows[col][col] + entry
                    continue
                if r in members:
                    continue
                replaced = list(subset)
                replaced[pos] = r
                sign = _perm_sign(replaced)
                target = index[tuple(sorted(replaced))]
                rows[target][col] = rows[target][col] + (entry if sign > 0 else -entry)
    return PolyMatrix._raw(tuple(tuple(r) for r in rows))


def is_skew(m):
    return all(m.rows[i][j] == -m.rows[j][i] for i in range(m.n) for j in range(i, m.n))


def pfaffian(m):
    """Pfaffian of a skew-symmetric matrix by expansion along the first row.

    Sub-Pfaffians are memoised on index tuples, so the cost is O(2^n n).
    """
    n = m.n
    if n % 2:
        raise StructureError("Pfaffian needs an even-sized matrix")
    if not is_skew(m):
        raise StructureError("Pfaffian needs a skew-symmetric matrix")
    rows = m.rows

    @lru_cache(maxsize=None)
    def pf(idx):
        if not idx:
            return POLY_ONE
        first = idx[0]
        acc = POLY_ZERO
        for pos in range(1, len(idx)):
            entry = rows[first][idx[pos]]
            if not entry:
                continue
            rest = idx[1:pos] + idx[pos + 1:]
            term = entry * pf(rest)
            acc = acc + term if pos % 2 == 1 else acc - term
        return acc

    return pf(tuple(range(n)))


def rank_exact(m):
    """Rank of a constant matrix (rows of ExactComplex) by Gaussian elimination."""
    rows = [list(r) for r in m]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                f = rows[r][col] / p
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def constant_entries(m):
    """Rows of ExactComplex for a matrix whose entries are all constants."""
    if not m.is_constant():
        raise StructureError("matrix has non-constant entries")
    return [[e.constant_term() for e in row] for row in m.rows]


def inverse_exact(m):
    """Inverse of a constant invertible matrix; ``None`` if singular."""
    a = constant_entries(m)
    n = m.n
    aug = [row + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return PolyMatrix([[Poly.const(x) for x in row[n:]] for row in aug])


# --- numeric oracle ----------------------------------------------------------

def _polish(coeffs, roots, sweeps=8):
    poly = np.asarray(coeffs, dtype=complex)
    dpoly = np.polyder(poly)
    out = []
    for r in roots:
        for _ in range(sweeps):
            d = np.polyval(dpoly, r)
            if d == 0:
                break
            step = np.polyval(poly, r) / d
            r = r - step
            if abs(step) <= 1e-17 * (1 + abs(r)):
                break
        out.append(r)
    return np.array(out, dtype=complex)


def eigenvalues_numeric(m, z0=0):
    """Approximate eigenvalues of ``M(z0)``.

    The characteristic polynomial is evaluated exactly at ``z0`` and its
    companion matrix handed to LAPACK; roots are then Newton-polished.  Raises
    :class:`NumericError` if a root's residual ``|det(l I - M(z0))|`` exceeds
    ``1e-9 * (1 + ||M(z0)||^n)``.
    """
    z0 = ExactComplex.coerce(z0)
    n = m.n
    coeffs = [1 + 0j] + [complex(c(z0)) for c in char_poly(m)]
    comp = np.zeros((n, n), dtype=complex)
    if n > 1:
        comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = [-coeffs[n - i] for i in range(n)]
    roots = _polish(coeffs, np.linalg.eigvals(comp))
    norm = np.linalg.norm(m.to_numpy(complex(z0)), 2)
    bound = 1e-9 * (1 + norm ** n)
    residual = max((abs(np.polyval(coeffs, r)) for r in roots), default=0.0)
    if not residual <= bound:
        raise NumericError(f"eigenvalue residual {residual:.3e} exceeds {bound:.3e}", residual)
    return sorted(roots.tolist(), key=lambda c: (round(c.real, 9), round(c.imag, 9)))


def multiset_close(a, b, tol):
    """True when two multisets of complex numbers match within ``tol`` (greedy)."""
    a = list(a)
    b = list(b)
    if len(a) != len(b):
        return False
    for x in a:
        j = min(range(len(b)), key=lambda k: abs(b[k] - x), default=None)
        if j is None or abs(b[j] - x) > tol:
            return False
        b.pop(j)
    return True
