"""Real forms, Cartan involutions on Higgs fields, brane component counts and
the low-rank isogenies ``I_2``, ``I_3``.

Cartan involutions ``theta`` per real form:

=============  ==================================  ==============
form           theta(X)                            matrix size
=============  ==================================  ==============
sl_n_R         -X^t                                n
su_star_2m     -J_m X^t J_m^{-1}                   2m
su_p_q         I_{p,q} X I_{p,q}                   p + q
so_p_q         I_{p,q} X I_{p,q}                   p + q
sp_2n_R        J_n X J_n^{-1}                      2n
sp_2p_2q       K_{p,q} X K_{p,q}                   2(p + q)
so_star_2m     J_m X J_m^{-1}                      2m
=============  ==================================  ==============

Tensor and wedge bases are lexicographic: ``e_i (x) f_j`` has index
``2i + j`` and ``e_i ^ e_j`` (``i < j``) follows ``12, 13, 14, 23, 24, 34``.
"""

from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError, StructureError
from .exactalg import (PolyMatrix, _perm_sign, char_poly, exterior_basis, exterior_power,
                       inverse_exact, kron)
from .higgs import _ensure_valid, is_base_fixed


class RealForm(str, Enum):
    SL_N_R = "sl_n_R"
    SU_STAR_2M = "su_star_2m"
    SU_P_Q = "su_p_q"
    SO_P_Q = "so_p_q"
    SP_2N_R = "sp_2n_R"
    SP_2P_2Q = "sp_2p_2q"
    SO_STAR_2M = "so_star_2m"


_PARAMS = {
    RealForm.SL_N_R: ("n",), RealForm.SU_STAR_2M: ("m",), RealForm.SU_P_Q: ("p", "q"),
    RealForm.SO_P_Q: ("p", "q"), RealForm.SP_2N_R: ("n",), RealForm.SP_2P_2Q: ("p", "q"),
    RealForm.SO_STAR_2M: ("m",),
}


@dataclass(frozen=True)
class RealFormSpec:
    form: RealForm
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        try:
            form = RealForm(self.form)
        except ValueError:
            raise DomainError(f"unknown real form {self.form!r}") from None
        object.__setattr__(self, "form", form)
        params = {}
        for key in _PARAMS[form]:
            value = self.params.get(key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise DomainError(f"{form.value} needs a positive integer parameter {key!r}")
            params[key] = value
        object.__setattr__(self, "params", params)

    @classmethod
    def from_json(cls, data):
        data = dict(data)
        form = data.pop("form", None)
        return cls(form, data)

    def to_json(self):
        return {"form": self.form.value, **self.params}

    @property
    def size(self):
        p = self.params
        if self.form in (RealForm.SL_N_R,):
            return p["n"]
        if self.form in (RealForm.SU_STAR_2M, RealForm.SO_STAR_2M):
            return 2 * p["m"]
        if self.form is RealForm.SP_2N_R:
            return 2 * p["n"]
        if self.form is RealForm.SP_2P_2Q:
            return 2 * (p["p"] + p["q"])
        return p["p"] + p["q"]


def structural_matrix(kind, *params):
    """``I_{p,q} = diag(-I_p, I_q)``, ``J_n = [[0, I_n], [-I_n, 0]]`` and
    ``K_{p,q} = diag(-I_p, I_q, -I_p, I_q)``."""
    if any(not isinstance(v, int) or v < 0 for v in params):
        raise DomainError("structural matrix parameters must be non-negative integers")
    if kind == "Ipq":
        p, q = params
        return PolyMatrix.diag([-1] * p + [1] * q)
    if kind == "Jn":
        (n,) = params
        rows = [[0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            rows[i][n + i] = 1
            rows[n + i][i] = -1
        return PolyMatrix(rows)
    if kind == "Kpq":
        p, q = params
        return PolyMatrix.diag(([-1] * p + [1] * q) * 2)
    raise DomainError(f"unknown structural matrix {kind!r}")


def _theta_data(spec):
    """``(transpose?, sign, C)`` with ``theta(X) = sign * C X' C^{-1}``."""
    p = spec.params
    f = spec.form
    if f is RealForm.SL_N_R:
        return True, -1, PolyMatrix.identity(p["n"])
    if f is RealForm.SU_STAR_2M:
        return True, -1, structural_matrix("Jn", p["m"])
    if f in (RealForm.SU_P_Q, RealForm.SO_P_Q):
        return False, 1, structural_matrix("Ipq", p["p"], p["q"])
    if f is RealForm.SP_2N_R:
        return False, 1, structural_matrix("Jn", p["n"])
    if f is RealForm.SP_2P_2Q:
        return False, 1, structural_matrix("Kpq", p["p"], p["q"])
    return False, 1, structural_matrix("Jn", p["m"])


def apply_theta(spec, x):
    if x.n != spec.size:
        raise DomainError(f"{spec.form.value} acts on {spec.size}x{spec.size} matrices, got {x.n}x{x.n}")
    transpose, sign, c = _theta_data(spec)
    y = x.T if transpose else x
    out = c @ y @ inverse_exact(c)
    return out if sign > 0 else -out


def exchange_matrix(n):
    """Anti-diagonal permutation matrix."""
    return PolyMatrix([[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)])


def _candidates(spec, extra):
    n = spec.size
    out = [("identity", PolyMatrix.identity(n))]
    p = spec.params
    if "p" in p:
        if p["p"] + p["q"] == n:
            out.append(("I_pq", structural_matrix("Ipq", p["p"], p["q"])))
        if 2 * (p["p"] + p["q"]) == n:
            out.append(("K_pq", structural_matrix("Kpq", p["p"], p["q"])))
    if n % 2 == 0:
        out.append(("J", structural_matrix("Jn", n // 2)))
    out.append(("exchange", exchange_matrix(n)))
    for i, g in enumerate(extra):
        out.append((f"user[{i}]", g if isinstance(g, PolyMatrix) else PolyMatrix(g)))
    return out


@dataclass
class FixedPointReport:
    verdict: str  # "Pass" or "NotFound"
    conjugator: str = None
    matrix: PolyMatrix = None
    base_condition: bool = False
    tried: list = field(default_factory=list)
    reason: str = ""

    def to_json(self):
        return {"verdict": self.verdict, "conjugator": self.conjugator,
                "matrix": self.matrix.to_json() if self.matrix is not None else None,
                "base_condition": self.base_condition, "tried": self.tried, "reason": self.reason}


def theta_fixed_point_check(spec, h, extra_conjugators=()):
    """Look for ``g`` in a finite candidate set with ``-theta(phi) g = g phi``.

    Candidates, in order: identity, the structural matrices fitting the form,
    ``J``, the exchange matrix, then ``extra_conjugators``.  The necessary base
    condition (odd characteristic coefficients vanish, i.e. the invariants are
    fixed by ``phi -> -phi``) gates the search.
    """
    _ensure_valid(h)
    coeffs = char_poly(h.phi)
    report = FixedPointReport("NotFound", base_condition=is_base_fixed(list(coeffs), 1))
    if not report.base_condition:
        report.reason = "odd invariants do not vanish"
        return report
    target = -apply_theta(spec, h.phi)
    for name, g in _candidates(spec, extra_conjugators):
        if g.n != h.n or not g.is_constant():
            raise DomainError(f"conjugator {name} must be a constant {h.n}x{h.n} matrix")
        if inverse_exact(g) is None:
            raise DomainError(f"conjugator {name} is singular")
        report.tried.append(name)
        if target @ g == g @ h.phi:
            report.verdict = "Pass"
            report.conjugator = name
            report.matrix = g
            return report
    report.reason = "no candidate conjugates phi to -theta(phi)"
    return report


# --- component counts -----------------------------------------------------------

@dataclass(frozen=True)
class RealStructureInvariants:
    n_plus: int = 0
    n_zero: int = 0
    u: int = 0
    n_circles: int = None
    a: int = None

    def __post_init__(self):
        for name in ("n_plus", "n_zero", "u"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise DomainError(f"{name} must be a non-negative integer")
        if self.a is not None and self.a not in (0, 1):
            raise DomainError("a must be 0 or 1")
        if self.n_circles is not None:
            if self.n_plus > self.n_circles or self.n_zero > self.n_circles:
                raise DomainError("n_plus and n_zero cannot exceed the number of fixed circles")

    @classmethod
    def from_json(cls, data):
        return cls(int(data.get("n_plus", 0)), int(data.get("n_zero", 0)), int(data.get("u", 0)),
                   data.get("n_circles"), data.get("a"))


def _even_u(inv):
    if inv.u % 2:
        raise DomainError(f"u = {inv.u} must be even")
    return inv.u // 2


def aba_component_exponent(inv):
    """``d = 2 n_+ + u/2 - 1`` when ``2 n_+ + u/2 > 0``, else ``1``."""
    s = 2 * inv.n_plus + _even_u(inv)
    return s - 1 if s > 0 else 1


def aba_component_count(inv):
    """``2^d`` components (caller asserts simple zeros and ``f^*(q bar) = q``)."""
    return 2 ** aba_component_exponent(inv)


def prym_fixed_component_count(inv, branch_point_fixed=True):
    """``2^(n_0 + u/2 - 1)``, valid when at least one branch point is fixed."""
    half = _even_u(inv)
    if not branch_point_fixed or inv.u == 0:
        raise DomainError("hypothesis not met: at least one branch point must be fixed (u > 0)")
    exponent = inv.n_zero + half - 1
    if exponent < 0:
        raise DomainError("negative exponent: hypothesis not met")
    return 2 ** exponent


# --- isogenies -----------------------------------------------------------------------

def _trace_free(m, name):
    if m.trace():
        raise StructureError(f"{name} must be trace-free")


def isogeny_I2(phi1, phi2):
    """``phi1 (x) 1 + 1 (x) phi2`` on ``C^2 (x) C^2``."""
    if phi1.n != 2 or phi2.n != 2:
        raise DomainError("I_2 takes two 2x2 Higgs fields")
    _trace_free(phi1, "phi1")
    _trace_free(phi2, "phi2")
    return kron(phi1, PolyMatrix.identity(2)) + kron(PolyMatrix.identity(2), phi2)


def isogeny_I3(phi):
    """Derivation action of a 4x4 field on ``Lambda^2 C^4``."""
    if phi.n != 4:
        raise DomainError("I_3 takes a 4x4 Higgs field")
    _trace_free(phi, "phi")
    return exterior_power(phi, 2)


def wedge_form(n=4):
    """Pairing ``Lambda^k x Lambda^(n-k) -> Lambda^n`` for ``k = n/2``: symmetric for n = 4."""
    if n % 2:
        raise DomainError("wedge pairing needs an even dimension")
    basis = exterior_basis(n, n // 2)
    rows = []
    for s in basis:
        row = []
        for t in basis:
            row.append(0 if set(s) & set(t) else _perm_sign(list(s) + list(t)))
        rows.append(row)
    return PolyMatrix(rows)


def is_wedge_skew_adjoint(m):
    """``Q M + M^t Q = 0`` for the wedge form ``Q``."""
    q = wedge_form(4)
    return (q @ m + m.T @ q).is_zero()
