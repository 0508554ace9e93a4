"""Higgs pairs on a chart: structure conditions, the Hitchin map, the type-A
Hitchin section and a one-sided stability certificate."""

from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigurationError, DomainError, StructureError
from .exactalg import POLY_ZERO, Poly, PolyMatrix, char_poly, det, pfaffian


class GroupTag(str, Enum):
    GL = "GL"
    SL = "SL"
    SO_ODD = "SO_odd"
    SO_EVEN = "SO_even"
    SP = "Sp"
    SU_PQ = "SU_pq"
    SP_PQ = "Sp_2p_2q"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for tag in cls:
            if tag.value.lower() == str(value).lower():
                return tag
        raise DomainError(f"unknown group tag {value!r}")


@dataclass(frozen=True)
class StructureData:
    """Auxiliary data: bilinear form ``Q`` (SO), blocks ``(p, q)`` (SU(p,q), Sp(2p,2q))
    and the declared trivial-determinant flag (SL)."""

    form: PolyMatrix = None
    blocks: tuple = None
    det_trivial: bool = False

    @classmethod
    def from_json(cls, data):
        if data is None:
            return None
        form = PolyMatrix.from_json(data["Q"]) if "Q" in data else None
        blocks = tuple(data["blocks"]) if "blocks" in data else None
        return cls(form=form, blocks=blocks, det_trivial=bool(data.get("det_trivial", False)))

    def to_json(self):
        out = {}
        if self.form is not None:
            out["Q"] = self.form.to_json()
        if self.blocks is not None:
            out["blocks"] = list(self.blocks)
        if self.det_trivial:
            out["det_trivial"] = True
        return out


@dataclass(frozen=True)
class HiggsPair:
    phi: PolyMatrix
    group: GroupTag = GroupTag.GL
    twist_degree: int = 1
    structure: StructureData = None

    def __post_init__(self):
        object.__setattr__(self, "group", GroupTag.parse(self.group))

    @property
    def n(self):
        return self.phi.n

    @classmethod
    def from_json(cls, data):
        phi = PolyMatrix.from_json(data["entries"])
        if "n" in data and data["n"] != phi.n:
            raise DomainError(f"declared n={data['n']} but entries are {phi.n}x{phi.n}")
        return cls(phi=phi, group=GroupTag.parse(data.get("group", "GL")),
                   twist_degree=int(data.get("twist_degree", 1)),
                   structure=StructureData.from_json(data.get("structure")))

    def to_json(self):
        out = {"n": self.n, "group": self.group.value, "twist_degree": self.twist_degree,
               "entries": self.phi.to_json()}
        if self.structure is not None:
            out["structure"] = self.structure.to_json()
        return out


@dataclass
class Condition:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class StructureReport:
    conditions: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)

    def add(self, name, passed, detail=""):
        self.conditions.append(Condition(name, bool(passed), detail))

    def first_failure(self):
        return next((c for c in self.conditions if not c.passed), None)

    def to_json(self):
        return {"passed": self.passed,
                "conditions": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                               for c in self.conditions]}


def symplectic_form(m):
    """Standard ``J_m = [[0, I_m], [-I_m, 0]]``."""
    n = 2 * m
    rows = [[0] * n for _ in range(n)]
    for i in range(m):
        rows[i][m + i] = 1
        rows[m + i][i] = -1
    return PolyMatrix(rows)


def _first_nonzero(m):
    for i, row in enumerate(m.rows):
        for j, e in enumerate(row):
            if e:
                return i, j, e
    return None


def _zero_condition(report, name, m):
    bad = _first_nonzero(m)
    report.add(name, bad is None, "" if bad is None else f"entry ({bad[0]},{bad[1]}) = {bad[2]}")


def _require_structure(h):
    if h.structure is None:
        raise ConfigurationError(f"group {h.group.value} needs structure data")
    return h.structure


def check_structure(h):
    """Check the structure conditions of ``h`` exactly; returns a :class:`StructureReport`."""
    report = StructureReport()
    phi, n, tag = h.phi, h.n, h.group
    if tag is GroupTag.GL:
        report.add("square", True)
        return report
    if tag is GroupTag.SP:
        # the standard symplectic form is implied; no auxiliary data needed
        report.add("size_even", n % 2 == 0, f"n = {n}")
        if n % 2 == 0:
            jp = symplectic_form(n // 2) @ phi
            _zero_condition(report, "J_phi_symmetric", jp - jp.T)
        return report
    st = _require_structure(h)
    if tag is GroupTag.SL:
        tr = phi.trace()
        report.add("trace_zero", not tr, "" if not tr else f"trace = {tr}")
        report.add("det_trivial_declared", st.det_trivial,
                   "" if st.det_trivial else "trivial determinant not declared")
    elif tag in (GroupTag.SO_ODD, GroupTag.SO_EVEN):
        want_odd = tag is GroupTag.SO_ODD
        report.add("size_parity", (n % 2 == 1) == want_odd, f"n = {n}")
        q = st.form
        if q is None:
            raise ConfigurationError("orthogonal structure needs the bilinear form Q")
        if q.n != n:
            raise StructureError(f"form Q is {q.n}x{q.n}, Higgs field is {n}x{n}")
        _zero_condition(report, "form_symmetric", q - q.T)
        dq = det(q)
        report.add("form_nondegenerate", bool(dq) and dq.is_constant(), f"det Q = {dq}")
        _zero_condition(report, "skew_adjoint", q @ phi + phi.T @ q)
    elif tag is GroupTag.SU_PQ:
        p, q = _blocks(st, n)
        off = [[phi.rows[i][j] if (i < p) == (j < p) else POLY_ZERO for j in range(n)]
               for i in range(n)]
        _zero_condition(report, "block_off_diagonal", PolyMatrix(off))
    elif tag is GroupTag.SP_PQ:
        p, q = _blocks(st, n // 2)
        report.add("size_even", n % 2 == 0, f"n = {n}")
        jp = symplectic_form(n // 2) @ phi
        _zero_condition(report, "J_phi_symmetric", jp - jp.T)
        from .branes import structural_matrix
        k = structural_matrix("Kpq", p, q)
        _zero_condition(report, "K_anticommutes", k @ phi @ k + phi)
    return report


def _blocks(st, total):
    if st.blocks is None or len(st.blocks) != 2:
        raise ConfigurationError("block structure (p, q) required")
    p, q = (int(b) for b in st.blocks)
    if p < 0 or q < 0 or p + q != total:
        raise StructureError(f"blocks ({p}, {q}) do not fit size {total}")
    return p, q


def _ensure_valid(h):
    report = check_structure(h)
    if not report.passed:
        bad = report.first_failure()
        raise StructureError(f"{h.group.value} structure violated: {bad.name} {bad.detail}".strip())
    return report


def hitchin_map(h):
    """Basic invariant polynomials of the Higgs field, per group type.

    GL: all characteristic coefficients; SL and SU(p,q): ``a_2..a_n``; SO(2m+1),
    Sp: the even coefficients; SO(2m): even coefficients with the top one
    replaced by the Pfaffian of ``Q phi``.
    """
    _ensure_valid(h)
    coeffs = char_poly(h.phi)
    tag = h.group
    if tag is GroupTag.GL:
        return list(coeffs)
    if tag in (GroupTag.SL, GroupTag.SU_PQ):
        return list(coeffs[1:])
    even = [coeffs[k - 1] for k in range(2, h.n + 1, 2)]
    if tag is GroupTag.SO_EVEN:
        q = h.structure.form
        return even[:-1] + [pfaffian(q @ h.phi)]
    return even


def hitchin_section(n, a, twist_degree=1):
    """Companion-matrix section: ``char_poly = x^n + a_2 x^(n-2) + ... + a_n``."""
    if not isinstance(n, int) or n < 2:
        raise DomainError("rank must be at least 2")
    a = [Poly.coerce(x) for x in a]
    if len(a) != n - 1:
        raise DomainError(f"expected {n - 1} coefficients a_2..a_n, got {len(a)}")
    phi = PolyMatrix.companion([POLY_ZERO] + a)
    return HiggsPair(phi=phi, group=GroupTag.SL, twist_degree=twist_degree,
                     structure=StructureData(det_trivial=True))


@dataclass
class StabilityCertificate:
    verdict: str  # "stable" or "unknown"
    reason: str = ""
    monodromy: object = None

    def to_json(self):
        out = {"verdict": self.verdict, "reason": self.reason}
        if self.monodromy is not None:
            out["monodromy"] = self.monodromy.to_json()
        return out


def stability_certificate(h):
    """Stable when spectral monodromy acts transitively (irreducible
    characteristic polynomial); otherwise Unknown.  Never claims instability."""
    from .spectral import classify, from_higgs, monodromy_transitive

    _ensure_valid(h)
    curve = from_higgs(h)
    diag = classify(curve)
    if diag.kind == "reducible":
        return StabilityCertificate("unknown", f"characteristic polynomial reducible by shape: {diag.reason}")
    mono = monodromy_transitive(curve)
    if mono.status == "transitive":
        return StabilityCertificate("stable", "spectral monodromy is transitive", mono)
    if mono.status == "intransitive":
        return StabilityCertificate("unknown", "spectral monodromy is intransitive", mono)
    return StabilityCertificate("unknown", f"monodromy inconclusive: {mono.reason}", mono)


def base_involution_action(coeffs, first_degree=1):
    """Action of ``(E, phi) -> (E, -phi)`` on invariants: ``a_i -> (-1)^i a_i``.

    ``coeffs[k]`` has degree ``first_degree + k``.
    """
    return [c if (first_degree + k) % 2 == 0 else -Poly.coerce(c)
            for k, c in enumerate(coeffs)]


def is_base_fixed(coeffs, first_degree=1):
    return all(not c for k, c in enumerate(coeffs) if (first_degree + k) % 2)
